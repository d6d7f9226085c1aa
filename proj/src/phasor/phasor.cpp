#include "hif/phasor/phasor.hpp"

#include "hif/core/angles.hpp"
#include "hif/core/error.hpp"

#include <cmath>
#include <span>

namespace hif::phasor {

namespace {

void check_order(int m, std::size_t n) {
    if (m < 1) {
        fail(ErrorCategory::InvalidInput, "maximum harmonic order must be >= 1");
    }
    if (static_cast<std::size_t>(m) > n / 2 - 1) {
        fail(ErrorCategory::InvalidInput,
             "harmonic order " + std::to_string(m) + " exceeds the Nyquist limit of " + std::to_string(n / 2 - 1));
    }
}

// DFT over `cycles` whole cycles of x (x.size() == cycles * n). Bin k*cycles
// holds harmonic k. t_start is the absolute time of x[0].
PhasorSet dft_harmonics(std::span<const double> x, std::size_t cycles, double t_start, double f0, int m) {
    const double len = static_cast<double>(x.size());
    PhasorSet out;
    out.window_start = t_start;
    out.f0 = f0;
    out.harmonics.reserve(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) {
        const double step = kTwoPi * static_cast<double>(k * cycles) / len;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double arg = step * static_cast<double>(i);
            re += x[i] * std::cos(arg);
            im -= x[i] * std::sin(arg);
        }
        const std::complex<double> z(re, im);
        const double amplitude = 2.0 * std::abs(z) / len;
        const double cycles_before = f0 * t_start;
        const double shift = kTwoPi * k * (cycles_before - std::floor(cycles_before));
        const double phase = std::arg(z) + kPi / 2.0 - shift;
        out.harmonics.push_back({amplitude, amplitude > 0.0 ? wrap_deg(rad_to_deg(phase)) : 0.0});
    }
    return out;
}

}  // namespace

std::complex<double> Phasor::as_complex() const noexcept { return std::polar(amplitude, deg_to_rad(phase_deg)); }

Phasor Phasor::from_complex(std::complex<double> z) noexcept {
    return {std::abs(z), wrap_deg(rad_to_deg(std::arg(z)))};
}

const Phasor& PhasorSet::at(int k) const {
    if (!has(k)) {
        fail(ErrorCategory::InvalidInput, "phasor set lacks harmonic order " + std::to_string(k));
    }
    return harmonics[static_cast<std::size_t>(k - 1)];
}

PhasorSet window_phasors(const WaveformRecord& record, std::string_view channel, double window_start, double f0,
                         int m) {
    const std::size_t n = samples_per_cycle(record.fs(), f0);
    check_order(m, n);
    const auto x = record.channel(channel);
    const double pos = std::round((window_start - record.t0()) * record.fs());
    if (pos < 0.0 || pos + static_cast<double>(n) > static_cast<double>(x.size())) {
        fail(ErrorCategory::Range, "analysis window at t = " + std::to_string(window_start) +
                                       " s does not fit inside the record");
    }
    const auto start = static_cast<std::size_t>(pos);
    return dft_harmonics(x.subspan(start, n), 1, record.time(start), f0, m);
}

DecompositionResult decompose_waveform(const WaveformRecord& record, std::string_view channel, double f0, int m) {
    const std::size_t n = samples_per_cycle(record.fs(), f0);
    check_order(m, n);
    const auto x = record.channel(channel);
    const std::size_t cycles = x.size() / n;
    if (cycles == 0) {
        fail(ErrorCategory::Range, "record is shorter than one fundamental cycle");
    }
    DecompositionResult dec;
    dec.channel = std::string(channel);
    dec.phasors = dft_harmonics(x.first(cycles * n), cycles, record.t0(), f0, m);

    const Phasor& p1 = dec.phasors.at(1);
    const double w = kTwoPi * f0;
    const double phase = deg_to_rad(p1.phase_deg);
    std::vector<double> sinu(x.size());
    std::vector<double> dist(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sinu[i] = p1.amplitude * std::sin(w * record.time(i) + phase);
        dist[i] = x[i] - sinu[i];
    }
    dec.sinusoidal = WaveformRecord(record.fs(), record.t0());
    dec.sinusoidal.add_channel(dec.channel, std::move(sinu));
    dec.distortional = WaveformRecord(record.fs(), record.t0());
    dec.distortional.add_channel(dec.channel, std::move(dist));
    return dec;
}

WaveformRecord recompose_scaled(const DecompositionResult& dec, double p) {
    const auto s = dec.sinusoidal.channel(dec.channel);
    const auto d = dec.distortional.channel(dec.channel);
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = s[i] + p * d[i];
    }
    WaveformRecord rec(dec.sinusoidal.fs(), dec.sinusoidal.t0());
    rec.add_channel(dec.channel, std::move(out));
    return rec;
}

std::vector<PhasorSet> sliding_phasor_stream(const WaveformRecord& record, std::string_view channel, double f0,
                                             int m) {
    const std::size_t n = samples_per_cycle(record.fs(), f0);
    if (n % 2 != 0) {
        fail(ErrorCategory::Configuration,
             "half-cycle window stepping needs an even number of samples per cycle, got " + std::to_string(n));
    }
    check_order(m, n);
    const auto x = record.channel(channel);
    std::vector<PhasorSet> stream;
    if (x.size() < n) {
        return stream;
    }
    const std::size_t hop = n / 2;
    const std::size_t count = (x.size() - n) / hop + 1;
    stream.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        stream.push_back(dft_harmonics(x.subspan(j * hop, n), 1, record.time(j * hop), f0, m));
    }
    return stream;
}

double harmonic_power(const PhasorSet& set) noexcept {
    double p = 0.0;
    for (const auto& h : set.harmonics) {
        p += 0.5 * h.amplitude * h.amplitude;
    }
    return p;
}

}  // namespace hif::phasor
