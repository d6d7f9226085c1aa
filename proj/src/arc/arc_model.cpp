#include "hif/arc/arc_model.hpp"

#include "hif/core/angles.hpp"
#include "hif/core/error.hpp"
#include "hif/core/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hif::arc {

namespace {

[[nodiscard]] bool finite_all(std::initializer_list<double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

struct Crossing {
    std::size_t index;  // first sample after the crossing
    double time;
};

// Zero crossings of the current in either direction, linearly interpolated.
std::vector<Crossing> zero_crossings(const WaveformRecord& record, std::span<const double> current) {
    std::vector<Crossing> out;
    for (std::size_t n = 1; n < current.size(); ++n) {
        const double a = current[n - 1];
        const double b = current[n];
        if (a == 0.0) {
            continue;
        }
        if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
            const double frac = a / (a - b);
            out.push_back({n, record.time(n - 1) + frac * record.dt()});
        }
    }
    return out;
}

}  // namespace

void ArcParameters::validate() const {
    if (!finite_all({p_loss, tau, r_series, r_arc_init, r_floor, r_ceiling})) {
        fail(ErrorCategory::InvalidInput, "arc parameters must be finite");
    }
    if (p_loss <= 0.0) {
        fail(ErrorCategory::InvalidInput, "arc p_loss must be positive");
    }
    if (tau <= 0.0) {
        fail(ErrorCategory::InvalidInput, "arc tau must be positive");
    }
    if (r_series < 0.0) {
        fail(ErrorCategory::InvalidInput, "arc series resistance must be non-negative");
    }
    if (r_arc_init <= 0.0) {
        fail(ErrorCategory::InvalidInput, "initial arc resistance must be positive");
    }
    if (!(r_floor > 0.0) || !(r_ceiling > r_floor)) {
        fail(ErrorCategory::InvalidInput, "arc resistance clamp must satisfy 0 < floor < ceiling");
    }
}

double ArcParameters::clamp(double r_arc) const noexcept {
    return std::clamp(r_arc, r_floor, r_ceiling);
}

ArcState arc_resistance_step(const ArcState& state, double u_arc, double i_arc, double dt,
                             const ArcParameters& params) {
    if (!finite_all({state.r_arc, state.t, u_arc, i_arc, dt})) {
        fail(ErrorCategory::InvalidInput, "arc step received non-finite input");
    }
    if (!(dt > 0.0)) {
        fail(ErrorCategory::InvalidInput, "arc step requires dt > 0");
    }
    if (!(state.r_arc > 0.0)) {
        fail(ErrorCategory::InvalidInput, "arc resistance must be positive");
    }
    const double growth = params.log_rate(u_arc * i_arc) * dt;
    // exp() of a large exponent overflows before the clamp can act.
    const double log_r = std::log(state.r_arc) + growth;
    const double r_new = params.clamp(std::exp(std::clamp(log_r, std::log(params.r_floor),
                                                          std::log(params.r_ceiling))));
    return {r_new, state.t + dt};
}

double SinusoidSource::operator()(double t) const noexcept {
    return amplitude * std::sin(kTwoPi * frequency * t + phase_rad);
}

WaveformRecord simulate_arc_circuit(const SinusoidSource& source, const ArcParameters& params, double duration,
                                    double fs, int oversample) {
    params.validate();
    if (!(source.frequency > 0.0) || !std::isfinite(source.amplitude)) {
        fail(ErrorCategory::InvalidInput, "source needs a positive frequency and finite amplitude");
    }
    const std::size_t per_cycle = samples_per_cycle(fs, source.frequency);
    if (per_cycle < 20) {
        fail(ErrorCategory::Configuration, "fs must be at least 20 times the source frequency");
    }
    if (duration * source.frequency < 2.0 - 1e-9) {
        fail(ErrorCategory::Configuration, "duration must cover at least two fundamental cycles");
    }
    if (oversample < 1) {
        fail(ErrorCategory::Configuration, "oversample must be >= 1");
    }

    const auto n_samples = static_cast<std::size_t>(std::llround(duration * fs));
    const double h = 1.0 / (fs * oversample);
    const double log_floor = std::log(params.r_floor);
    const double log_ceiling = std::log(params.r_ceiling);

    auto current = [&](double t, double r_arc) { return source(t) / (params.r_series + r_arc); };
    auto rhs = [&](double t, const std::array<double, 1>& y) {
        const double r_arc = std::exp(std::clamp(y[0], log_floor, log_ceiling));
        const double i = current(t, r_arc);
        return std::array<double, 1>{params.log_rate(i * i * r_arc)};
    };

    std::vector<double> i_out(n_samples);
    std::vector<double> u_out(n_samples);
    std::vector<double> r_out(n_samples);
    std::array<double, 1> y{std::log(params.clamp(params.r_arc_init))};
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double t = static_cast<double>(n) / fs;
        const double r_arc = std::exp(y[0]);
        const double i = current(t, r_arc);
        i_out[n] = i;
        u_out[n] = i * r_arc;
        r_out[n] = r_arc;
        for (int s = 0; s < oversample; ++s) {
            const double ts = t + s * h;
            y = rk4_step(rhs, ts, y, h);
            y[0] = std::clamp(y[0], log_floor, log_ceiling);
        }
    }

    WaveformRecord record(fs);
    record.add_channel("i", std::move(i_out));
    record.add_channel("u_arc", std::move(u_out));
    record.add_channel("r_arc", std::move(r_out));
    return record;
}

std::vector<DistortionMetrics> distortion_metrics(const WaveformRecord& record, double f0,
                                                  const DistortionOptions& options) {
    if (!record.has_channel("i") || !record.has_channel("r_arc")) {
        fail(ErrorCategory::InvalidInput, "distortion metrics need channels 'i' and 'r_arc'");
    }
    if (!(f0 > 0.0)) {
        fail(ErrorCategory::InvalidInput, "f0 must be positive");
    }
    if (record.duration() * f0 < 1.0 - 1e-9) {
        fail(ErrorCategory::InvalidInput, "record must span at least one fundamental cycle");
    }
    if (!(options.duration_fraction > 0.0 && options.duration_fraction < 1.0)) {
        fail(ErrorCategory::InvalidInput, "duration fraction must lie in (0, 1)");
    }
    const auto current = record.channel("i");
    const auto r_arc = record.channel("r_arc");
    const auto crossings = zero_crossings(record, current);
    const double dt = record.dt();

    std::vector<DistortionMetrics> out;
    for (std::size_t c = 0; c + 1 < crossings.size(); ++c) {
        const Crossing open = crossings[c];
        const Crossing close = crossings[c + 1];
        if (close.index <= open.index) {
            continue;
        }
        // Samples strictly inside the half-cycle.
        std::size_t peak = open.index;
        double r_min = r_arc[open.index];
        for (std::size_t n = open.index; n < close.index; ++n) {
            if (r_arc[n] > r_arc[peak]) {
                peak = n;
            }
            r_min = std::min(r_min, r_arc[n]);
        }
        DistortionMetrics m;
        m.half_cycle_start = open.time;
        m.extent = r_arc[peak];

        const bool flat = (m.extent - r_min) <= options.flat_tolerance * m.extent;
        if (!flat) {
            double t_peak = record.time(peak);
            if (peak > 0 && peak + 1 < r_arc.size()) {
                const double y0 = r_arc[peak - 1];
                const double y1 = r_arc[peak];
                const double y2 = r_arc[peak + 1];
                const double denom = y0 - 2.0 * y1 + y2;
                if (denom < 0.0) {
                    t_peak += 0.5 * (y0 - y2) / denom * dt;
                }
            }
            m.offset = std::clamp(t_peak - open.time, 0.0, std::nextafter(0.5 / f0, 0.0));
        }

        // Time above threshold, with linear interpolation at threshold crossings.
        const double threshold = options.duration_fraction * m.extent;
        double above = 0.0;
        for (std::size_t n = open.index; n + 1 < close.index; ++n) {
            const double a = r_arc[n] - threshold;
            const double b = r_arc[n + 1] - threshold;
            if (a >= 0.0 && b >= 0.0) {
                above += dt;
            } else if (a >= 0.0 || b >= 0.0) {
                above += dt * std::max(a, b) / std::abs(a - b);
            }
        }
        // Partial intervals between the crossings and the first/last interior samples.
        if (r_arc[open.index] >= threshold) {
            above += record.time(open.index) - open.time;
        }
        if (r_arc[close.index - 1] >= threshold) {
            above += close.time - record.time(close.index - 1);
        }
        m.duration = std::min(above, close.time - open.time);
        out.push_back(m);
    }
    return out;
}

std::vector<double> resistance_peaks(const WaveformRecord& record) {
    const auto r_arc = record.channel("r_arc");
    std::vector<double> peaks;
    for (std::size_t n = 1; n + 1 < r_arc.size(); ++n) {
        if (r_arc[n] > r_arc[n - 1] && r_arc[n] >= r_arc[n + 1]) {
            peaks.push_back(record.time(n));
        }
    }
    return peaks;
}

}  // namespace hif::arc
