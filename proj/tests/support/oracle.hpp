#pragma once

// Test-only reference models, written from first principles and kept
// independent of the library code they check.

#include "hif/core/waveform.hpp"
#include "hif/network/network.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace hif::test {

using cplx = std::complex<double>;

/// Zero-sequence currents per unit of injected k-th harmonic fault current,
/// by nodal analysis of the parallel C/G/L network. Feeders in network
/// order, substation last. Currents leave the bus, the fault current enters.
inline std::vector<cplx> admittance_response(const network::NetworkParameters& p, int k) {
    const double w = 2.0 * std::numbers::pi * p.f0 * k;
    std::vector<cplx> feeder_y;
    cplx total{0.0, 0.0};
    for (const auto& f : p.feeders) {
        const cplx y{f.r0 ? 1.0 / *f.r0 : 0.0, w * f.c0};
        feeder_y.push_back(y);
        total += y;
    }
    const cplx coil_y = cplx{p.coil_r ? 1.0 / *p.coil_r : 0.0, 0.0} + 1.0 / cplx{0.0, w * p.coil_l};
    total += coil_y;
    const cplx u = 1.0 / total;
    std::vector<cplx> out;
    for (std::size_t i = 0; i < feeder_y.size(); ++i) {
        out.push_back(feeder_y[i] * u - (i == p.faulty_index ? 1.0 : 0.0));
    }
    out.push_back(coil_y * u);
    return out;
}

inline double arg_deg(cplx z) { return std::arg(z) * 180.0 / std::numbers::pi; }

inline double angle_gap_deg(double a, double b) {
    double d = std::fmod(a - b, 360.0);
    if (d > 180.0) {
        d -= 360.0;
    }
    if (d <= -180.0) {
        d += 360.0;
    }
    return std::abs(d);
}

struct Tone {
    int order = 1;
    double amplitude = 0.0;
    double phase_deg = 0.0;  ///< sine phase at t = 0
};

/// sum of A*sin(k*w0*t + phi) sampled at fs.
inline std::vector<double> synth(const std::vector<Tone>& tones, double f0, double fs, std::size_t n, double t0 = 0.0) {
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) / fs;
        for (const auto& tone : tones) {
            x[i] += tone.amplitude *
                    std::sin(2.0 * std::numbers::pi * f0 * tone.order * t + tone.phase_deg * std::numbers::pi / 180.0);
        }
    }
    return x;
}

inline WaveformRecord tone_record(const std::string& channel, const std::vector<Tone>& tones, double f0, double fs,
                                  std::size_t n, double t0 = 0.0) {
    WaveformRecord rec(fs, t0);
    rec.add_channel(channel, synth(tones, f0, fs, n, t0));
    return rec;
}

}  // namespace hif::test
