#pragma once

#include "hif/core/waveform.hpp"

#include <optional>
#include <vector>

namespace hif::arc {

/// Constant-parameter energy-balance arc. The arc resistance obeys
///
///     dR/dt = (R / tau) * (p_loss - u * i)
///
/// so it rises while the input power u*i is below the dissipated power and
/// falls while it is above. A linear resistor r_series sits in series.
struct ArcParameters {
    double p_loss = 2000.0;      ///< W
    double tau = 300.0;          ///< J (W*s)
    double r_series = 0.0;       ///< Ohm
    double r_arc_init = 1000.0;  ///< Ohm
    double r_floor = 1e-2;       ///< Ohm, lower clamp on the arc resistance
    double r_ceiling = 1e7;      ///< Ohm, upper clamp on the arc resistance

    /// Throws InvalidInput when an invariant is violated.
    void validate() const;

    /// d(ln R)/dt for a given instantaneous arc input power.
    [[nodiscard]] double log_rate(double arc_power) const noexcept {
        return (p_loss - arc_power) / tau;
    }

    [[nodiscard]] double clamp(double r_arc) const noexcept;
};

struct ArcState {
    double r_arc = 1000.0;  ///< Ohm
    double t = 0.0;         ///< s
};

/// Advances the arc resistance over dt with u_arc and i_arc held constant.
/// Under constant input the log-resistance ODE is linear and the step is
/// exact: R <- R * exp((p_loss - u*i) * dt / tau), then clamped.
[[nodiscard]] ArcState arc_resistance_step(const ArcState& state, double u_arc, double i_arc, double dt,
                                           const ArcParameters& params);

struct SinusoidSource {
    double amplitude = 0.0;  ///< V, peak
    double frequency = 50.0; ///< Hz
    double phase_rad = 0.0;

    [[nodiscard]] double operator()(double t) const noexcept;
};

/// Stiff sinusoidal source driving r_series + R_arc in series. Returns a
/// record with channels "i", "u_arc" and "r_arc" sampled at fs. The ODE is
/// integrated with RK4 at an internal step of 1/(oversample * fs).
[[nodiscard]] WaveformRecord simulate_arc_circuit(const SinusoidSource& source, const ArcParameters& params,
                                                  double duration, double fs, int oversample = 10);

/// Distortion descriptors of one current half-cycle.
struct DistortionMetrics {
    double half_cycle_start = 0.0;  ///< s, opening current zero crossing
    /// s from the opening zero crossing to the r_arc maximum; absent when
    /// r_arc is flat over the half-cycle (linear circuit).
    std::optional<double> offset;
    double duration = 0.0;  ///< s spent above duration_fraction * extent
    double extent = 0.0;    ///< Ohm, half-cycle peak r_arc
};

struct DistortionOptions {
    double duration_fraction = 0.5;
    /// Relative r_arc swing below which a half-cycle counts as flat.
    double flat_tolerance = 1e-12;
};

/// One metrics triple per complete current half-cycle in the record. Needs
/// channels "i" and "r_arc". Peak time is refined by parabolic interpolation
/// and zero crossings by linear interpolation, so offsets resolve below one
/// sample.
[[nodiscard]] std::vector<DistortionMetrics> distortion_metrics(const WaveformRecord& record, double f0,
                                                                const DistortionOptions& options = {});

/// Times (s) of the local maxima of r_arc in the record, interior samples only.
[[nodiscard]] std::vector<double> resistance_peaks(const WaveformRecord& record);

}  // namespace hif::arc
