#pragma once

#include "hif/arc/arc_model.hpp"
#include "hif/core/waveform.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hif::network {

struct FeederSpec {
    std::string name;
    double c0 = 0.0;                ///< F, zero-sequence phase-to-earth capacitance
    std::optional<double> r0;       ///< Ohm, phase-to-earth leakage; absent means infinite
};

/// n-feeder zero-sequence equivalent: all feeder capacitances and leakages in
/// parallel at the substation bus, the coil inductance L in parallel with its
/// loss resistance R, and the fault injected into feeder `faulty_index`.
struct NetworkParameters {
    double f0 = 50.0;
    std::vector<FeederSpec> feeders;
    double coil_l = 0.0;            ///< H, zero-sequence equivalent (3x coil inductance)
    std::optional<double> coil_r;   ///< Ohm, parallel loss resistance of the coil branch
    std::size_t faulty_index = 0;   ///< 0-based

    /// Throws InvalidInput on n < 2, nonpositive C/L/R, or a bad fault index.
    void validate() const;

    [[nodiscard]] double omega0() const noexcept;
    [[nodiscard]] double total_capacitance() const noexcept;
    /// 1/R_sigma = 1/R + sum 1/R_0i.
    [[nodiscard]] double total_conductance() const noexcept;
    [[nodiscard]] double feeder_conductance(std::size_t i) const noexcept;
    [[nodiscard]] double coil_conductance() const noexcept;
    /// omega0^2 * L * C_sigma.
    [[nodiscard]] double compensation() const noexcept;

    /// c_i = C_0i / C_sigma.
    [[nodiscard]] double capacitance_share(std::size_t i) const noexcept;
    /// r_R0i = R_sigma / R_0i. Zero for a lossless network.
    [[nodiscard]] double feeder_resistance_share(std::size_t i) const noexcept;
    /// r_R = R_sigma / R. One for a lossless network, matching the coil-only
    /// convention used when no resistive path exists.
    [[nodiscard]] double coil_resistance_share() const noexcept;

    /// Detuning within [-0.1, 0), the nominal undercompensated band.
    [[nodiscard]] bool in_nominal_band() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept { return feeders.size(); }
};

/// v = 1 - 1/(omega0^2 L C_sigma).
[[nodiscard]] double detuning_index(const NetworkParameters& params);

/// d = 1/(omega0 R_sigma C_sigma).
[[nodiscard]] double damping_ratio(const NetworkParameters& params);

/// Builds a network that hits target (v, d). `coil_share` is the fraction of
/// the total leakage conductance placed on the coil branch; the rest is split
/// across feeders in proportion to their capacitance.
struct NetworkTargets {
    double f0 = 50.0;
    std::vector<std::string> names;
    std::vector<double> capacitances;  ///< F
    double detuning = -0.05;
    double damping = 0.0;
    double coil_share = 1.0;
    std::size_t faulty_index = 0;
};
[[nodiscard]] NetworkParameters make_network(const NetworkTargets& targets);

/// Harmonic k = order of the fundamental frequency.
struct HarmonicComponent {
    int order = 3;
    double amplitude = 0.0;  ///< V, peak
    double phase_rad = 0.0;
};

/// Equivalent virtual voltage source at the fault point, optionally carrying
/// harmonic content (for example from a nearby harmonic load).
struct VirtualSource {
    double amplitude = 0.0;  ///< V, peak fundamental
    double phase_rad = 0.0;
    std::vector<HarmonicComponent> harmonics;

    [[nodiscard]] double operator()(double t, double f0) const noexcept;
};

/// A precomputed fault current i_0f, interpolated with a Keys cubic kernel
/// between its samples.
struct InjectedFault {
    WaveformRecord record;
    std::string channel = "i_0f";
};

/// Virtual source in series with a linear resistance (fault resistance plus
/// the lumped positive/negative-mode impedances) and the nonlinear arc.
/// `series_profile`, when non-empty, overrides `r_series` with a piecewise
/// linear schedule of (time s, resistance Ohm) points held flat outside.
struct CoupledFault {
    VirtualSource source;
    double r_series = 0.0;
    std::vector<std::pair<double, double>> series_profile;
    arc::ArcParameters arc;

    [[nodiscard]] double series_resistance(double t) const noexcept;
};

using FaultSource = std::variant<InjectedFault, CoupledFault>;

enum class InitialState {
    Zero,            ///< u_0b(0) = 0, i_0L(0) = 0
    PeriodicSteady,  ///< periodic steady state found by single-cycle shooting (injected mode only)
};

struct SimulationOptions {
    double duration = 1.0;  ///< s
    double fs = 6400.0;     ///< Hz, output sample rate
    int oversample = 10;    ///< internal RK4 steps per output sample
    InitialState initial_state = InitialState::Zero;
};

/// Channel naming of simulated records.
[[nodiscard]] std::string feeder_channel(const std::string& feeder_name);
inline constexpr const char* kFaultChannel = "i_0f";
inline constexpr const char* kBusVoltageChannel = "u_0b";
inline constexpr const char* kSubstationChannel = "i_0N";
inline constexpr const char* kCoilChannel = "i_0L";
inline constexpr const char* kArcChannel = "r_arc";

/// Time-domain simulation of the zero-sequence network:
///
///     L di_0L/dt = u_0b
///     C_sigma du_0b/dt = i_0f - i_0L - u_0b / R_sigma
///
/// Output channels: i_0f, u_0b, i_0L, i_0N, i_0_<name> per feeder, and r_arc
/// in coupled mode. Feeder currents are evaluated from the same derivative as
/// the state update, so i_0n + sum(i_0i) + i_0N = 0 holds to rounding.
[[nodiscard]] WaveformRecord simulate_zero_sequence(const NetworkParameters& params, const FaultSource& source,
                                                    const SimulationOptions& options);

/// Start of the steady-state segment: max(min_cycles periods, 5 time
/// constants of the damped tank). In coupled mode the fault path
/// r_series + r_arc_init counts as an extra parallel conductance. Returns
/// +infinity for a lossless tank driven by an injected current.
[[nodiscard]] double settling_time(const NetworkParameters& params, const FaultSource& source,
                                   double min_cycles = 20.0);

}  // namespace hif::network
