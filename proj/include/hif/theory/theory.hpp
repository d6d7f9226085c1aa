#pragma once

#include "hif/network/network.hpp"
#include "hif/phasor/phasor.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hif::theory {

enum class FeederRole { Faulty, Healthy, Substation };

[[nodiscard]] const char* to_string(FeederRole role) noexcept;

/// Multiplier and counterclockwise rotation that map the k-th harmonic of
/// the fault current i_0f onto the k-th harmonic of a feeder current.
struct HarmonicTransfer {
    FeederRole role = FeederRole::Healthy;
    int k = 1;
    double gain = 0.0;
    double rotation_deg = 0.0;  ///< (-180, 180]

    [[nodiscard]] phasor::Phasor apply(const phasor::Phasor& fault) const noexcept;
};

/// (1 - k^2) / (1 - k^2 s) with s = w0^2 L C_sigma.
[[nodiscard]] double harmonic_gain_factor(int k, double s);

/// Lower and upper ends of the harmonic gain factor over k >= 2:
/// (1/s, 3/(4s - 1)].
[[nodiscard]] double harmonic_gain_lower(double s);
[[nodiscard]] double harmonic_gain_upper(double s);

/// Midpoint of the interval above, the constant used in place of the
/// k-dependent factor by the simplified lossless prediction.
[[nodiscard]] double harmonic_gain_midpoint(double s);

enum class GainFactorMode {
    Exact,     ///< (1 - k^2)/(1 - k^2 s) per harmonic
    Midpoint,  ///< the single constant harmonic_gain_midpoint(s)
};

struct LosslessCoefficients {
    double p1 = 0.0;  ///< c_n - v
    double p2 = 0.0;  ///< c_n * G
    double p3 = 0.0;  ///< c_i
    double p4 = 0.0;  ///< c_i * G
    double p5 = 0.0;  ///< 1 - v
    double p6 = 0.0;  ///< G
    double harmonic_gain_factor = 0.0;  ///< G
};

/// Coefficients for harmonic k; `c_n` and `c_i` are the faulty and one
/// healthy feeder's capacitance shares.
[[nodiscard]] LosslessCoefficients lossless_coefficients(double v, int k, double c_n, double c_i,
                                                         GainFactorMode mode = GainFactorMode::Exact);

/// Largest faulty-feeder share c_n keeping the faulty feeder's k-th harmonic
/// in positive superposition: 1 - (1 - v)/k^2.
[[nodiscard]] double superposition_threshold(double v, int k);

/// Lossless transfer for one role. `c` is c_n (faulty), c_i (healthy) and
/// ignored for the substation. Throws Singular for v = 0.
[[nodiscard]] HarmonicTransfer lossless_transfer(double v, int k, FeederRole role, double c,
                                                 GainFactorMode mode = GainFactorMode::Exact);

/// Damped transfer (coil and leakage conductances present). `c` is c_n or
/// c_i, `r_feeder` is r_R0n or r_R0i, and `r_coil` is r_R. Throws Singular
/// when v = d = 0.
[[nodiscard]] HarmonicTransfer damped_transfer(double v, double d, int k, FeederRole role, double c,
                                               double r_feeder, double r_coil);

/// Dimensionless description of a network, as needed by the closed forms.
struct TransferParameters {
    double f0 = 50.0;
    double v = 0.0;
    double d = 0.0;
    double r_coil = 1.0;
    std::vector<std::string> names;
    std::vector<double> c;         ///< capacitance shares, one per feeder
    std::vector<double> r_feeder;  ///< leakage shares, one per feeder
    std::size_t faulty_index = 0;

    [[nodiscard]] static TransferParameters from_network(const network::NetworkParameters& params);
    [[nodiscard]] std::size_t size() const noexcept { return c.size(); }
};

struct NetworkTransfer {
    std::vector<HarmonicTransfer> feeders;  ///< network feeder order
    HarmonicTransfer substation;
};

[[nodiscard]] NetworkTransfer lossless_transfer(const TransferParameters& params, int k,
                                                GainFactorMode mode = GainFactorMode::Exact);
[[nodiscard]] NetworkTransfer damped_transfer(const TransferParameters& params, int k);

enum class PredictionModel {
    Damped,            ///< conductances included
    Lossless,          ///< conductances ignored, exact harmonic factor
    LosslessMidpoint,  ///< conductances ignored, constant harmonic factor
};

/// Theoretical feeder and substation currents built from the decomposed fault
/// current: every harmonic of i_0f is scaled and rotated per role and the
/// results summed. Channels follow the simulator naming (i_0_<name>, i_0N).
[[nodiscard]] WaveformRecord predict_feeder_waveforms(const phasor::DecompositionResult& fault_dec,
                                                      const TransferParameters& params,
                                                      PredictionModel model = PredictionModel::Damped);
[[nodiscard]] WaveformRecord predict_feeder_waveforms(const phasor::DecompositionResult& fault_dec,
                                                      const network::NetworkParameters& params,
                                                      PredictionModel model = PredictionModel::Damped);

/// Fundamental phasors measured during the fault. Healthy feeders are given
/// in network order with the faulty feeder skipped. The faulty-feeder and
/// fault-point phasors are optional; with both present the faulty feeder's
/// own leakage is measured, otherwise it is assumed to be proportional to
/// its capacitance like the healthy feeders on average.
struct EstimationInput {
    phasor::PhasorSet u_0b;
    std::vector<phasor::PhasorSet> healthy;
    phasor::PhasorSet substation;
    std::optional<phasor::PhasorSet> faulty;
    std::optional<phasor::PhasorSet> fault;
};

struct EstimationOptions {
    double min_voltage = 1e-3;  ///< V, fundamental u_0b amplitude below which estimation is refused
    /// Damping below this is reported as a lossless network (r_R = 1, r_R0i = 0).
    double lossless_damping = 1e-9;
};

struct EstimatedParameters {
    double v = 0.0;
    double d = 0.0;
    double r_coil = 1.0;
    double c_n = 0.0;
    double r_faulty = 0.0;
    std::vector<double> c_healthy;
    std::vector<double> r_healthy;

    /// Reinserts the faulty feeder at `faulty_index` of a network with the
    /// given feeder names.
    [[nodiscard]] TransferParameters to_transfer(const std::vector<std::string>& names, std::size_t faulty_index,
                                                 double f0) const;
};

/// Projects every current onto the u_0b fundamental (resistive axis) and its
/// quadrature (capacitive / inductive axis) and inverts the definitions of
/// v and d. Throws Estimation when u_0b is below the gate.
[[nodiscard]] EstimatedParameters estimate_network_parameters(const EstimationInput& input, double c_n,
                                                              const EstimationOptions& options = {});

}  // namespace hif::theory
