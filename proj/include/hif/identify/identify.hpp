#pragma once

#include "hif/phasor/phasor.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hif::identify {

/// |wrap(phi_a - phi_b - 180)| in degrees, within [0, 180].
[[nodiscard]] double pairwise_indicator(double phi_a_deg, double phi_b_deg) noexcept;

/// A harmonic measurement is trusted when its amplitude reaches
/// max(relative * fundamental, absolute).
struct AmplitudeGate {
    double relative = 0.005;
    double absolute = 0.01;  ///< A

    [[nodiscard]] bool passes(const phasor::PhasorSet& set, int k) const;
};

struct IdentifyOptions {
    double thr = 40.0;  ///< deg
    AmplitudeGate gate;
    std::size_t k_consec = 5;
    int order = 3;
};

using Verdict = std::optional<std::size_t>;  ///< empty means undetermined

struct WindowResult {
    double window_start = 0.0;
    /// n x n, degrees; the diagonal holds NaN.
    std::vector<std::vector<double>> indicator;
    /// n x n, both feeders of the pair pass the amplitude gate.
    std::vector<std::vector<bool>> valid;
    Verdict verdict;
};

struct IdentificationResult {
    std::vector<WindowResult> per_window;
    Verdict aggregated_verdict;
    double thr = 40.0;
    std::size_t k_consec = 5;
};

/// Consumes one synchronized window at a time. Feeder a is the window's
/// candidate when every pair (a, i) is valid and within thr; zero or several
/// candidates leave the window undetermined. The aggregated verdict is the
/// feeder that reached k_consec consecutive windows as sole candidate; if
/// two different feeders do so the aggregate is undetermined.
class Identifier {
public:
    Identifier(std::size_t feeders, IdentifyOptions options = {});

    /// One phasor set per feeder, all from the same window. Throws
    /// Synchronization when window starts differ.
    void push(std::span<const phasor::PhasorSet> window);

    [[nodiscard]] const IdentificationResult& result() const noexcept { return result_; }
    [[nodiscard]] std::size_t feeders() const noexcept { return n_; }

private:
    std::size_t n_;
    IdentifyOptions options_;
    IdentificationResult result_;
    Verdict run_feeder_;
    std::size_t run_length_ = 0;
    std::vector<bool> confirmed_;
};

/// Batch form over whole streams, one per feeder (see sliding_phasor_stream).
/// Throws Configuration for fewer than 2 feeders and Synchronization when the
/// streams disagree on length or window boundaries.
[[nodiscard]] IdentificationResult identify(std::span<const std::vector<phasor::PhasorSet>> streams,
                                            const IdentifyOptions& options = {});

/// Fundamental-versus-3rd-harmonic phase difference wrap(3 phi_1 - phi_3).
[[nodiscard]] double classic_delta_phi(const phasor::PhasorSet& set);

/// Classic fault criterion |wrap(delta_phi - 180)| <= thr.
[[nodiscard]] bool classic_criterion(double delta_phi_deg, double thr = 40.0) noexcept;

/// Shift of a healthy feeder's classic phase difference relative to the
/// fault point with feeder leakage neglected:
/// 3 [180 + atan(d/v)] - atan(3d / (8 + v)), degrees, unwrapped.
[[nodiscard]] double classic_bracket(double v, double d);

enum class MapMethod { Proposed, Classic };

struct MapOptions {
    double thr = 40.0;
    double r_coil = 1.0;
    double r_faulty = 0.0;
    double r_healthy = 0.0;
    /// Healthy feeder share; empty means all healthy capacitance lumped, 1 - c_n.
    std::optional<double> c_healthy;
    /// Classic map: phase difference assumed at the fault point.
    double fault_delta_phi = 180.0;
};

struct MapCell {
    double v = 0.0;
    double d = 0.0;
    bool singular = false;
    /// Proposed: faulty-vs-healthy indicator. Classic: healthy-feeder
    /// |wrap(delta_phi - 180)|.
    double value = 0.0;
    double faulty_delta_phi = 0.0;   ///< classic only
    double healthy_delta_phi = 0.0;  ///< classic only
    bool pass = false;
};

struct EffectiveAreaMap {
    MapMethod method = MapMethod::Proposed;
    double c_n = 0.0;
    std::vector<double> v_grid;
    std::vector<double> d_grid;
    std::vector<MapCell> cells;  ///< row-major over (v, d)

    [[nodiscard]] std::size_t pass_count() const noexcept;
    [[nodiscard]] std::size_t evaluated_count() const noexcept;
};

[[nodiscard]] EffectiveAreaMap effective_area_map(double c_n, std::span<const double> v_grid,
                                                  std::span<const double> d_grid, MapMethod method,
                                                  const MapOptions& options = {});

/// Evenly stepped grid from `first` to `last` inclusive.
[[nodiscard]] std::vector<double> linear_grid(double first, double last, double step);

}  // namespace hif::identify
