#pragma once

#include "hif/arc/arc_model.hpp"
#include "hif/identify/identify.hpp"
#include "hif/network/network.hpp"
#include "hif/workbench/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hif::workbench {

enum class SourceKind { Coupled, Injected };

struct SourceHarmonic {
    int order = 3;
    double amplitude = 0.0;  ///< V, peak
    double phase_deg = 0.0;
};

/// Fault description as written in a scenario file. Phases are kept in
/// degrees so that files round-trip exactly.
struct SourceSettings {
    SourceKind kind = SourceKind::Coupled;

    double amplitude = 8165.0;  ///< V, peak of the virtual source u_f
    double phase_deg = 0.0;
    std::vector<SourceHarmonic> harmonics;
    double r_series = 1500.0;   ///< Ohm, fault-path resistance R_T
    std::vector<std::pair<double, double>> series_profile;
    arc::ArcParameters arc = default_arc();

    std::string injected_file;
    std::string injected_channel = "i_0f";

    [[nodiscard]] static arc::ArcParameters default_arc() noexcept {
        arc::ArcParameters p;
        p.p_loss = 1000.0;
        p.tau = 2.0;
        return p;
    }
};

struct SimSettings {
    double duration = 1.0;      ///< s
    double fs = 6400.0;         ///< Hz
    double settle_cycles = 20.0;
    std::optional<double> noise_std;  ///< A, added to every current channel
    int oversample = 10;
    network::InitialState initial_state = network::InitialState::Zero;
};

struct AnalysisSettings {
    double f0 = 50.0;
    int m = 11;
    identify::IdentifyOptions identify;
    std::optional<double> c_n;  ///< faulty-feeder capacitance share used for estimation
};

struct Scenario {
    std::string name = "scenario";
    network::NetworkParameters network;
    SourceSettings source;
    SimSettings sim;
    AnalysisSettings analysis;
    std::optional<std::uint64_t> seed;

    /// Throws Configuration (or the sub-module category) on the first problem.
    void validate() const;

    [[nodiscard]] std::vector<std::string> feeder_names() const;
    [[nodiscard]] double settle_time() const noexcept { return sim.settle_cycles / analysis.f0; }
};

/// Defaults used for anything a scenario file leaves out: 50 Hz, 6.4 kHz,
/// four feeders with capacitances proportional to 13.3 : 10.8 : 10.8 : 24.7
/// and a 30 uF total, detuning -0.05, damping 0.2 (half of it in the coil),
/// fault on the first feeder.
[[nodiscard]] Scenario default_scenario();

inline constexpr double kDefaultTotalCapacitance = 30e-6;
inline constexpr double kDefaultCoilShare = 0.5;
inline constexpr double kDefaultDamping = 0.2;

/// Builds the network fault source; injected files are resolved relative
/// to `base_dir`.
[[nodiscard]] network::FaultSource build_fault_source(const Scenario& scenario,
                                                      const std::filesystem::path& base_dir = {});

[[nodiscard]] Scenario scenario_from_config(const ConfigMap& config);
/// Canonical explicit form: the network is written with its coil inductance
/// and feeder capacitances rather than detuning and damping targets.
[[nodiscard]] ConfigMap scenario_to_config(const Scenario& scenario);

[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Command-line overrides, applied to the raw config before parsing.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> thr;
    std::optional<double> f0;
    std::optional<double> fs;

    void apply(ConfigMap& config) const;
};

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view data) noexcept;

}  // namespace hif::workbench
