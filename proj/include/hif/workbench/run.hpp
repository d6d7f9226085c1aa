#pragma once

#include "hif/core/waveform.hpp"
#include "hif/identify/identify.hpp"
#include "hif/phasor/phasor.hpp"
#include "hif/theory/theory.hpp"
#include "hif/workbench/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hif::workbench {

struct ChannelStream {
    std::string channel;
    std::vector<phasor::PhasorSet> windows;
};

struct ClassicWindow {
    double window_start = 0.0;
    std::vector<double> delta_phi;  ///< per feeder, deg
    std::vector<bool> gated;        ///< 3rd harmonic passed the amplitude gate
    identify::Verdict verdict;      ///< sole feeder meeting the classic criterion
};

struct RunBundle {
    Scenario scenario;
    WaveformRecord waveforms;
    std::vector<ChannelStream> streams;  ///< feeders first, then i_0N, u_0b, i_0f
    identify::IdentificationResult identification;
    std::vector<ClassicWindow> classic;
    std::optional<theory::EstimatedParameters> estimate;
    std::string estimate_error;
    WaveformRecord prediction;  ///< steady-state segment, from the estimated parameters

    [[nodiscard]] bool correct() const noexcept;
    /// Every feeder pair passed the gate over the last k_consec windows.
    [[nodiscard]] bool gate_passed() const noexcept;
    [[nodiscard]] std::size_t misranked_classic_windows() const noexcept;
};

/// Steady-state phasors of one channel over all full cycles after the
/// settling time.
[[nodiscard]] phasor::PhasorSet steady_phasors(const WaveformRecord& record, const std::string& channel,
                                               double settle_time, double f0, int m);

/// Simulates, analyzes, identifies, estimates and predicts. Deterministic
/// for a fixed scenario (including its seed). Module errors are rethrown
/// with the scenario name prepended.
[[nodiscard]] RunBundle run(const Scenario& scenario, const std::filesystem::path& base_dir = {});

/// Analysis only, on an existing record that carries the feeder channels.
[[nodiscard]] RunBundle analyze_record(const Scenario& scenario, WaveformRecord record);

/// waveforms.csv, phasors.csv, indicators.csv, classic.csv, prediction.csv,
/// verdict.txt, scenario.cfg and manifest.
void write_bundle(const RunBundle& bundle, const std::filesystem::path& out_dir);

[[nodiscard]] std::string verdict_name(const Scenario& scenario, const identify::Verdict& verdict);

inline constexpr const char* kBundleFormat = "hif-bundle 1";
inline constexpr const char* kModuleVersion = "1.0.0";

}  // namespace hif::workbench
