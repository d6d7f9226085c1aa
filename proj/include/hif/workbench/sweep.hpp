#pragma once

#include "hif/workbench/config.hpp"
#include "hif/workbench/run.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hif::workbench {

struct SweepAxis {
    std::string path;  ///< scenario key, e.g. "network.detuning"
    std::vector<std::string> values;
};

/// Base scenario plus the axes spanned by the sweep. In a file, axes are
/// written as `[sweep]` entries `axis.<path> = v1, v2, ...` and the metric
/// selection as `outputs = ...`.
struct SweepSpec {
    ConfigMap base;
    std::vector<SweepAxis> axes;
    std::vector<std::string> outputs;  ///< empty selects every metric

    /// Throws Configuration or Parse when an axis is empty, its path does
    /// not resolve, or an output is unknown.
    void validate() const;

    [[nodiscard]] std::size_t cell_count() const noexcept;
    /// Row-major: the first axis varies slowest.
    [[nodiscard]] ConfigMap cell_config(std::size_t index) const;
};

[[nodiscard]] SweepSpec sweep_from_config(const ConfigMap& config);
[[nodiscard]] SweepSpec load_sweep(const std::filesystem::path& path);

[[nodiscard]] const std::vector<std::string>& sweep_metrics();

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::string str() const;
    void save(const std::filesystem::path& path) const;
    [[nodiscard]] std::size_t column(const std::string& name) const;
};

struct SweepOptions {
    unsigned parallelism = 1;
    std::optional<std::filesystem::path> bundle_dir;  ///< per-cell bundles in cell_<index>/
    std::filesystem::path base_dir;                   ///< resolves injected source files
};

/// One row per cell. A cell that throws is recorded in the `error` column
/// and the sweep continues. Output does not depend on `parallelism`.
[[nodiscard]] SweepTable sweep(const SweepSpec& spec, const SweepOptions& options = {});

}  // namespace hif::workbench
