#include "hif/workbench/sweep.hpp"

#include "hif/core/error.hpp"
#include "hif/workbench/csv.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace hif::workbench {

namespace {

const std::string kAxisPrefix = "sweep.axis.";

std::vector<std::string> metrics_of(const RunBundle& b) {
    const auto& id = b.identification;
    const auto determined = std::count_if(id.per_window.begin(), id.per_window.end(),
                                          [](const identify::WindowResult& w) { return w.verdict.has_value(); });
    const auto faulty = b.scenario.network.faulty_index;
    double worst = 0.0;
    if (!id.per_window.empty()) {
        const auto& last = id.per_window.back();
        for (std::size_t j = 0; j < last.indicator.size(); ++j) {
            if (j != faulty) {
                worst = std::max(worst, last.indicator[faulty][j]);
            }
        }
    }
    std::string fault_dphi;
    if (b.waveforms.has_channel(network::kFaultChannel)) {
        const auto set = steady_phasors(b.waveforms, network::kFaultChannel, b.scenario.settle_time(),
                                        b.scenario.analysis.f0, b.scenario.analysis.m);
        fault_dphi = format_number(identify::classic_delta_phi(set));
    }
    return {
        verdict_name(b.scenario, id.aggregated_verdict),
        b.scenario.network.feeders[faulty].name,
        b.correct() ? "1" : "0",
        b.gate_passed() ? "1" : "0",
        std::to_string(determined),
        std::to_string(b.misranked_classic_windows()),
        format_number(worst),
        fault_dphi,
        b.estimate ? format_number(b.estimate->v) : std::string(),
        b.estimate ? format_number(b.estimate->d) : std::string(),
    };
}

}  // namespace

const std::vector<std::string>& sweep_metrics() {
    static const std::vector<std::string> names = {
        "verdict",          "faulty",           "correct",        "gate_passed",     "windows_determined",
        "classic_misranked", "final_indicator_max", "fault_delta_phi", "estimated_v", "estimated_d",
    };
    return names;
}

std::size_t SweepSpec::cell_count() const noexcept {
    std::size_t n = axes.empty() ? 0 : 1;
    for (const auto& a : axes) {
        n *= a.values.size();
    }
    return n;
}

ConfigMap SweepSpec::cell_config(std::size_t index) const {
    ConfigMap cfg = base;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
        cfg.set(it->path, it->values[index % it->values.size()]);
        index /= it->values.size();
    }
    return cfg;
}

void SweepSpec::validate() const {
    if (axes.empty()) {
        fail(ErrorCategory::Configuration, "sweep needs at least one axis");
    }
    for (const auto& a : axes) {
        if (a.values.empty()) {
            fail(ErrorCategory::Configuration, "sweep axis '" + a.path + "' has no values");
        }
        if (std::count_if(axes.begin(), axes.end(), [&](const SweepAxis& b) { return b.path == a.path; }) > 1) {
            fail(ErrorCategory::Configuration, "sweep axis '" + a.path + "' given twice");
        }
        ConfigMap probe = base;
        probe.set(a.path, a.values.front());
        try {
            static_cast<void>(scenario_from_config(probe));
        } catch (const Error& e) {
            if (e.category() == ErrorCategory::Parse) {
                fail(ErrorCategory::Configuration, "sweep axis '" + a.path + "' does not resolve: " + e.what());
            }
        }
    }
    for (const auto& o : outputs) {
        if (std::find(sweep_metrics().begin(), sweep_metrics().end(), o) == sweep_metrics().end()) {
            fail(ErrorCategory::Configuration, "unknown sweep output '" + o + "'");
        }
    }
}

SweepSpec sweep_from_config(const ConfigMap& config) {
    SweepSpec spec;
    for (const auto& e : config.entries()) {
        if (e.key.rfind(kAxisPrefix, 0) == 0) {
            spec.axes.push_back({e.key.substr(kAxisPrefix.size()), split_list(e.value)});
        } else if (e.key == "sweep.outputs") {
            spec.outputs = split_list(e.value);
        } else if (e.key.rfind("sweep.", 0) == 0) {
            fail(ErrorCategory::Parse, config.source() + ":" + std::to_string(e.line) + ": key '" + e.key +
                                           "': unknown sweep key");
        } else {
            spec.base.set(e.key, e.value);
        }
    }
    spec.validate();
    return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path) { return sweep_from_config(ConfigMap::load(path)); }

std::size_t SweepTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        fail(ErrorCategory::InvalidInput, "sweep table has no column '" + name + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

std::string SweepTable::str() const {
    CsvTable t(columns);
    for (const auto& r : rows) {
        t.row();
        for (const auto& c : r) {
            t.cell(c);
        }
    }
    return t.str();
}

void SweepTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCategory::Io, "cannot write '" + path.string() + "'");
    }
    out << str();
}

SweepTable sweep(const SweepSpec& spec, const SweepOptions& options) {
    spec.validate();
    const auto& all = sweep_metrics();
    const auto& selected = spec.outputs.empty() ? all : spec.outputs;
    std::vector<std::size_t> pick;
    for (const auto& o : selected) {
        pick.push_back(static_cast<std::size_t>(std::find(all.begin(), all.end(), o) - all.begin()));
    }

    SweepTable table;
    table.columns.push_back("cell");
    for (const auto& a : spec.axes) {
        table.columns.push_back(a.path);
    }
    table.columns.insert(table.columns.end(), selected.begin(), selected.end());
    table.columns.push_back("error");

    const std::size_t cells = spec.cell_count();
    table.rows.resize(cells);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < cells; i = next++) {
            auto& row = table.rows[i];
            row.push_back(std::to_string(i));
            std::size_t rest = i;
            std::vector<std::string> axis_values(spec.axes.size());
            for (std::size_t a = spec.axes.size(); a-- > 0;) {
                axis_values[a] = spec.axes[a].values[rest % spec.axes[a].values.size()];
                rest /= spec.axes[a].values.size();
            }
            row.insert(row.end(), axis_values.begin(), axis_values.end());
            std::vector<std::string> metrics(all.size());
            std::string error;
            try {
                const auto scenario = scenario_from_config(spec.cell_config(i));
                const auto bundle = run(scenario, options.base_dir);
                metrics = metrics_of(bundle);
                if (options.bundle_dir) {
                    char name[32];
                    std::snprintf(name, sizeof(name), "cell_%04zu", i);
                    write_bundle(bundle, *options.bundle_dir / name);
                }
            } catch (const Error& e) {
                error = std::string(to_string(e.category())) + ": " + e.what();
            } catch (const std::exception& e) {
                error = e.what();
            }
            for (auto p : pick) {
                row.push_back(metrics[p]);
            }
            std::replace(error.begin(), error.end(), ',', ';');
            std::replace(error.begin(), error.end(), '\n', ' ');
            row.push_back(error);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.parallelism, static_cast<unsigned>(cells)));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    return table;
}

}  // namespace hif::workbench
