#include "hif/core/error.hpp"
#include "hif/identify/identify.hpp"
#include "hif/phasor/phasor.hpp"
#include "hif/theory/theory.hpp"
#include "hif/workbench/csv.hpp"
#include "hif/workbench/run.hpp"
#include "hif/workbench/scenario.hpp"
#include "hif/workbench/sweep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace hif;
using namespace hif::workbench;

namespace {

struct Globals {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> thr;
    std::optional<double> f0;
    std::optional<double> fs;

    [[nodiscard]] Overrides overrides() const { return {seed, thr, f0, fs}; }

    [[nodiscard]] fs::path base_dir() const {
        return scenario.empty() ? fs::path() : fs::path(scenario).parent_path();
    }

    [[nodiscard]] Scenario load() const {
        ConfigMap cfg = scenario.empty() ? scenario_to_config(default_scenario()) : ConfigMap::load(scenario);
        overrides().apply(cfg);
        return scenario_from_config(cfg);
    }

    [[nodiscard]] fs::path out_dir() const { return out.empty() ? fs::path(".") : fs::path(out); }

    [[nodiscard]] double f0_or_default() const { return f0.value_or(50.0); }
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        fail(ErrorCategory::Io, "cannot create '" + dir.string() + "': " + ec.message());
    }
}

int cmd_simulate(const Globals& g) {
    const auto scenario = g.load();
    const auto bundle = run(scenario, g.base_dir());
    ensure_dir(g.out_dir());
    export_waveforms(bundle.waveforms, g.out_dir() / "waveforms.csv");
    save_scenario(scenario, g.out_dir() / "scenario.cfg");
    std::cout << "wrote " << bundle.waveforms.size() << " samples x " << bundle.waveforms.channel_count()
              << " channels to " << (g.out_dir() / "waveforms.csv").string() << '\n';
    return 0;
}

int cmd_analyze(const Globals& g, const std::string& input, std::vector<std::string> channels, int m) {
    const auto record = import_waveforms(input);
    if (channels.empty()) {
        channels = record.channel_names();
    }
    const double f0 = g.f0_or_default();
    ensure_dir(g.out_dir());
    CsvTable sliding({"window_start", "channel", "k", "amplitude", "phase_deg"});
    CsvTable steady({"channel", "k", "amplitude", "phase_deg"});
    for (const auto& ch : channels) {
        for (const auto& set : phasor::sliding_phasor_stream(record, ch, f0, m)) {
            for (int k = 1; k <= set.max_order(); ++k) {
                sliding.row().cell(set.window_start).cell(ch).cell(static_cast<std::size_t>(k));
                sliding.cell(set.at(k).amplitude).cell(set.at(k).phase_deg);
            }
        }
        const auto dec = phasor::decompose_waveform(record, ch, f0, m);
        for (int k = 1; k <= dec.phasors.max_order(); ++k) {
            steady.row().cell(ch).cell(static_cast<std::size_t>(k));
            steady.cell(dec.phasors.at(k).amplitude).cell(dec.phasors.at(k).phase_deg);
        }
    }
    sliding.save(g.out_dir() / "phasors.csv");
    steady.save(g.out_dir() / "spectrum.csv");
    std::cout << "analyzed " << channels.size() << " channels into " << g.out_dir().string() << '\n';
    return 0;
}

int cmd_predict(const Globals& g, const std::string& input, const std::string& model_name) {
    const auto scenario = g.load();
    theory::PredictionModel model = theory::PredictionModel::Damped;
    if (model_name == "lossless") {
        model = theory::PredictionModel::Lossless;
    } else if (model_name == "midpoint") {
        model = theory::PredictionModel::LosslessMidpoint;
    }
    const auto record = input.empty() ? run(scenario, g.base_dir()).waveforms : import_waveforms(input);
    const auto segment_start = scenario.settle_time();
    const auto& a = scenario.analysis;
    const auto dec = [&] {
        std::vector<std::string> names{network::kFaultChannel};
        auto sel = record.select(names);
        const auto skip = static_cast<std::size_t>(std::llround((segment_start - sel.t0()) * sel.fs()));
        const auto x = sel.channel(network::kFaultChannel);
        if (skip >= x.size()) {
            fail(ErrorCategory::Range, "record ends before the settling time");
        }
        WaveformRecord tail(sel.fs(), sel.time(skip));
        tail.add_channel(network::kFaultChannel, std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(skip), x.end()));
        return phasor::decompose_waveform(tail, network::kFaultChannel, a.f0, a.m);
    }();
    const auto prediction = theory::predict_feeder_waveforms(dec, scenario.network, model);
    ensure_dir(g.out_dir());
    export_waveforms(prediction, g.out_dir() / "prediction.csv");
    std::cout << "wrote prediction for " << prediction.channel_count() << " channels\n";
    return 0;
}

int cmd_identify(const Globals& g, const std::string& input, std::vector<std::string> feeders, int m, std::size_t k_consec) {
    const auto record = import_waveforms(input);
    if (feeders.empty()) {
        for (const auto& ch : record.channel_names()) {
            if (ch.rfind("i_0_", 0) == 0) {
                feeders.push_back(ch.substr(4));
            }
        }
    }
    if (feeders.size() < 2) {
        fail(ErrorCategory::Configuration, "need at least two feeder channels (i_0_<name>) to identify");
    }
    const double f0 = g.f0_or_default();
    identify::IdentifyOptions options;
    options.thr = g.thr.value_or(options.thr);
    options.k_consec = k_consec;
    std::vector<std::vector<phasor::PhasorSet>> streams;
    for (const auto& f : feeders) {
        streams.push_back(phasor::sliding_phasor_stream(record, network::feeder_channel(f), f0, m));
    }
    const auto result = identify::identify(streams, options);
    ensure_dir(g.out_dir());
    CsvTable table({"window_start", "feeder_a", "feeder_b", "indicator_deg", "valid"});
    for (const auto& w : result.per_window) {
        for (std::size_t i = 0; i < feeders.size(); ++i) {
            for (std::size_t j = i + 1; j < feeders.size(); ++j) {
                table.row().cell(w.window_start).cell(feeders[i]).cell(feeders[j]).cell(w.indicator[i][j]);
                table.cell(std::string(w.valid[i][j] ? "1" : "0"));
            }
        }
    }
    table.save(g.out_dir() / "indicators.csv");
    const std::string verdict = result.aggregated_verdict ? feeders[*result.aggregated_verdict] : "undetermined";
    std::ofstream(g.out_dir() / "verdict.txt", std::ios::binary)
        << "verdict = " << verdict << "\nthr_deg = " << format_number(result.thr) << "\nk_consec = " << result.k_consec
        << "\nwindows = " << result.per_window.size() << '\n';
    std::cout << "verdict: " << verdict << '\n';
    return 0;
}

struct MapArgs {
    double c_n = 0.2;
    std::string method = "proposed";
    double v_min = -0.1;
    double v_max = -0.005;
    double v_step = 0.005;
    double d_min = 0.0;
    double d_max = 0.5;
    double d_step = 0.01;
};

int cmd_map(const Globals& g, const MapArgs& args) {
    const auto method = args.method == "classic" ? identify::MapMethod::Classic : identify::MapMethod::Proposed;
    identify::MapOptions options;
    options.thr = g.thr.value_or(options.thr);
    const auto v = identify::linear_grid(args.v_min, args.v_max, args.v_step);
    const auto d = identify::linear_grid(args.d_min, args.d_max, args.d_step);
    const auto map = identify::effective_area_map(args.c_n, v, d, method, options);
    CsvTable table({"v", "d", "value_deg", "pass", "singular"});
    for (const auto& c : map.cells) {
        table.row().cell(c.v).cell(c.d).cell(c.value).cell(std::string(c.pass ? "1" : "0"));
        table.cell(std::string(c.singular ? "1" : "0"));
    }
    const fs::path path = g.out.empty() ? fs::path("map.csv") : fs::path(g.out);
    if (path.has_parent_path()) {
        ensure_dir(path.parent_path());
    }
    table.save(path);
    std::cout << map.pass_count() << " of " << map.evaluated_count() << " cells pass\n";
    return 0;
}

int cmd_sweep(const Globals& g, unsigned jobs, bool bundles) {
    if (g.scenario.empty()) {
        fail(ErrorCategory::Configuration, "sweep needs --scenario with a [sweep] section");
    }
    auto cfg = ConfigMap::load(g.scenario);
    g.overrides().apply(cfg);
    const auto spec = sweep_from_config(cfg);
    SweepOptions options;
    options.parallelism = jobs;
    options.base_dir = g.base_dir();
    ensure_dir(g.out_dir());
    if (bundles) {
        options.bundle_dir = g.out_dir();
    }
    const auto table = sweep(spec, options);
    table.save(g.out_dir() / "sweep.csv");
    std::size_t failed = 0;
    const auto err = table.column("error");
    for (const auto& r : table.rows) {
        failed += !r[err].empty();
    }
    std::cout << table.rows.size() << " cells, " << failed << " failed\n";
    return 0;
}

int cmd_run(const Globals& g) {
    const auto scenario = g.load();
    const auto bundle = run(scenario, g.base_dir());
    write_bundle(bundle, g.out_dir());
    std::cout << "verdict: " << verdict_name(scenario, bundle.identification.aggregated_verdict)
              << " (configured " << scenario.network.feeders[scenario.network.faulty_index].name << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-impedance fault workbench: zero-sequence simulation, harmonic theory and faulty-feeder identification"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--scenario", g.scenario, "Scenario (or sweep) config file");
    app.add_option("--out", g.out, "Output directory (map: output file)");
    app.add_option("--seed", g.seed, "Random seed for noise");
    app.add_option("--thr", g.thr, "Indicator threshold in degrees (default 40)");
    app.add_option("--f0", g.f0, "Fundamental frequency in Hz (default 50)");
    app.add_option("--fs", g.fs, "Sampling frequency in Hz (default 6400)");

    auto* simulate = app.add_subcommand("simulate", "Simulate the zero-sequence network and write waveforms.csv");

    std::string input;
    std::vector<std::string> channels;
    int m = phasor::kDefaultMaxOrder;
    auto* analyze = app.add_subcommand("analyze", "Harmonic phasors of a waveform file");
    analyze->add_option("--input", input, "Waveform CSV")->required();
    analyze->add_option("--channel", channels, "Channels to analyze (default: all)");
    analyze->add_option("--harmonics", m, "Highest harmonic order");

    std::string model = "damped";
    auto* predict = app.add_subcommand("predict", "Theoretical feeder currents from the fault current");
    predict->add_option("--input", input, "Waveform CSV with an i_0f column (default: simulate the scenario)");
    predict->add_option("--model", model, "damped, lossless or midpoint")
        ->check(CLI::IsMember({"damped", "lossless", "midpoint"}));

    std::vector<std::string> feeders;
    std::size_t k_consec = 5;
    auto* ident = app.add_subcommand("identify", "Identify the faulty feeder from recorded feeder currents");
    ident->add_option("--input", input, "Waveform CSV with i_0_<feeder> columns")->required();
    ident->add_option("--feeders", feeders, "Feeder names (default: every i_0_* column)");
    ident->add_option("--harmonics", m, "Highest harmonic order");
    ident->add_option("--k-consec", k_consec, "Consecutive windows needed to confirm")->check(CLI::PositiveNumber);

    MapArgs map_args;
    auto* map = app.add_subcommand("map", "Effective-area map over detuning and damping");
    map->add_option("--cn", map_args.c_n, "Capacitance share of the faulty feeder")->check(CLI::Range(0.0, 1.0));
    map->add_option("--method", map_args.method, "proposed or classic")->check(CLI::IsMember({"proposed", "classic"}));
    map->add_option("--v-min", map_args.v_min);
    map->add_option("--v-max", map_args.v_max);
    map->add_option("--v-step", map_args.v_step);
    map->add_option("--d-min", map_args.d_min);
    map->add_option("--d-max", map_args.d_max);
    map->add_option("--d-step", map_args.d_step);

    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool bundles = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write sweep.csv");
    sweep_cmd->add_option("--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--bundles", bundles, "Also write a result bundle per cell");

    auto* run_cmd = app.add_subcommand("run", "Simulate, analyze, identify and write a result bundle");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return cmd_simulate(g);
        }
        if (analyze->parsed()) {
            return cmd_analyze(g, input, channels, m);
        }
        if (predict->parsed()) {
            return cmd_predict(g, input, model);
        }
        if (ident->parsed()) {
            return cmd_identify(g, input, feeders, m, k_consec);
        }
        if (map->parsed()) {
            return cmd_map(g, map_args);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(g, jobs, bundles);
        }
        if (run_cmd->parsed()) {
            return cmd_run(g);
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
