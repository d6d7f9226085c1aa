#include "hif/workbench/run.hpp"

#include "hif/core/error.hpp"
#include "hif/workbench/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace hif::workbench {

namespace {

WaveformRecord tail(const WaveformRecord& record, double from) {
    const double offset = std::max(0.0, (from - record.t0()) * record.fs());
    const auto start = std::min(record.size(), static_cast<std::size_t>(std::llround(offset)));
    WaveformRecord out(record.fs(), record.time(start));
    for (const auto& name : record.channel_names()) {
        const auto x = record.channel(name);
        out.add_channel(name, std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(start), x.end()));
    }
    return out;
}

void add_noise(WaveformRecord& record, double std_dev, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std_dev);
    for (const auto& name : record.channel_names()) {
        if (name.rfind("i_", 0) != 0) {
            continue;
        }
        for (double& x : record.channel_mut(name)) {
            x += noise(rng);
        }
    }
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

void estimate_and_predict(RunBundle& b) {
    const auto& s = b.scenario;
    const auto& net = s.network;
    const auto& rec = b.waveforms;
    const double f0 = s.analysis.f0;
    const int m = s.analysis.m;
    const auto names = s.feeder_names();

    const std::string fault_channel = network::kFaultChannel;
    for (const std::string ch : {network::kBusVoltageChannel, network::kSubstationChannel}) {
        if (!rec.has_channel(ch)) {
            b.estimate_error = "record has no '" + ch + "' channel";
            return;
        }
    }
    const double settle = s.settle_time();
    const auto segment = tail(rec, settle);
    const auto steady = [&](const std::string& ch) { return phasor::decompose_waveform(segment, ch, f0, m).phasors; };

    theory::EstimationInput input;
    input.u_0b = steady(network::kBusVoltageChannel);
    input.substation = steady(network::kSubstationChannel);
    input.faulty = steady(network::feeder_channel(names[net.faulty_index]));
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i != net.faulty_index) {
            input.healthy.push_back(steady(network::feeder_channel(names[i])));
        }
    }
    if (rec.has_channel(fault_channel)) {
        input.fault = steady(fault_channel);
    }
    const double c_n = s.analysis.c_n.value_or(net.capacitance_share(net.faulty_index));
    try {
        b.estimate = theory::estimate_network_parameters(input, c_n);
    } catch (const Error& e) {
        if (e.category() != ErrorCategory::Estimation && e.category() != ErrorCategory::Singular) {
            throw;
        }
        b.estimate_error = e.what();
        return;
    }
    if (!rec.has_channel(fault_channel)) {
        return;
    }
    const auto dec = phasor::decompose_waveform(segment, fault_channel, f0, m);
    try {
        b.prediction = theory::predict_feeder_waveforms(dec, b.estimate->to_transfer(names, net.faulty_index, f0));
    } catch (const Error& e) {
        if (e.category() != ErrorCategory::Singular) {
            throw;
        }
        b.estimate_error = std::string("prediction: ") + e.what();
    }
}

}  // namespace

phasor::PhasorSet steady_phasors(const WaveformRecord& record, const std::string& channel, double settle_time,
                                 double f0, int m) {
    return phasor::decompose_waveform(tail(record, settle_time), channel, f0, m).phasors;
}

std::string verdict_name(const Scenario& scenario, const identify::Verdict& verdict) {
    return verdict ? scenario.network.feeders.at(*verdict).name : "undetermined";
}

bool RunBundle::correct() const noexcept {
    return identification.aggregated_verdict && *identification.aggregated_verdict == scenario.network.faulty_index;
}

bool RunBundle::gate_passed() const noexcept {
    const auto& w = identification.per_window;
    const auto k = scenario.analysis.identify.k_consec;
    if (w.size() < k) {
        return false;
    }
    for (auto it = w.end() - static_cast<std::ptrdiff_t>(k); it != w.end(); ++it) {
        for (std::size_t a = 0; a < it->valid.size(); ++a) {
            for (std::size_t c = 0; c < it->valid.size(); ++c) {
                if (a != c && !it->valid[a][c]) {
                    return false;
                }
            }
        }
    }
    return true;
}

std::size_t RunBundle::misranked_classic_windows() const noexcept {
    const auto faulty = scenario.network.faulty_index;
    return static_cast<std::size_t>(std::count_if(classic.begin(), classic.end(), [&](const ClassicWindow& w) {
        return !w.verdict || *w.verdict != faulty;
    }));
}

RunBundle analyze_record(const Scenario& scenario, WaveformRecord record) {
    RunBundle b;
    b.scenario = scenario;
    b.waveforms = std::move(record);
    const auto& a = scenario.analysis;
    const auto names = scenario.feeder_names();

    std::vector<std::vector<phasor::PhasorSet>> feeder_windows;
    for (const auto& n : names) {
        const auto ch = network::feeder_channel(n);
        b.streams.push_back({ch, phasor::sliding_phasor_stream(b.waveforms, ch, a.f0, a.m)});
        feeder_windows.push_back(b.streams.back().windows);
    }
    for (const std::string ch : {network::kSubstationChannel, network::kBusVoltageChannel, network::kFaultChannel}) {
        if (b.waveforms.has_channel(ch)) {
            b.streams.push_back({ch, phasor::sliding_phasor_stream(b.waveforms, ch, a.f0, a.m)});
        }
    }
    b.identification = identify::identify(feeder_windows, a.identify);

    const int k = a.identify.order;
    for (std::size_t j = 0; j < feeder_windows.front().size(); ++j) {
        ClassicWindow w;
        w.window_start = feeder_windows.front()[j].window_start;
        std::size_t hits = 0;
        for (std::size_t f = 0; f < names.size(); ++f) {
            const auto& set = feeder_windows[f][j];
            w.delta_phi.push_back(identify::classic_delta_phi(set));
            w.gated.push_back(a.identify.gate.passes(set, k));
            if (w.gated.back() && identify::classic_criterion(w.delta_phi.back(), a.identify.thr)) {
                ++hits;
                w.verdict = f;
            }
        }
        if (hits != 1) {
            w.verdict.reset();
        }
        b.classic.push_back(std::move(w));
    }

    estimate_and_predict(b);
    return b;
}

RunBundle run(const Scenario& scenario, const std::filesystem::path& base_dir) {
    try {
        scenario.validate();
        const auto source = build_fault_source(scenario, base_dir);
        network::SimulationOptions options;
        options.duration = scenario.sim.duration;
        options.fs = scenario.sim.fs;
        options.oversample = scenario.sim.oversample;
        options.initial_state = scenario.sim.initial_state;
        auto record = network::simulate_zero_sequence(scenario.network, source, options);
        if (scenario.sim.noise_std && *scenario.sim.noise_std > 0.0) {
            add_noise(record, *scenario.sim.noise_std, *scenario.seed);
        }
        return analyze_record(scenario, std::move(record));
    } catch (const Error& e) {
        throw Error(e.category(), "scenario '" + scenario.name + "': " + e.what());
    }
}

void write_bundle(const RunBundle& b, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        fail(ErrorCategory::Io, "cannot create output directory '" + out_dir.string() + "': " + ec.message());
    }
    const auto& s = b.scenario;
    const auto names = s.feeder_names();

    export_waveforms(b.waveforms, out_dir / "waveforms.csv");

    CsvTable phasors({"window_start", "channel", "k", "amplitude", "phase_deg"});
    for (const auto& stream : b.streams) {
        for (const auto& set : stream.windows) {
            for (int k = 1; k <= set.max_order(); ++k) {
                phasors.row()
                    .cell(set.window_start)
                    .cell(stream.channel)
                    .cell(static_cast<std::size_t>(k))
                    .cell(set.at(k).amplitude)
                    .cell(set.at(k).phase_deg);
            }
        }
    }
    phasors.save(out_dir / "phasors.csv");

    CsvTable indicators({"window_start", "feeder_a", "feeder_b", "indicator_deg", "valid"});
    for (const auto& w : b.identification.per_window) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            for (std::size_t j = i + 1; j < names.size(); ++j) {
                indicators.row()
                    .cell(w.window_start)
                    .cell(names[i])
                    .cell(names[j])
                    .cell(w.indicator[i][j])
                    .cell(std::string(w.valid[i][j] ? "1" : "0"));
            }
        }
    }
    indicators.save(out_dir / "indicators.csv");

    CsvTable classic({"window_start", "feeder", "delta_phi_deg", "gated", "criterion"});
    for (const auto& w : b.classic) {
        for (std::size_t f = 0; f < names.size(); ++f) {
            classic.row()
                .cell(w.window_start)
                .cell(names[f])
                .cell(w.delta_phi[f])
                .cell(std::string(w.gated[f] ? "1" : "0"))
                .cell(std::string(identify::classic_criterion(w.delta_phi[f], s.analysis.identify.thr) ? "1" : "0"));
        }
    }
    classic.save(out_dir / "classic.csv");

    if (b.prediction.size() > 0) {
        export_waveforms(b.prediction, out_dir / "prediction.csv");
    }

    const auto& id = b.identification;
    const auto determined = std::count_if(id.per_window.begin(), id.per_window.end(),
                                          [](const identify::WindowResult& w) { return w.verdict.has_value(); });
    std::ofstream verdict(out_dir / "verdict.txt", std::ios::binary);
    verdict << "verdict = " << verdict_name(s, id.aggregated_verdict) << '\n'
            << "configured_faulty = " << names[s.network.faulty_index] << '\n'
            << "correct = " << (b.correct() ? "true" : "false") << '\n'
            << "gate_passed = " << (b.gate_passed() ? "true" : "false") << '\n'
            << "thr_deg = " << format_number(id.thr) << '\n'
            << "k_consec = " << id.k_consec << '\n'
            << "windows = " << id.per_window.size() << '\n'
            << "windows_determined = " << determined << '\n'
            << "classic_misranked_windows = " << b.misranked_classic_windows() << '\n';
    if (b.estimate) {
        verdict << "estimated_v = " << format_number(b.estimate->v) << '\n'
                << "estimated_d = " << format_number(b.estimate->d) << '\n';
    } else if (!b.estimate_error.empty()) {
        verdict << "estimate_error = " << b.estimate_error << '\n';
    }
    if (!verdict) {
        fail(ErrorCategory::Io, "cannot write verdict.txt in '" + out_dir.string() + "'");
    }

    const auto canonical = scenario_to_config(s).serialize();
    std::ofstream(out_dir / "scenario.cfg", std::ios::binary) << canonical;
    std::ofstream manifest(out_dir / "manifest", std::ios::binary);
    manifest << "format = " << kBundleFormat << '\n'
             << "scenario = " << s.name << '\n'
             << "scenario_hash = fnv1a64:" << hex64(fnv1a64(canonical)) << '\n'
             << "seed = " << (s.seed ? std::to_string(*s.seed) : std::string("none")) << '\n';
    for (const char* module : {"arc", "network", "phasor", "theory", "identify", "workbench"}) {
        manifest << "version." << module << " = " << kModuleVersion << '\n';
    }
    for (const char* file : {"waveforms.csv", "phasors.csv", "indicators.csv", "classic.csv", "verdict.txt",
                             "scenario.cfg"}) {
        manifest << "file = " << file << '\n';
    }
    if (b.prediction.size() > 0) {
        manifest << "file = prediction.csv\n";
    }
    manifest << "\n# resolved scenario\n" << canonical;
    if (!manifest) {
        fail(ErrorCategory::Io, "cannot write manifest in '" + out_dir.string() + "'");
    }
}

}  // namespace hif::workbench
