#include "hif/workbench/scenario.hpp"

#include "hif/core/angles.hpp"
#include "hif/core/error.hpp"
#include "hif/workbench/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hif::workbench {

namespace {

const std::vector<std::string> kDefaultNames = {"f1", "f2", "f3", "f4"};
const std::vector<double> kDefaultWeights = {13.3, 10.8, 10.8, 24.7};

const char* init_name(network::InitialState s) {
    return s == network::InitialState::Zero ? "zero" : "periodic";
}

std::string feeder_key(const std::string& name, const char* field) {
    return "network.feeder." + name + "." + field;
}

void require_absent(ConfigReader& r, const std::string& key, const std::string& reason) {
    if (r.has(key)) {
        r.reject(key, reason);
    }
}

[[noreturn]] void missing(const ConfigMap& cfg, const std::string& key) {
    fail(ErrorCategory::Parse, cfg.source() + ": key '" + key + "': required but missing");
}

network::NetworkParameters read_network(ConfigReader& r) {
    const auto& cfg = r.map();
    const double f0 = r.number_or("network.f0", 50.0);

    std::vector<std::string> names;
    if (auto listed = r.list("network.feeders")) {
        names = std::move(*listed);
    } else if (auto found = cfg.children("network.feeder"); !found.empty()) {
        names = std::move(found);
    } else {
        names = kDefaultNames;
    }
    for (const auto& child : cfg.children("network.feeder")) {
        if (std::find(names.begin(), names.end(), child) == names.end()) {
            const auto prefix = "network.feeder." + child + ".";
            for (const auto& e : cfg.entries()) {
                if (e.key.rfind(prefix, 0) == 0) {
                    r.reject(e.key, "feeder '" + child + "' is not listed in network.feeders");
                }
            }
        }
    }

    std::size_t faulty = 0;
    if (auto name = r.text("network.faulty")) {
        const auto it = std::find(names.begin(), names.end(), *name);
        if (it == names.end()) {
            r.reject("network.faulty", "unknown feeder '" + *name + "'");
        }
        faulty = static_cast<std::size_t>(it - names.begin());
    }

    if (r.has("network.coil_l")) {
        for (const char* key : {"network.detuning", "network.damping", "network.coil_share",
                                "network.total_capacitance"}) {
            require_absent(r, key, "cannot be combined with network.coil_l");
        }
        network::NetworkParameters p;
        p.f0 = f0;
        p.coil_l = *r.number("network.coil_l");
        p.coil_r = r.number("network.coil_r");
        p.faulty_index = faulty;
        for (const auto& n : names) {
            require_absent(r, feeder_key(n, "share"), "shares need target mode (omit network.coil_l)");
            const auto c0 = r.number(feeder_key(n, "c0"));
            if (!c0) {
                missing(cfg, feeder_key(n, "c0"));
            }
            p.feeders.push_back({n, *c0, r.number(feeder_key(n, "r0"))});
        }
        p.validate();
        return p;
    }

    require_absent(r, "network.coil_r", "requires network.coil_l");
    network::NetworkTargets t;
    t.f0 = f0;
    t.names = names;
    t.detuning = r.number_or("network.detuning", -0.05);
    t.damping = r.number_or("network.damping", kDefaultDamping);
    t.coil_share = r.number_or("network.coil_share", kDefaultCoilShare);
    t.faulty_index = faulty;

    std::size_t with_c0 = 0;
    std::size_t with_share = 0;
    for (const auto& n : names) {
        require_absent(r, feeder_key(n, "r0"), "leakage comes from network.damping in target mode");
        with_c0 += cfg.has(feeder_key(n, "c0"));
        with_share += cfg.has(feeder_key(n, "share"));
    }
    if (with_c0 > 0) {
        require_absent(r, "network.total_capacitance", "cannot be combined with per-feeder c0");
        for (const auto& n : names) {
            const auto c0 = r.number(feeder_key(n, "c0"));
            if (!c0) {
                missing(cfg, feeder_key(n, "c0"));
            }
            require_absent(r, feeder_key(n, "share"), "cannot be combined with per-feeder c0");
            t.capacitances.push_back(*c0);
        }
    } else {
        std::vector<double> weights;
        if (with_share > 0) {
            for (const auto& n : names) {
                const auto w = r.number(feeder_key(n, "share"));
                if (!w) {
                    missing(cfg, feeder_key(n, "share"));
                }
                if (!(*w > 0.0)) {
                    r.reject(feeder_key(n, "share"), "must be positive");
                }
                weights.push_back(*w);
            }
        } else if (names == kDefaultNames) {
            weights = kDefaultWeights;
        } else {
            weights.assign(names.size(), 1.0);
        }
        const double total = r.number_or("network.total_capacitance", kDefaultTotalCapacitance);
        const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double w : weights) {
            t.capacitances.push_back(total * w / sum);
        }
    }
    return network::make_network(t);
}

SourceSettings read_source(ConfigReader& r) {
    SourceSettings s;
    if (auto type = r.text("source.type")) {
        if (*type == "coupled") {
            s.kind = SourceKind::Coupled;
        } else if (*type == "injected") {
            s.kind = SourceKind::Injected;
        } else {
            r.reject("source.type", "expected 'coupled' or 'injected', got '" + *type + "'");
        }
    }
    s.amplitude = r.number_or("source.amplitude", s.amplitude);
    s.phase_deg = r.number_or("source.phase_deg", s.phase_deg);
    s.r_series = r.number_or("source.r_series", s.r_series);
    if (auto profile = r.list("source.profile")) {
        for (const auto& point : *profile) {
            const auto colon = point.find(':');
            if (colon == std::string::npos) {
                r.reject("source.profile", "expected 't:r' pairs, got '" + point + "'");
            }
            ConfigMap tmp;
            tmp.set("t", point.substr(0, colon));
            tmp.set("r", point.substr(colon + 1));
            ConfigReader pr(tmp);
            try {
                s.series_profile.emplace_back(*pr.number("t"), *pr.number("r"));
            } catch (const Error&) {
                r.reject("source.profile", "expected numeric 't:r' pairs, got '" + point + "'");
            }
        }
    }
    for (const auto& order : r.map().children("source.harmonic")) {
        ConfigMap tmp;
        tmp.set("k", order);
        ConfigReader kr(tmp);
        SourceHarmonic h;
        const auto base = "source.harmonic." + order;
        try {
            h.order = static_cast<int>(*kr.integer("k"));
        } catch (const Error&) {
            r.reject(base + ".amplitude", "harmonic order must be an integer");
        }
        if (h.order < 2) {
            r.reject(base + ".amplitude", "harmonic order must be at least 2");
        }
        const auto amp = r.number(base + ".amplitude");
        if (!amp) {
            missing(r.map(), base + ".amplitude");
        }
        h.amplitude = *amp;
        h.phase_deg = r.number_or(base + ".phase_deg", 0.0);
        s.harmonics.push_back(h);
    }
    s.arc.p_loss = r.number_or("source.arc.p_loss", s.arc.p_loss);
    s.arc.tau = r.number_or("source.arc.tau", s.arc.tau);
    s.arc.r_arc_init = r.number_or("source.arc.r_arc_init", s.arc.r_arc_init);
    s.arc.r_floor = r.number_or("source.arc.r_floor", s.arc.r_floor);
    s.arc.r_ceiling = r.number_or("source.arc.r_ceiling", s.arc.r_ceiling);
    if (auto file = r.text("source.file")) {
        s.injected_file = *file;
    }
    if (auto channel = r.text("source.channel")) {
        s.injected_channel = *channel;
    }
    return s;
}

SimSettings read_sim(ConfigReader& r) {
    SimSettings s;
    s.duration = r.number_or("sim.duration", s.duration);
    s.fs = r.number_or("sim.fs", s.fs);
    s.settle_cycles = r.number_or("sim.settle_cycles", s.settle_cycles);
    s.noise_std = r.number("sim.noise_std");
    if (auto o = r.integer("sim.oversample")) {
        s.oversample = static_cast<int>(*o);
    }
    if (auto init = r.text("sim.init")) {
        if (*init == "zero") {
            s.initial_state = network::InitialState::Zero;
        } else if (*init == "periodic") {
            s.initial_state = network::InitialState::PeriodicSteady;
        } else {
            r.reject("sim.init", "expected 'zero' or 'periodic', got '" + *init + "'");
        }
    }
    return s;
}

AnalysisSettings read_analysis(ConfigReader& r, double network_f0) {
    AnalysisSettings a;
    a.f0 = r.number_or("analysis.f0", network_f0);
    if (auto m = r.integer("analysis.m")) {
        a.m = static_cast<int>(*m);
    }
    a.identify.thr = r.number_or("analysis.thr", a.identify.thr);
    a.identify.gate.relative = r.number_or("analysis.gate.relative", a.identify.gate.relative);
    a.identify.gate.absolute = r.number_or("analysis.gate.absolute", a.identify.gate.absolute);
    if (auto k = r.integer("analysis.k_consec")) {
        if (*k < 1) {
            r.reject("analysis.k_consec", "must be at least 1");
        }
        a.identify.k_consec = static_cast<std::size_t>(*k);
    }
    if (auto order = r.integer("analysis.order")) {
        a.identify.order = static_cast<int>(*order);
    }
    a.c_n = r.number("analysis.c_n");
    return a;
}

}  // namespace

Scenario default_scenario() {
    Scenario s;
    s.name = "default";
    network::NetworkTargets t;
    t.names = kDefaultNames;
    const double sum = std::accumulate(kDefaultWeights.begin(), kDefaultWeights.end(), 0.0);
    for (double w : kDefaultWeights) {
        t.capacitances.push_back(kDefaultTotalCapacitance * w / sum);
    }
    t.coil_share = kDefaultCoilShare;
    t.damping = kDefaultDamping;
    s.network = network::make_network(t);
    return s;
}

std::vector<std::string> Scenario::feeder_names() const {
    std::vector<std::string> out;
    for (const auto& f : network.feeders) {
        out.push_back(f.name);
    }
    return out;
}

void Scenario::validate() const {
    network.validate();
    if (analysis.f0 != network.f0) {
        fail(ErrorCategory::Configuration, "analysis.f0 (" + format_number(analysis.f0) +
                                               ") differs from network.f0 (" + format_number(network.f0) + ")");
    }
    if (!(sim.fs > 0.0) || !(sim.duration > 0.0)) {
        fail(ErrorCategory::Configuration, "sim.fs and sim.duration must be positive");
    }
    const double ratio = sim.fs / analysis.f0;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio || static_cast<long long>(rounded) % 2 != 0) {
        fail(ErrorCategory::Configuration,
             "fs/f0 = " + format_number(ratio) +
                 " must be an even integer so that phasor windows synchronize to half cycles");
    }
    const auto n = static_cast<int>(rounded);
    if (analysis.m < analysis.identify.order || analysis.m > n / 2 - 1) {
        fail(ErrorCategory::Configuration, "analysis.m must lie in [" + std::to_string(analysis.identify.order) +
                                               ", " + std::to_string(n / 2 - 1) + "]");
    }
    if (sim.oversample < 1) {
        fail(ErrorCategory::Configuration, "sim.oversample must be at least 1");
    }
    if (!(sim.settle_cycles >= 0.0) || settle_time() + 1.0 / analysis.f0 > sim.duration) {
        fail(ErrorCategory::Configuration, "sim.settle_cycles must leave at least one full cycle of record");
    }
    if (sim.noise_std) {
        if (!(*sim.noise_std >= 0.0)) {
            fail(ErrorCategory::Configuration, "sim.noise_std must be non-negative");
        }
        if (!seed) {
            fail(ErrorCategory::Configuration, "sim.noise_std requires scenario.seed for reproducibility");
        }
    }
    const auto& id = analysis.identify;
    if (!(id.thr > 0.0 && id.thr <= 180.0)) {
        fail(ErrorCategory::Configuration, "analysis.thr must lie in (0, 180]");
    }
    if (!(id.gate.relative >= 0.0) || !(id.gate.absolute >= 0.0)) {
        fail(ErrorCategory::Configuration, "amplitude gate thresholds must be non-negative");
    }
    if (id.order < 1 || id.k_consec < 1) {
        fail(ErrorCategory::Configuration, "analysis.order and analysis.k_consec must be at least 1");
    }
    if (analysis.c_n && !(*analysis.c_n > 0.0 && *analysis.c_n < 1.0)) {
        fail(ErrorCategory::Configuration, "analysis.c_n must lie in (0, 1)");
    }
    if (source.kind == SourceKind::Coupled) {
        source.arc.validate();
        if (!(source.amplitude >= 0.0) || !(source.r_series >= 0.0)) {
            fail(ErrorCategory::Configuration, "source.amplitude and source.r_series must be non-negative");
        }
        for (const auto& [t, r] : source.series_profile) {
            if (!(r >= 0.0) || !std::isfinite(t)) {
                fail(ErrorCategory::Configuration, "source.profile entries need finite times and r >= 0");
            }
        }
        if (!std::is_sorted(source.series_profile.begin(), source.series_profile.end(),
                            [](const auto& a, const auto& b) { return a.first < b.first; })) {
            fail(ErrorCategory::Configuration, "source.profile times must be increasing");
        }
    } else if (source.injected_file.empty()) {
        fail(ErrorCategory::Configuration, "source.file is required for an injected source");
    }
}

network::FaultSource build_fault_source(const Scenario& scenario, const std::filesystem::path& base_dir) {
    const auto& s = scenario.source;
    if (s.kind == SourceKind::Injected) {
        std::filesystem::path file = s.injected_file;
        if (file.is_relative() && !base_dir.empty()) {
            file = base_dir / file;
        }
        return network::InjectedFault{import_waveforms(file), s.injected_channel};
    }
    network::CoupledFault fault;
    fault.source.amplitude = s.amplitude;
    fault.source.phase_rad = deg_to_rad(s.phase_deg);
    for (const auto& h : s.harmonics) {
        fault.source.harmonics.push_back({h.order, h.amplitude, deg_to_rad(h.phase_deg)});
    }
    fault.r_series = s.r_series;
    fault.series_profile = s.series_profile;
    fault.arc = s.arc;
    return fault;
}

Scenario scenario_from_config(const ConfigMap& config) {
    ConfigReader r(config);
    Scenario s;
    s.name = r.text("scenario.name").value_or("scenario");
    if (auto seed = r.integer("scenario.seed")) {
        if (*seed < 0) {
            r.reject("scenario.seed", "must be non-negative");
        }
        s.seed = static_cast<std::uint64_t>(*seed);
    }
    s.network = read_network(r);
    s.source = read_source(r);
    s.sim = read_sim(r);
    s.analysis = read_analysis(r, s.network.f0);
    r.check_all_used();
    s.validate();
    return s;
}

ConfigMap scenario_to_config(const Scenario& s) {
    ConfigMap c;
    c.set("scenario.name", s.name);
    if (s.seed) {
        c.set("scenario.seed", std::to_string(*s.seed));
    }

    const auto& net = s.network;
    std::string names;
    for (const auto& f : net.feeders) {
        names += (names.empty() ? "" : ", ") + f.name;
    }
    c.set("network.f0", format_number(net.f0));
    c.set("network.feeders", names);
    c.set("network.faulty", net.feeders.at(net.faulty_index).name);
    c.set("network.coil_l", format_number(net.coil_l));
    if (net.coil_r) {
        c.set("network.coil_r", format_number(*net.coil_r));
    }
    for (const auto& f : net.feeders) {
        c.set(feeder_key(f.name, "c0"), format_number(f.c0));
        if (f.r0) {
            c.set(feeder_key(f.name, "r0"), format_number(*f.r0));
        }
    }

    const auto& src = s.source;
    if (src.kind == SourceKind::Injected) {
        c.set("source.type", "injected");
        c.set("source.file", src.injected_file);
        c.set("source.channel", src.injected_channel);
    } else {
        c.set("source.type", "coupled");
        c.set("source.amplitude", format_number(src.amplitude));
        c.set("source.phase_deg", format_number(src.phase_deg));
        c.set("source.r_series", format_number(src.r_series));
        if (!src.series_profile.empty()) {
            std::string profile;
            for (const auto& [t, r] : src.series_profile) {
                profile += (profile.empty() ? "" : ", ") + format_number(t) + ":" + format_number(r);
            }
            c.set("source.profile", profile);
        }
        for (const auto& h : src.harmonics) {
            const auto base = "source.harmonic." + std::to_string(h.order);
            c.set(base + ".amplitude", format_number(h.amplitude));
            c.set(base + ".phase_deg", format_number(h.phase_deg));
        }
        c.set("source.arc.p_loss", format_number(src.arc.p_loss));
        c.set("source.arc.tau", format_number(src.arc.tau));
        c.set("source.arc.r_arc_init", format_number(src.arc.r_arc_init));
        c.set("source.arc.r_floor", format_number(src.arc.r_floor));
        c.set("source.arc.r_ceiling", format_number(src.arc.r_ceiling));
    }

    c.set("sim.duration", format_number(s.sim.duration));
    c.set("sim.fs", format_number(s.sim.fs));
    c.set("sim.settle_cycles", format_number(s.sim.settle_cycles));
    if (s.sim.noise_std) {
        c.set("sim.noise_std", format_number(*s.sim.noise_std));
    }
    c.set("sim.oversample", std::to_string(s.sim.oversample));
    c.set("sim.init", init_name(s.sim.initial_state));

    const auto& a = s.analysis;
    c.set("analysis.f0", format_number(a.f0));
    c.set("analysis.m", std::to_string(a.m));
    c.set("analysis.thr", format_number(a.identify.thr));
    c.set("analysis.gate.relative", format_number(a.identify.gate.relative));
    c.set("analysis.gate.absolute", format_number(a.identify.gate.absolute));
    c.set("analysis.k_consec", std::to_string(a.identify.k_consec));
    c.set("analysis.order", std::to_string(a.identify.order));
    if (a.c_n) {
        c.set("analysis.c_n", format_number(*a.c_n));
    }
    return c;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_config(ConfigMap::load(path)); }

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    scenario_to_config(scenario).save(path);
}

void Overrides::apply(ConfigMap& config) const {
    if (seed) {
        config.set("scenario.seed", std::to_string(*seed));
    }
    if (thr) {
        config.set("analysis.thr", format_number(*thr));
    }
    if (f0) {
        config.set("network.f0", format_number(*f0));
        if (config.has("analysis.f0")) {
            config.set("analysis.f0", format_number(*f0));
        }
    }
    if (fs) {
        config.set("sim.fs", format_number(*fs));
    }
}

std::uint64_t fnv1a64(std::string_view data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hif::workbench
