#include "hif/network/network.hpp"

#include "hif/core/angles.hpp"
#include "hif/core/error.hpp"
#include "hif/core/rk4.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace hif::network {

namespace {

// Keys cubic convolution kernel, a = -0.5.
[[nodiscard]] double keys_kernel(double x) noexcept {
    x = std::abs(x);
    if (x < 1.0) {
        return (1.5 * x - 2.5) * x * x + 1.0;
    }
    if (x < 2.0) {
        return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
    }
    return 0.0;
}

class CubicSignal {
public:
    // `left_period` > 0 extends the signal before its first sample periodically
    // instead of holding the first value.
    CubicSignal(std::span<const double> samples, double fs, double t0, std::size_t left_period = 0)
        : x_(samples), fs_(fs), t0_(t0), left_period_(left_period <= samples.size() ? left_period : 0) {}

    [[nodiscard]] double operator()(double t) const noexcept {
        const double pos = (t - t0_) * fs_;
        const auto base = static_cast<long long>(std::floor(pos));
        const double frac = pos - static_cast<double>(base);
        if (frac < 1e-12) {
            return at(base);
        }
        double acc = 0.0;
        for (long long j = base - 1; j <= base + 2; ++j) {
            acc += at(j) * keys_kernel(pos - static_cast<double>(j));
        }
        return acc;
    }

private:
    [[nodiscard]] double at(long long j) const noexcept {
        const auto last = static_cast<long long>(x_.size()) - 1;
        if (j < 0 && left_period_ > 0) {
            j += static_cast<long long>(left_period_);
        }
        return x_[static_cast<std::size_t>(std::clamp(j, 0LL, last))];
    }

    std::span<const double> x_;
    double fs_;
    double t0_;
    std::size_t left_period_;
};

constexpr double kStiffRcFraction = 0.5;
constexpr double kMaxLogStep = 0.05;
constexpr double kMaxSubsteps = 4096.0;

using State2 = std::array<double, 2>;
using State3 = std::array<double, 3>;

struct Tank {
    double c_sigma;
    double g_sigma;
    double l;
};

[[nodiscard]] Tank tank_of(const NetworkParameters& p) {
    return {p.total_capacitance(), p.total_conductance(), p.coil_l};
}

// Writes one output row given the state and the fault current at that instant.
class Recorder {
public:
    Recorder(const NetworkParameters& params, std::size_t n, bool with_arc) : params_(params), with_arc_(with_arc) {
        i_f_.resize(n);
        u_.resize(n);
        i_l_.resize(n);
        i_n_.resize(n);
        feeders_.assign(params.size(), std::vector<double>(n));
        if (with_arc) {
            r_arc_.resize(n);
        }
        tank_ = tank_of(params);
        for (std::size_t i = 0; i < params.size(); ++i) {
            g_.push_back(params.feeder_conductance(i));
        }
    }

    void record(std::size_t n, double u, double i_l, double i_f, double r_arc) {
        const double du = (i_f - i_l - u * tank_.g_sigma) / tank_.c_sigma;
        i_f_[n] = i_f;
        u_[n] = u;
        i_l_[n] = i_l;
        i_n_[n] = i_l + u * params_.coil_conductance();
        for (std::size_t i = 0; i < params_.size(); ++i) {
            double value = params_.feeders[i].c0 * du + g_[i] * u;
            if (i == params_.faulty_index) {
                value -= i_f;
            }
            feeders_[i][n] = value;
        }
        if (with_arc_) {
            r_arc_[n] = r_arc;
        }
    }

    [[nodiscard]] WaveformRecord finish(double fs) {
        WaveformRecord out(fs);
        out.add_channel(kFaultChannel, std::move(i_f_));
        out.add_channel(kBusVoltageChannel, std::move(u_));
        out.add_channel(kCoilChannel, std::move(i_l_));
        out.add_channel(kSubstationChannel, std::move(i_n_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            out.add_channel(feeder_channel(params_.feeders[i].name), std::move(feeders_[i]));
        }
        if (with_arc_) {
            out.add_channel(kArcChannel, std::move(r_arc_));
        }
        return out;
    }

private:
    const NetworkParameters& params_;
    bool with_arc_;
    Tank tank_{};
    std::vector<double> g_;
    std::vector<double> i_f_, u_, i_l_, i_n_, r_arc_;
    std::vector<std::vector<double>> feeders_;
};

template <typename Input>
[[nodiscard]] State2 integrate_linear(const Tank& tank, const Input& input, State2 y, double t0, double t1,
                                      std::size_t steps) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    auto rhs = [&](double t, const State2& s) {
        return State2{(input(t) - s[1] - s[0] * tank.g_sigma) / tank.c_sigma, s[0] / tank.l};
    };
    for (std::size_t k = 0; k < steps; ++k) {
        y = rk4_step(rhs, t0 + static_cast<double>(k) * h, y, h);
    }
    return y;
}

// Periodic steady state of the linear tank under a T0-periodic injection:
// x(T) = Phi x0 + x_forced(T) with x(T) = x0.
[[nodiscard]] State2 periodic_initial_state(const Tank& tank, const CubicSignal& input, double t0, double period,
                                            std::size_t steps) {
    auto zero = [](double) { return 0.0; };
    const State2 forced = integrate_linear(tank, input, State2{0.0, 0.0}, t0, t0 + period, steps);
    const State2 col0 = integrate_linear(tank, zero, State2{1.0, 0.0}, t0, t0 + period, steps);
    // Scale the current axis so both columns have comparable magnitude.
    const double i_scale = std::sqrt(tank.c_sigma / tank.l);
    const State2 col1 = integrate_linear(tank, zero, State2{0.0, i_scale}, t0, t0 + period, steps);
    // (I - Phi) x0 = forced, with x0 = [u, i_scale * w].
    const double a = 1.0 - col0[0];
    const double b = -col1[0];
    const double c = -col0[1];
    const double d = i_scale - col1[1];
    const double det = a * d - b * c;
    const double scale = std::max({std::abs(a * d), std::abs(b * c), 1e-300});
    if (std::abs(det) < 1e-12 * scale) {
        fail(ErrorCategory::Singular, "tank is resonant at the fundamental; no periodic steady state exists");
    }
    const double u0 = (forced[0] * d - b * forced[1]) / det;
    const double w0 = (a * forced[1] - c * forced[0]) / det;
    return {u0, w0 * i_scale};
}

void check_singular(const NetworkParameters& params) {
    const double v = detuning_index(params);
    const double d = damping_ratio(params);
    if (std::abs(v) < 1e-12 && d == 0.0) {
        fail(ErrorCategory::Singular,
             "lossless network tuned exactly to resonance (v = 0, d = 0) diverges under a fundamental source");
    }
}

WaveformRecord simulate_injected(const NetworkParameters& params, const InjectedFault& fault,
                                 const SimulationOptions& options, std::size_t n_samples) {
    const WaveformRecord& rec = fault.record;
    const auto samples = rec.channel(fault.channel);
    const bool all_zero = std::all_of(samples.begin(), samples.end(), [](double x) { return x == 0.0; });
    if (!all_zero) {
        check_singular(params);
    }
    const bool periodic = options.initial_state == InitialState::PeriodicSteady && !all_zero;
    const CubicSignal input(samples, rec.fs(), rec.t0(), periodic ? samples_per_cycle(rec.fs(), params.f0) : 0);
    const Tank tank = tank_of(params);
    const double fs = options.fs;
    const double h = 1.0 / (fs * options.oversample);

    State2 y{0.0, 0.0};
    if (periodic) {
        const std::size_t per_cycle = samples_per_cycle(fs, params.f0);
        y = periodic_initial_state(tank, input, 0.0, 1.0 / params.f0, per_cycle * options.oversample);
    }

    auto rhs = [&](double t, const State2& s) {
        return State2{(input(t) - s[1] - s[0] * tank.g_sigma) / tank.c_sigma, s[0] / tank.l};
    };
    Recorder recorder(params, n_samples, false);
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double t = static_cast<double>(n) / fs;
        recorder.record(n, y[0], y[1], input(t), 0.0);
        for (int s = 0; s < options.oversample; ++s) {
            y = rk4_step(rhs, t + s * h, y, h);
        }
    }
    return recorder.finish(fs);
}

WaveformRecord simulate_coupled(const NetworkParameters& params, const CoupledFault& fault,
                                const SimulationOptions& options, std::size_t n_samples) {
    fault.arc.validate();
    if (fault.r_series < 0.0 ||
        std::any_of(fault.series_profile.begin(), fault.series_profile.end(),
                    [](const auto& p) { return !(p.second >= 0.0) || !std::isfinite(p.first); })) {
        fail(ErrorCategory::InvalidInput, "fault series resistance must be non-negative");
    }
    if (options.initial_state == InitialState::PeriodicSteady) {
        fail(ErrorCategory::Configuration, "periodic steady-state start is only available for injected sources");
    }
    check_singular(params);

    const Tank tank = tank_of(params);
    const double fs = options.fs;
    const double h = 1.0 / (fs * options.oversample);
    const double f0 = params.f0;
    const double log_floor = std::log(fault.arc.r_floor);
    const double log_ceiling = std::log(fault.arc.r_ceiling);

    auto fault_current = [&](double t, double u, double r_arc) {
        return (fault.source(t, f0) - u) / (fault.series_resistance(t) + r_arc);
    };
    auto rhs = [&](double t, const State3& s) {
        const double r_arc = std::exp(std::clamp(s[2], log_floor, log_ceiling));
        const double i_f = fault_current(t, s[0], r_arc);
        return State3{(i_f - s[1] - s[0] * tank.g_sigma) / tank.c_sigma, s[0] / tank.l,
                      fault.arc.log_rate(i_f * i_f * r_arc)};
    };

    State3 y{0.0, 0.0, std::log(fault.arc.clamp(fault.arc.r_arc_init))};
    Recorder recorder(params, n_samples, true);
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double t = static_cast<double>(n) / fs;
        const double r_arc = std::exp(y[2]);
        recorder.record(n, y[0], y[1], fault_current(t, y[0], r_arc), r_arc);
        for (int s = 0; s < options.oversample; ++s) {
            const double ts = t + s * h;
            // Subdivide when the fault branch is stiffer than the base step:
            // its RC time constant or the arc's log-rate would make RK4 unstable.
            const double r_arc_now = std::exp(y[2]);
            const double r_path = fault.series_resistance(ts) + r_arc_now;
            const double i_f = fault_current(ts, y[0], r_arc_now);
            const double rate = std::abs(fault.arc.log_rate(i_f * i_f * r_arc_now));
            const double limit = std::min(kStiffRcFraction * r_path * tank.c_sigma, kMaxLogStep / std::max(rate, 1e-300));
            const double wanted = std::ceil(h / limit);
            if (!(wanted <= kMaxSubsteps)) {
                fail(ErrorCategory::Range, "fault branch too stiff at t = " + std::to_string(ts) +
                                               " s (r_arc = " + std::to_string(r_arc_now) +
                                               " Ohm); raise the series resistance or the oversample factor");
            }
            const auto sub = static_cast<int>(std::max(wanted, 1.0));
            const double hs = h / sub;
            for (int j = 0; j < sub; ++j) {
                y = rk4_step(rhs, ts + j * hs, y, hs);
                y[2] = std::clamp(y[2], log_floor, log_ceiling);
            }
        }
    }
    return recorder.finish(fs);
}

}  // namespace

void NetworkParameters::validate() const {
    if (feeders.size() < 2) {
        fail(ErrorCategory::InvalidInput, "network needs at least 2 feeders");
    }
    if (!(f0 > 0.0) || !std::isfinite(f0)) {
        fail(ErrorCategory::InvalidInput, "fundamental frequency must be positive");
    }
    if (!(coil_l > 0.0) || !std::isfinite(coil_l)) {
        fail(ErrorCategory::InvalidInput, "coil inductance must be positive");
    }
    if (coil_r && !(*coil_r > 0.0)) {
        fail(ErrorCategory::InvalidInput, "coil loss resistance must be positive when present");
    }
    for (const auto& f : feeders) {
        if (!(f.c0 > 0.0) || !std::isfinite(f.c0)) {
            fail(ErrorCategory::InvalidInput, "feeder '" + f.name + "' needs a positive capacitance");
        }
        if (f.r0 && !(*f.r0 > 0.0)) {
            fail(ErrorCategory::InvalidInput, "feeder '" + f.name + "' leakage resistance must be positive");
        }
    }
    for (std::size_t i = 0; i < feeders.size(); ++i) {
        for (std::size_t j = i + 1; j < feeders.size(); ++j) {
            if (feeders[i].name == feeders[j].name) {
                fail(ErrorCategory::InvalidInput, "duplicate feeder name '" + feeders[i].name + "'");
            }
        }
    }
    if (faulty_index >= feeders.size()) {
        fail(ErrorCategory::InvalidInput, "faulty feeder index out of range");
    }
}

double NetworkParameters::omega0() const noexcept { return kTwoPi * f0; }

double NetworkParameters::total_capacitance() const noexcept {
    double c = 0.0;
    for (const auto& f : feeders) {
        c += f.c0;
    }
    return c;
}

double NetworkParameters::feeder_conductance(std::size_t i) const noexcept {
    const auto& r0 = feeders[i].r0;
    return r0 ? 1.0 / *r0 : 0.0;
}

double NetworkParameters::coil_conductance() const noexcept { return coil_r ? 1.0 / *coil_r : 0.0; }

double NetworkParameters::total_conductance() const noexcept {
    double g = coil_conductance();
    for (std::size_t i = 0; i < feeders.size(); ++i) {
        g += feeder_conductance(i);
    }
    return g;
}

double NetworkParameters::compensation() const noexcept {
    const double w = omega0();
    return w * w * coil_l * total_capacitance();
}

double NetworkParameters::capacitance_share(std::size_t i) const noexcept {
    return feeders[i].c0 / total_capacitance();
}

double NetworkParameters::feeder_resistance_share(std::size_t i) const noexcept {
    const double g = total_conductance();
    return g > 0.0 ? feeder_conductance(i) / g : 0.0;
}

double NetworkParameters::coil_resistance_share() const noexcept {
    const double g = total_conductance();
    return g > 0.0 ? coil_conductance() / g : 1.0;
}

bool NetworkParameters::in_nominal_band() const noexcept {
    const double v = 1.0 - 1.0 / compensation();
    return v >= -0.1 && v < 0.0;
}

double detuning_index(const NetworkParameters& params) {
    params.validate();
    return 1.0 - 1.0 / params.compensation();
}

double damping_ratio(const NetworkParameters& params) {
    params.validate();
    return params.total_conductance() / (params.omega0() * params.total_capacitance());
}

NetworkParameters make_network(const NetworkTargets& targets) {
    if (targets.names.size() != targets.capacitances.size()) {
        fail(ErrorCategory::InvalidInput, "feeder names and capacitances differ in length");
    }
    if (targets.detuning >= 1.0) {
        fail(ErrorCategory::InvalidInput, "detuning must be below 1");
    }
    if (targets.damping < 0.0) {
        fail(ErrorCategory::InvalidInput, "damping must be non-negative");
    }
    if (targets.coil_share < 0.0 || targets.coil_share > 1.0) {
        fail(ErrorCategory::InvalidInput, "coil damping share must lie in [0, 1]");
    }
    NetworkParameters p;
    p.f0 = targets.f0;
    p.faulty_index = targets.faulty_index;
    double c_sigma = 0.0;
    for (double c : targets.capacitances) {
        c_sigma += c;
    }
    const double w = kTwoPi * targets.f0;
    p.coil_l = 1.0 / (w * w * c_sigma * (1.0 - targets.detuning));
    const double g_total = targets.damping * w * c_sigma;
    const double g_coil = g_total * targets.coil_share;
    const double g_feeders = g_total - g_coil;
    if (g_coil > 0.0) {
        p.coil_r = 1.0 / g_coil;
    }
    for (std::size_t i = 0; i < targets.names.size(); ++i) {
        FeederSpec f{targets.names[i], targets.capacitances[i], std::nullopt};
        const double g = g_feeders * targets.capacitances[i] / c_sigma;
        if (g > 0.0) {
            f.r0 = 1.0 / g;
        }
        p.feeders.push_back(std::move(f));
    }
    p.validate();
    return p;
}

double VirtualSource::operator()(double t, double f0) const noexcept {
    const double wt = kTwoPi * f0 * t;
    double u = amplitude * std::sin(wt + phase_rad);
    for (const auto& h : harmonics) {
        u += h.amplitude * std::sin(h.order * wt + h.phase_rad);
    }
    return u;
}

double CoupledFault::series_resistance(double t) const noexcept {
    if (series_profile.empty()) {
        return r_series;
    }
    if (t <= series_profile.front().first) {
        return series_profile.front().second;
    }
    for (std::size_t k = 1; k < series_profile.size(); ++k) {
        const auto [t1, r1] = series_profile[k];
        if (t <= t1) {
            const auto [ta, ra] = series_profile[k - 1];
            const double span = t1 - ta;
            return span > 0.0 ? ra + (r1 - ra) * (t - ta) / span : r1;
        }
    }
    return series_profile.back().second;
}

std::string feeder_channel(const std::string& feeder_name) { return "i_0_" + feeder_name; }

WaveformRecord simulate_zero_sequence(const NetworkParameters& params, const FaultSource& source,
                                      const SimulationOptions& options) {
    params.validate();
    static_cast<void>(samples_per_cycle(options.fs, params.f0));
    if (!(options.duration > 0.0)) {
        fail(ErrorCategory::Configuration, "simulation duration must be positive");
    }
    if (options.oversample < 1) {
        fail(ErrorCategory::Configuration, "oversample must be >= 1");
    }
    const auto n_samples = static_cast<std::size_t>(std::llround(options.duration * options.fs));
    if (const auto* injected = std::get_if<InjectedFault>(&source)) {
        return simulate_injected(params, *injected, options, n_samples);
    }
    return simulate_coupled(params, std::get<CoupledFault>(source), options, n_samples);
}

double settling_time(const NetworkParameters& params, const FaultSource& source, double min_cycles) {
    params.validate();
    double g = params.total_conductance();
    if (const auto* coupled = std::get_if<CoupledFault>(&source)) {
        double r_path = coupled->r_series;
        for (const auto& [t, r] : coupled->series_profile) {
            r_path = std::max(r_path, r);
        }
        g += 1.0 / (r_path + coupled->arc.r_arc_init);
    }
    const double floor = min_cycles / params.f0;
    if (g <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double time_constant = params.total_capacitance() / g;
    return std::max(floor, 5.0 * time_constant);
}

}  // namespace hif::network
