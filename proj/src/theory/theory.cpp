#include "hif/theory/theory.hpp"

#include "hif/core/angles.hpp"
#include "hif/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace hif::theory {

namespace {

// arctan(y/x) for x > 0 and 180 + arctan(y/x) for x <= 0, in degrees, with
// the x = 0 limit taken from either side.
[[nodiscard]] double branch_angle_deg(double y, double x) noexcept {
    if (x == 0.0) {
        if (y == 0.0) {
            return 0.0;
        }
        return y > 0.0 ? 90.0 : -90.0;
    }
    const double base = rad_to_deg(std::atan(y / x));
    return x > 0.0 ? base : 180.0 + base;
}

[[nodiscard]] HarmonicTransfer from_signed(FeederRole role, int k, double value) noexcept {
    return {role, k, std::abs(value), value < 0.0 ? 180.0 : 0.0};
}

void check_k(int k) {
    if (k < 1) {
        fail(ErrorCategory::InvalidInput, "harmonic order must be >= 1");
    }
}

[[nodiscard]] double compensation_of(double v) {
    if (!(v < 1.0)) {
        fail(ErrorCategory::InvalidInput, "detuning index must be below 1");
    }
    return 1.0 / (1.0 - v);
}

}  // namespace

const char* to_string(FeederRole role) noexcept {
    switch (role) {
    case FeederRole::Faulty:
        return "faulty";
    case FeederRole::Healthy:
        return "healthy";
    case FeederRole::Substation:
        return "substation";
    }
    return "unknown";
}

phasor::Phasor HarmonicTransfer::apply(const phasor::Phasor& fault) const noexcept {
    return {gain * fault.amplitude, wrap_deg(fault.phase_deg + rotation_deg)};
}

double harmonic_gain_factor(int k, double s) {
    check_k(k);
    if (!(s > 0.0)) {
        fail(ErrorCategory::InvalidInput, "compensation degree s must be positive");
    }
    const double k2 = static_cast<double>(k) * k;
    const double den = 1.0 - k2 * s;
    if (std::abs(den) < 1e-12) {
        fail(ErrorCategory::Singular, "harmonic gain factor has a pole at k^2 s = 1");
    }
    return (1.0 - k2) / den;
}

double harmonic_gain_lower(double s) { return 1.0 / s; }

double harmonic_gain_upper(double s) { return harmonic_gain_factor(2, s); }

double harmonic_gain_midpoint(double s) { return 0.5 * (harmonic_gain_lower(s) + harmonic_gain_upper(s)); }

LosslessCoefficients lossless_coefficients(double v, int k, double c_n, double c_i, GainFactorMode mode) {
    check_k(k);
    const double s = compensation_of(v);
    double g = 0.0;
    if (k >= 2) {
        g = mode == GainFactorMode::Exact ? harmonic_gain_factor(k, s) : harmonic_gain_midpoint(s);
    }
    return {c_n - v, c_n * g, c_i, c_i * g, 1.0 - v, g, g};
}

double superposition_threshold(double v, int k) {
    check_k(k);
    return 1.0 - (1.0 - v) / (static_cast<double>(k) * k);
}

HarmonicTransfer lossless_transfer(double v, int k, FeederRole role, double c, GainFactorMode mode) {
    if (v == 0.0) {
        fail(ErrorCategory::Singular, "lossless transfer is singular at v = 0 (exact resonance)");
    }
    const LosslessCoefficients p = lossless_coefficients(v, k, c, c, mode);
    const double scale = 1.0 / -v;
    if (k == 1) {
        switch (role) {
        case FeederRole::Faulty:
            return from_signed(role, k, -p.p1 * scale);
        case FeederRole::Healthy:
            return from_signed(role, k, -p.p3 * scale);
        case FeederRole::Substation:
            return from_signed(role, k, p.p5 * scale);
        }
    }
    switch (role) {
    case FeederRole::Faulty:
        return from_signed(role, k, (p.p2 - p.p1) * scale);
    case FeederRole::Healthy:
        return from_signed(role, k, (p.p4 - p.p3) * scale);
    case FeederRole::Substation:
        break;
    }
    return from_signed(role, k, (p.p5 - p.p6) * scale);
}

HarmonicTransfer damped_transfer(double v, double d, int k, FeederRole role, double c, double r_feeder,
                                 double r_coil) {
    check_k(k);
    if (d < 0.0) {
        fail(ErrorCategory::InvalidInput, "damping ratio must be non-negative");
    }
    const double kk = static_cast<double>(k) * k;
    const double vh = 1.0 - (1.0 - v) / kk;
    const double dh = d / k;
    const double den = vh * vh + dh * dh;
    if (den == 0.0) {
        fail(ErrorCategory::Singular, "damped transfer is singular at v = 0, d = 0");
    }
    HarmonicTransfer t{role, k, 0.0, 0.0};
    switch (role) {
    case FeederRole::Faulty: {
        const double cv = c - vh;
        const double rr = r_feeder - 1.0;
        t.gain = std::sqrt((cv * cv + dh * dh * rr * rr) / den);
        t.rotation_deg = branch_angle_deg(dh * c - r_feeder * dh * vh, c * vh - vh * vh - (1.0 - r_feeder) * dh * dh);
        break;
    }
    case FeederRole::Healthy:
        t.gain = std::sqrt((r_feeder * r_feeder * dh * dh + c * c) / den);
        t.rotation_deg = branch_angle_deg(c * dh - r_feeder * dh * vh, c * vh + r_feeder * dh * dh);
        break;
    case FeederRole::Substation: {
        const double one_minus = 1.0 - vh;
        t.gain = std::sqrt(den * (one_minus * one_minus + r_coil * r_coil * dh * dh)) / den;
        // The closed form carries a leading minus sign: rotate by a further half turn.
        t.rotation_deg =
            180.0 + branch_angle_deg(dh * one_minus + r_coil * dh * vh, vh * one_minus - r_coil * dh * dh);
        break;
    }
    }
    t.rotation_deg = wrap_deg(t.rotation_deg);
    return t;
}

TransferParameters TransferParameters::from_network(const network::NetworkParameters& params) {
    params.validate();
    TransferParameters t;
    t.f0 = params.f0;
    t.v = network::detuning_index(params);
    t.d = network::damping_ratio(params);
    t.r_coil = params.coil_resistance_share();
    t.faulty_index = params.faulty_index;
    for (std::size_t i = 0; i < params.size(); ++i) {
        t.names.push_back(params.feeders[i].name);
        t.c.push_back(params.capacitance_share(i));
        t.r_feeder.push_back(params.feeder_resistance_share(i));
    }
    return t;
}

namespace {

void check_transfer_params(const TransferParameters& p) {
    if (p.c.size() < 2 || p.r_feeder.size() != p.c.size() || p.names.size() != p.c.size()) {
        fail(ErrorCategory::InvalidInput, "transfer parameters need >= 2 feeders with matching names, c and r");
    }
    if (p.faulty_index >= p.c.size()) {
        fail(ErrorCategory::InvalidInput, "faulty feeder index out of range");
    }
}

}  // namespace

NetworkTransfer lossless_transfer(const TransferParameters& params, int k, GainFactorMode mode) {
    check_transfer_params(params);
    NetworkTransfer out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const FeederRole role = i == params.faulty_index ? FeederRole::Faulty : FeederRole::Healthy;
        out.feeders.push_back(lossless_transfer(params.v, k, role, params.c[i], mode));
    }
    out.substation = lossless_transfer(params.v, k, FeederRole::Substation, 0.0, mode);
    return out;
}

NetworkTransfer damped_transfer(const TransferParameters& params, int k) {
    check_transfer_params(params);
    NetworkTransfer out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const FeederRole role = i == params.faulty_index ? FeederRole::Faulty : FeederRole::Healthy;
        out.feeders.push_back(
            damped_transfer(params.v, params.d, k, role, params.c[i], params.r_feeder[i], params.r_coil));
    }
    out.substation = damped_transfer(params.v, params.d, k, FeederRole::Substation, 0.0, 0.0, params.r_coil);
    return out;
}

WaveformRecord predict_feeder_waveforms(const phasor::DecompositionResult& fault_dec,
                                        const TransferParameters& params, PredictionModel model) {
    check_transfer_params(params);
    const auto& fault = fault_dec.phasors;
    const WaveformRecord& base = fault_dec.sinusoidal;
    const std::size_t n = base.size();
    const std::size_t channels = params.size() + 1;
    std::vector<std::vector<double>> out(channels, std::vector<double>(n, 0.0));
    const double w = kTwoPi * fault.f0;

    for (int k = 1; k <= fault.max_order(); ++k) {
        const phasor::Phasor& src = fault.at(k);
        if (src.amplitude == 0.0) {
            continue;
        }
        NetworkTransfer tr;
        switch (model) {
        case PredictionModel::Damped:
            tr = damped_transfer(params, k);
            break;
        case PredictionModel::Lossless:
            tr = lossless_transfer(params, k, GainFactorMode::Exact);
            break;
        case PredictionModel::LosslessMidpoint:
            tr = lossless_transfer(params, k, GainFactorMode::Midpoint);
            break;
        }
        tr.feeders.push_back(tr.substation);
        for (std::size_t ch = 0; ch < channels; ++ch) {
            const phasor::Phasor p = tr.feeders[ch].apply(src);
            const double phase = deg_to_rad(p.phase_deg);
            for (std::size_t i = 0; i < n; ++i) {
                out[ch][i] += p.amplitude * std::sin(k * w * base.time(i) + phase);
            }
        }
    }

    WaveformRecord rec(base.fs(), base.t0());
    for (std::size_t i = 0; i < params.size(); ++i) {
        rec.add_channel(network::feeder_channel(params.names[i]), std::move(out[i]));
    }
    rec.add_channel(network::kSubstationChannel, std::move(out.back()));
    return rec;
}

WaveformRecord predict_feeder_waveforms(const phasor::DecompositionResult& fault_dec,
                                        const network::NetworkParameters& params, PredictionModel model) {
    return predict_feeder_waveforms(fault_dec, TransferParameters::from_network(params), model);
}

TransferParameters EstimatedParameters::to_transfer(const std::vector<std::string>& names, std::size_t faulty_index,
                                                    double f0) const {
    if (names.size() != c_healthy.size() + 1 || faulty_index >= names.size()) {
        fail(ErrorCategory::InvalidInput, "feeder names do not match the estimated healthy feeders");
    }
    TransferParameters t;
    t.f0 = f0;
    t.v = v;
    t.d = d;
    t.r_coil = r_coil;
    t.names = names;
    t.faulty_index = faulty_index;
    std::size_t h = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i == faulty_index) {
            t.c.push_back(c_n);
            t.r_feeder.push_back(r_faulty);
        } else {
            t.c.push_back(c_healthy[h]);
            t.r_feeder.push_back(r_healthy[h]);
            ++h;
        }
    }
    return t;
}

EstimatedParameters estimate_network_parameters(const EstimationInput& input, double c_n,
                                                const EstimationOptions& options) {
    if (input.healthy.empty()) {
        fail(ErrorCategory::InvalidInput, "estimation needs at least one healthy feeder");
    }
    if (!(c_n >= 0.0 && c_n < 1.0)) {
        fail(ErrorCategory::InvalidInput, "faulty-feeder capacitance share must lie in [0, 1)");
    }
    const std::complex<double> u = input.u_0b.at(1).as_complex();
    if (std::abs(u) < options.min_voltage) {
        fail(ErrorCategory::Estimation, "u_0b fundamental amplitude is below the estimation gate");
    }
    // Admittance-like ratio I/U: real part on the resistive axis, imaginary
    // part on the capacitive axis (negative for inductive).
    auto ratio = [&](const phasor::PhasorSet& s) { return s.at(1).as_complex() / u; };

    EstimatedParameters est;
    est.c_n = c_n;
    double cap_healthy = 0.0;
    double res_healthy = 0.0;
    std::vector<double> cap;
    std::vector<double> res;
    for (const auto& h : input.healthy) {
        const auto y = ratio(h);
        cap.push_back(y.imag());
        res.push_back(y.real());
        cap_healthy += y.imag();
        res_healthy += y.real();
    }
    const double cap_total = cap_healthy / (1.0 - c_n);
    if (!(cap_total > 0.0)) {
        fail(ErrorCategory::Estimation, "healthy feeders show no capacitive current");
    }
    const auto y_n = ratio(input.substation);
    const double inductive = -y_n.imag();
    const double res_coil = y_n.real();
    double res_faulty = c_n / (1.0 - c_n) * res_healthy;
    if (input.faulty && input.fault) {
        res_faulty = ((input.faulty->at(1).as_complex() + input.fault->at(1).as_complex()) / u).real();
    }
    const double res_total = res_coil + res_healthy + res_faulty;

    est.v = (cap_total - inductive) / cap_total;
    est.d = res_total / cap_total;
    for (std::size_t i = 0; i < cap.size(); ++i) {
        est.c_healthy.push_back(cap[i] / cap_total);
    }
    if (est.d < options.lossless_damping) {
        est.d = std::max(est.d, 0.0);
        est.r_coil = 1.0;
        est.r_faulty = 0.0;
        est.r_healthy.assign(cap.size(), 0.0);
    } else {
        est.r_coil = res_coil / res_total;
        est.r_faulty = res_faulty / res_total;
        for (double r : res) {
            est.r_healthy.push_back(r / res_total);
        }
    }
    return est;
}

}  // namespace hif::theory
