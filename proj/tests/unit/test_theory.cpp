#include "hif/core/error.hpp"
#include "hif/network/network.hpp"
#include "hif/phasor/phasor.hpp"
#include "hif/theory/theory.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>

using namespace hif;
using namespace hif::theory;

namespace {

network::NetworkParameters random_network(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> cap(1e-6, 1.5e-5);
    std::uniform_real_distribution<double> v(-0.12, 0.08);
    std::uniform_real_distribution<double> d(0.0, 0.6);
    std::uniform_real_distribution<double> share(0.0, 1.0);
    std::uniform_int_distribution<int> count(2, 6);
    network::NetworkTargets t;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        t.names.push_back("f" + std::to_string(i));
        t.capacitances.push_back(cap(rng));
    }
    t.detuning = v(rng);
    if (std::abs(t.detuning) < 1e-3) {
        t.detuning = -0.01;
    }
    t.damping = d(rng);
    t.coil_share = share(rng);
    t.faulty_index = static_cast<std::size_t>(count(rng)) % static_cast<std::size_t>(n);
    return network::make_network(t);
}

void check_against_oracle(const HarmonicTransfer& t, test::cplx h) {
    CHECK(t.gain == doctest::Approx(std::abs(h)).epsilon(1e-9));
    if (std::abs(h) > 1e-12) {
        CHECK(test::angle_gap_deg(t.rotation_deg, test::arg_deg(h)) < 1e-7);
    }
}

}  // namespace

TEST_CASE("harmonic gain factor endpoints and bounds") {
    const double s = 1.0 / 1.1;
    CHECK(harmonic_gain_factor(2, s) == doctest::Approx(3.0 / (4.0 / 1.1 - 1.0)).epsilon(1e-14));
    CHECK(harmonic_gain_factor(100000, s) == doctest::Approx(1.1).epsilon(1e-6));
    CHECK(harmonic_gain_factor(1, s) == 0.0);
    for (int k = 2; k <= 11; ++k) {
        const double g = harmonic_gain_factor(k, s);
        CHECK(g > harmonic_gain_lower(s));
        CHECK(g <= harmonic_gain_upper(s) + 1e-15);
    }
    CHECK(harmonic_gain_midpoint(s) == doctest::Approx(0.5 * (1.1 + harmonic_gain_upper(s))));
    CHECK_THROWS_AS(static_cast<void>(harmonic_gain_factor(2, 0.25)), Error);
    CHECK_THROWS_AS(static_cast<void>(harmonic_gain_factor(2, -1.0)), Error);
    CHECK_THROWS_AS(static_cast<void>(harmonic_gain_factor(0, s)), Error);
}

TEST_CASE("damped transfers agree with nodal analysis on random networks") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const auto p = random_network(rng);
        const auto params = TransferParameters::from_network(p);
        for (int k = 1; k <= 11; ++k) {
            const auto oracle = test::admittance_response(p, k);
            const auto tr = damped_transfer(params, k);
            for (std::size_t i = 0; i < p.size(); ++i) {
                check_against_oracle(tr.feeders[i], oracle[i]);
            }
            check_against_oracle(tr.substation, oracle.back());
        }
    }
}

TEST_CASE("lossless transfers agree with nodal analysis") {
    for (double v : {-0.1, -0.05, -0.02, 0.04}) {
        network::NetworkTargets t;
        t.names = {"a", "b", "c"};
        t.capacitances = {2e-6, 3e-6, 5e-6};
        t.detuning = v;
        t.faulty_index = 2;
        const auto p = network::make_network(t);
        const auto params = TransferParameters::from_network(p);
        for (int k = 1; k <= 11; ++k) {
            const auto oracle = test::admittance_response(p, k);
            const auto tr = lossless_transfer(params, k);
            for (std::size_t i = 0; i < p.size(); ++i) {
                check_against_oracle(tr.feeders[i], oracle[i]);
            }
            check_against_oracle(tr.substation, oracle.back());
        }
    }
}

TEST_CASE("lossless coefficients follow their definitions") {
    const auto c = lossless_coefficients(-0.05, 3, 0.3, 0.2);
    const double g = harmonic_gain_factor(3, 1.0 / 1.05);
    CHECK(c.p1 == doctest::Approx(0.35));
    CHECK(c.p2 == doctest::Approx(0.3 * g));
    CHECK(c.p3 == doctest::Approx(0.2));
    CHECK(c.p4 == doctest::Approx(0.2 * g));
    CHECK(c.p5 == doctest::Approx(1.05));
    CHECK(c.p6 == doctest::Approx(g));
    const auto mid = lossless_coefficients(-0.05, 3, 0.3, 0.2, GainFactorMode::Midpoint);
    CHECK(mid.harmonic_gain_factor == doctest::Approx(harmonic_gain_midpoint(1.0 / 1.05)));
}

TEST_CASE("superposition threshold splits the sign of faulty feeder harmonics") {
    CHECK(superposition_threshold(-0.1, 2) == doctest::Approx(0.725).epsilon(1e-15));
    for (int k : {2, 3, 5}) {
        const double thr = superposition_threshold(-0.1, k);
        const auto below = lossless_transfer(-0.1, k, FeederRole::Faulty, thr - 0.05);
        const auto above = lossless_transfer(-0.1, k, FeederRole::Faulty, std::min(thr + 0.05, 0.999));
        const auto healthy = lossless_transfer(-0.1, k, FeederRole::Healthy, 0.1);
        CHECK(test::angle_gap_deg(below.rotation_deg, healthy.rotation_deg) == doctest::Approx(180.0));
        CHECK(test::angle_gap_deg(above.rotation_deg, healthy.rotation_deg) == doctest::Approx(0.0));
    }
}

TEST_CASE("damped transfer reduces to lossless and rejects resonance") {
    for (auto role : {FeederRole::Faulty, FeederRole::Healthy, FeederRole::Substation}) {
        for (int k = 1; k <= 11; ++k) {
            const auto a = damped_transfer(-0.05, 0.0, k, role, 0.3, 0.0, 1.0);
            const auto b = lossless_transfer(-0.05, k, role, 0.3);
            CHECK(a.gain == doctest::Approx(b.gain).epsilon(1e-12));
            CHECK(test::angle_gap_deg(a.rotation_deg, b.rotation_deg) < 1e-9);
        }
    }
    CHECK_THROWS_AS(static_cast<void>(damped_transfer(0.0, 0.0, 1, FeederRole::Healthy, 0.3, 0.0, 1.0)), Error);
    CHECK_THROWS_AS(static_cast<void>(lossless_transfer(0.0, 3, FeederRole::Healthy, 0.3)), Error);
    CHECK_NOTHROW(static_cast<void>(damped_transfer(0.0, 0.1, 1, FeederRole::Healthy, 0.3, 0.2, 0.5)));
}

TEST_CASE("substation fundamental rotation lies in the fourth quadrant when overcompensated") {
    for (double v : {-0.1, -0.05, -0.02}) {
        for (double d : {0.05, 0.2, 0.5}) {
            const auto t = damped_transfer(v, d, 1, FeederRole::Substation, 0.0, 0.0, 0.5);
            CHECK(t.rotation_deg < 0.0);
            CHECK(t.rotation_deg > -90.0);
        }
    }
}

TEST_CASE("applying a transfer scales amplitude and rotates phase") {
    const HarmonicTransfer t{FeederRole::Healthy, 3, 0.5, 170.0};
    const auto p = t.apply({2.0, 20.0});
    CHECK(p.amplitude == doctest::Approx(1.0));
    CHECK(p.phase_deg == doctest::Approx(-170.0));
}

namespace {

struct SimulatedCase {
    network::NetworkParameters net;
    WaveformRecord rec;
};

SimulatedCase simulate_case(double v, double d, double coil_share, std::size_t faulty) {
    network::NetworkTargets t;
    t.names = {"a", "b", "c", "d"};
    t.capacitances = {6.7e-6, 5.4e-6, 5.4e-6, 12.4e-6};
    t.detuning = v;
    t.damping = d;
    t.coil_share = coil_share;
    t.faulty_index = faulty;
    auto net = network::make_network(t);
    network::InjectedFault f{test::tone_record("i_0f", {{1, 3.0, 20.0}, {3, 0.5, -100.0}, {5, 0.2, 60.0}}, 50.0,
                                               6400.0, 1280),
                             "i_0f"};
    network::SimulationOptions o;
    o.duration = 0.2;
    o.initial_state = network::InitialState::PeriodicSteady;
    auto rec = network::simulate_zero_sequence(net, f, o);
    return {std::move(net), std::move(rec)};
}

EstimationInput estimation_input(const SimulatedCase& c, bool with_fault) {
    const auto steady = [&](const std::string& ch) { return phasor::decompose_waveform(c.rec, ch, 50.0, 11).phasors; };
    EstimationInput in;
    in.u_0b = steady(network::kBusVoltageChannel);
    in.substation = steady(network::kSubstationChannel);
    for (std::size_t i = 0; i < c.net.size(); ++i) {
        const auto ch = network::feeder_channel(c.net.feeders[i].name);
        if (i == c.net.faulty_index) {
            in.faulty = steady(ch);
        } else {
            in.healthy.push_back(steady(ch));
        }
    }
    if (with_fault) {
        in.fault = steady("i_0f");
    }
    return in;
}

}  // namespace

TEST_CASE("prediction matches simulated feeder currents in steady state") {
    const auto c = simulate_case(-0.05, 0.2, 0.4, 1);
    const auto dec = phasor::decompose_waveform(c.rec, "i_0f", 50.0, 11);
    const auto pred = predict_feeder_waveforms(dec, c.net);
    for (const auto& name : pred.channel_names()) {
        const auto a = pred.channel(name);
        const auto b = c.rec.channel(name);
        double peak = 0.0;
        double err = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            peak = std::max(peak, std::abs(b[i]));
            err = std::max(err, std::abs(a[i] - b[i]));
        }
        CHECK(err < 2e-3 * peak);
    }
}

TEST_CASE("estimation recovers detuning, damping and shares") {
    for (auto [v, d, share] : {std::tuple{-0.1, 0.3, 0.5}, std::tuple{-0.02, 0.1, 1.0}, std::tuple{-0.05, 0.0, 0.5}}) {
        const auto c = simulate_case(v, d, share, 3);
        const double c_n = c.net.capacitance_share(3);
        const auto est = estimate_network_parameters(estimation_input(c, true), c_n);
        CHECK(est.v == doctest::Approx(v).epsilon(1e-3));
        CHECK(std::abs(est.d - d) < 1e-3);
        if (d > 0.0) {
            CHECK(est.r_coil == doctest::Approx(share).epsilon(1e-3));
        }
        REQUIRE(est.c_healthy.size() == 3);
        CHECK(est.c_healthy[0] == doctest::Approx(c.net.capacitance_share(0)).epsilon(1e-3));
        CHECK(est.c_healthy[2] == doctest::Approx(c.net.capacitance_share(2)).epsilon(1e-3));
    }
}

TEST_CASE("estimation without the fault current assumes proportional leakage") {
    const auto c = simulate_case(-0.05, 0.2, 0.5, 0);
    const auto est = estimate_network_parameters(estimation_input(c, false), c.net.capacitance_share(0));
    CHECK(est.v == doctest::Approx(-0.05).epsilon(1e-3));
    CHECK(est.d == doctest::Approx(0.2).epsilon(1e-3));
}

TEST_CASE("estimation refuses a dead bus") {
    EstimationInput in;
    in.u_0b.harmonics = {{1e-6, 0.0}};
    in.substation.harmonics = {{1.0, 0.0}};
    in.healthy.push_back(in.substation);
    try {
        static_cast<void>(estimate_network_parameters(in, 0.2));
        FAIL("expected an estimation error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Estimation);
    }
}
