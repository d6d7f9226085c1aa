#include "hif/core/angles.hpp"
#include "hif/core/error.hpp"
#include "hif/network/network.hpp"
#include "hif/phasor/phasor.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hif;
using namespace hif::network;

namespace {

NetworkParameters four_feeders(double v, double d, std::size_t faulty = 0, double coil_share = 0.5) {
    NetworkTargets t;
    t.names = {"a", "b", "c", "d"};
    t.capacitances = {6.7e-6, 5.4e-6, 5.4e-6, 12.4e-6};
    t.detuning = v;
    t.damping = d;
    t.coil_share = coil_share;
    t.faulty_index = faulty;
    return make_network(t);
}

InjectedFault tone_fault(const std::vector<test::Tone>& tones, double duration = 0.4) {
    const double fs = 6400.0;
    return {test::tone_record("i_0f", tones, 50.0, fs, static_cast<std::size_t>(duration * fs)), "i_0f"};
}

double kcl_residual(const WaveformRecord& rec, const NetworkParameters& p) {
    double peak = 0.0;
    double worst = 0.0;
    const auto sub = rec.channel(kSubstationChannel);
    for (std::size_t n = 0; n < rec.size(); ++n) {
        double sum = sub[n];
        for (const auto& f : p.feeders) {
            const double x = rec.channel(feeder_channel(f.name))[n];
            sum += x;
            peak = std::max(peak, std::abs(x));
        }
        worst = std::max(worst, std::abs(sum));
    }
    return worst / peak;
}

}  // namespace

TEST_CASE("make_network reproduces its detuning and damping targets") {
    for (double v : {-0.1, -0.05, -0.02, 0.03}) {
        for (double d : {0.0, 0.1, 0.45}) {
            for (double share : {0.0, 0.5, 1.0}) {
                const auto p = four_feeders(v, d, 2, share);
                CHECK(detuning_index(p) == doctest::Approx(v).epsilon(1e-12));
                CHECK(damping_ratio(p) == doctest::Approx(d).epsilon(1e-12));
                CHECK(p.compensation() == doctest::Approx(1.0 / (1.0 - v)).epsilon(1e-12));
                if (d > 0.0) {
                    CHECK(p.coil_resistance_share() == doctest::Approx(share).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("capacitance and resistance shares sum to one") {
    const auto p = four_feeders(-0.05, 0.2, 1, 0.3);
    double c = 0.0;
    double r = p.coil_resistance_share();
    for (std::size_t i = 0; i < p.size(); ++i) {
        c += p.capacitance_share(i);
        r += p.feeder_resistance_share(i);
    }
    CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.in_nominal_band());
}

TEST_CASE("network validation catches malformed parameters") {
    auto p = four_feeders(-0.05, 0.0);
    p.faulty_index = 7;
    CHECK_THROWS_AS(p.validate(), Error);
    p = four_feeders(-0.05, 0.0);
    p.feeders[1].name = "a";
    CHECK_THROWS_AS(p.validate(), Error);
    p = four_feeders(-0.05, 0.0);
    p.feeders.resize(1);
    CHECK_THROWS_AS(p.validate(), Error);
    p = four_feeders(-0.05, 0.0);
    p.coil_l = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("kcl holds at every sample for injected and coupled sources") {
    const auto p = four_feeders(-0.05, 0.2, 3);
    SimulationOptions o;
    o.duration = 0.3;
    const auto injected = simulate_zero_sequence(p, tone_fault({{1, 3.0, 10.0}, {3, 0.4, -60.0}, {5, 0.1, 30.0}}), o);
    CHECK(kcl_residual(injected, p) < 1e-9);

    CoupledFault c;
    c.source.amplitude = 8165.0;
    c.r_series = 1500.0;
    c.arc.p_loss = 1000.0;
    c.arc.tau = 2.0;
    const auto coupled = simulate_zero_sequence(p, c, o);
    CHECK(coupled.has_channel(kArcChannel));
    CHECK(kcl_residual(coupled, p) < 1e-9);
}

TEST_CASE("periodic steady start matches nodal analysis at every harmonic") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> amp(0.2, 3.0);
    std::uniform_real_distribution<double> ph(-180.0, 180.0);
    for (auto [v, d] : {std::pair{-0.1, 0.0}, std::pair{-0.02, 0.3}, std::pair{0.05, 0.1}}) {
        const auto p = four_feeders(v, d, 1);
        std::vector<test::Tone> tones;
        for (int k : {1, 3, 5, 7}) {
            tones.push_back({k, amp(rng), ph(rng)});
        }
        SimulationOptions o;
        o.duration = 0.2;
        o.initial_state = InitialState::PeriodicSteady;
        const auto rec = simulate_zero_sequence(p, tone_fault(tones), o);
        const auto fault = phasor::decompose_waveform(rec, "i_0f", 50.0, 11).phasors;
        for (std::size_t i = 0; i <= p.size(); ++i) {
            const std::string ch = i < p.size() ? feeder_channel(p.feeders[i].name) : std::string(kSubstationChannel);
            const auto got = phasor::decompose_waveform(rec, ch, 50.0, 11).phasors;
            for (const auto& tone : tones) {
                const auto h = test::admittance_response(p, tone.order)[i];
                const auto expected = std::polar(std::abs(h) * fault.at(tone.order).amplitude,
                                                 std::arg(h) + fault.at(tone.order).phase_deg * kPi / 180.0);
                const auto measured = got.at(tone.order).as_complex();
                CHECK(std::abs(measured - expected) < 2e-3 * std::abs(expected) + 1e-9);
            }
        }
    }
}

TEST_CASE("resonant lossless tank has no periodic steady state") {
    NetworkTargets t;
    t.names = {"a", "b"};
    t.capacitances = {1e-6, 2e-6};
    t.detuning = 0.0;
    const auto p = make_network(t);
    SimulationOptions o;
    o.initial_state = InitialState::PeriodicSteady;
    try {
        static_cast<void>(simulate_zero_sequence(p, tone_fault({{1, 1.0, 0.0}}), o));
        FAIL("expected a singular tank");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Singular);
    }
}

TEST_CASE("coupled sources reject a periodic start") {
    const auto p = four_feeders(-0.05, 0.2);
    CoupledFault c;
    c.source.amplitude = 8165.0;
    c.r_series = 1500.0;
    SimulationOptions o;
    o.initial_state = InitialState::PeriodicSteady;
    CHECK_THROWS_AS(static_cast<void>(simulate_zero_sequence(p, c, o)), Error);
}

TEST_CASE("series resistance profile interpolates linearly and holds its ends") {
    CoupledFault c;
    c.r_series = 100.0;
    c.series_profile = {{0.1, 1000.0}, {0.3, 3000.0}};
    CHECK(c.series_resistance(0.0) == doctest::Approx(1000.0));
    CHECK(c.series_resistance(0.2) == doctest::Approx(2000.0));
    CHECK(c.series_resistance(0.9) == doctest::Approx(3000.0));
    c.series_profile.clear();
    CHECK(c.series_resistance(0.5) == 100.0);
}

TEST_CASE("virtual source sums its harmonics") {
    VirtualSource s{100.0, 0.0, {{3, 12.0, kPi / 2}}};
    CHECK(s(0.0, 50.0) == doctest::Approx(12.0));
    CHECK(s(0.005, 50.0) == doctest::Approx(100.0));
    CHECK(s(0.0025, 50.0) == doctest::Approx(100.0 * std::sin(kPi / 4) + 12.0 * std::sin(5.0 * kPi / 4)));
}

TEST_CASE("settling time grows as damping shrinks and is infinite when lossless") {
    const InjectedFault f = tone_fault({{1, 1.0, 0.0}});
    const double high = settling_time(four_feeders(-0.05, 0.4), f);
    const double low = settling_time(four_feeders(-0.05, 0.01), f);
    CHECK(high >= 20.0 / 50.0);
    CHECK(low > high);
    CHECK(std::isinf(settling_time(four_feeders(-0.05, 0.0), f)));
}
