#include "hif/core/error.hpp"
#include "hif/phasor/phasor.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace hif;
using namespace hif::phasor;

namespace {

const std::vector<test::Tone> kTones = {{1, 10.0, 35.0}, {3, 1.5, -120.0}, {5, 0.4, 170.0}, {7, 0.2, 5.0}};

}  // namespace

TEST_CASE("window phasors recover constructed tones exactly") {
    const auto rec = test::tone_record("x", kTones, 50.0, 6400.0, 1280);
    const auto set = window_phasors(rec, "x", 0.0, 50.0, 11);
    for (const auto& t : kTones) {
        CHECK(set.at(t.order).amplitude == doctest::Approx(t.amplitude).epsilon(1e-12));
        CHECK(test::angle_gap_deg(set.at(t.order).phase_deg, t.phase_deg) < 1e-9);
    }
    CHECK(set.at(2).amplitude < 1e-12);
}

TEST_CASE("phases refer to the record time origin at any window start") {
    const auto rec = test::tone_record("x", kTones, 50.0, 6400.0, 6400, 0.013);
    for (double start : {0.013, 0.023, 0.5, 0.973}) {
        const auto set = window_phasors(rec, "x", start, 50.0, 11);
        CHECK(test::angle_gap_deg(set.at(1).phase_deg, 35.0) < 1e-8);
        CHECK(test::angle_gap_deg(set.at(3).phase_deg, -120.0) < 1e-8);
    }
}

TEST_CASE("sliding stream hops half a cycle") {
    const auto rec = test::tone_record("x", kTones, 50.0, 6400.0, 6400);
    const auto stream = sliding_phasor_stream(rec, "x", 50.0, 11);
    REQUIRE(stream.size() == 99);
    CHECK(stream[1].window_start == doctest::Approx(0.01));
    CHECK(stream.back().window_start == doctest::Approx(0.98));
    for (const auto& s : stream) {
        CHECK(s.at(3).amplitude == doctest::Approx(1.5).epsilon(1e-10));
    }
}

TEST_CASE("decomposition splits sinusoidal and distortional parts") {
    const auto rec = test::tone_record("x", kTones, 50.0, 6400.0, 1280);
    const auto dec = decompose_waveform(rec, "x", 50.0, 11);
    const auto fundamental = test::synth({kTones.front()}, 50.0, 6400.0, 1280);
    const auto s = dec.sinusoidal.channel("x");
    const auto d = dec.distortional.channel("x");
    const auto x = rec.channel("x");
    for (std::size_t i = 0; i < rec.size(); i += 13) {
        CHECK(s[i] == doctest::Approx(fundamental[i]).epsilon(1e-9));
        CHECK(s[i] + d[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
    const auto scaled = recompose_scaled(dec, -1.0);
    for (std::size_t i = 0; i < rec.size(); i += 13) {
        CHECK(scaled.channel("x")[i] == doctest::Approx(s[i] - d[i]).epsilon(1e-12));
    }
}

TEST_CASE("harmonic power sums the squared rms of each order") {
    PhasorSet set;
    set.harmonics = {{10.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}};
    CHECK(harmonic_power(set) == doctest::Approx(52.0));
}

TEST_CASE("phasor analysis rejects unusable requests") {
    const auto rec = test::tone_record("x", kTones, 50.0, 6400.0, 1280);
    CHECK_THROWS_AS(static_cast<void>(window_phasors(rec, "x", 0.19, 50.0, 11)), Error);
    CHECK_THROWS_AS(static_cast<void>(window_phasors(rec, "x", 0.0, 50.0, 64)), Error);
    const auto odd = test::tone_record("x", kTones, 50.0, 50.0 * 129.0, 1290);
    CHECK_THROWS_AS(static_cast<void>(sliding_phasor_stream(odd, "x", 50.0, 11)), Error);
    PhasorSet empty;
    CHECK_THROWS_AS(static_cast<void>(empty.at(1)), Error);
}

TEST_CASE("complex conversion round trips") {
    const Phasor p{3.0, -150.0};
    const auto q = Phasor::from_complex(p.as_complex());
    CHECK(q.amplitude == doctest::Approx(3.0));
    CHECK(q.phase_deg == doctest::Approx(-150.0));
}
