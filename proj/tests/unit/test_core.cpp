#include "hif/core/angles.hpp"
#include "hif/core/error.hpp"
#include "hif/core/rk4.hpp"
#include "hif/core/waveform.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace hif;

TEST_CASE("wrap_deg maps into the half-open interval") {
    CHECK(wrap_deg(180.0) == doctest::Approx(180.0));
    CHECK(wrap_deg(-180.0) == doctest::Approx(180.0));
    CHECK(wrap_deg(540.0) == doctest::Approx(180.0));
    CHECK(wrap_deg(-190.0) == doctest::Approx(170.0));
    CHECK(wrap_deg(725.0) == doctest::Approx(5.0));
    for (double a = -1000.0; a < 1000.0; a += 7.3) {
        const double w = wrap_deg(a);
        CHECK(w > -180.0);
        CHECK(w <= 180.0);
        CHECK(std::abs(std::remainder(w - a, 360.0)) < 1e-9);
    }
}

TEST_CASE("angular distance is symmetric and bounded") {
    CHECK(angular_distance_deg(170.0, -170.0) == doctest::Approx(20.0));
    CHECK(angular_distance_deg(-170.0, 170.0) == doctest::Approx(20.0));
    CHECK(angular_distance_deg(0.0, 180.0) == doctest::Approx(180.0));
    CHECK(wrap_rad(3.0 * kPi) == doctest::Approx(kPi));
}

TEST_CASE("rk4 integrates an oscillator with fourth-order accuracy") {
    const auto rhs = [](double, const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -y[0]}; };
    const auto run = [&](int steps) {
        std::array<double, 2> y{0.0, 1.0};
        const double h = 1.0 / steps;
        for (int i = 0; i < steps; ++i) {
            y = rk4_step<2>(rhs, i * h, y, h);
        }
        return std::abs(y[0] - std::sin(1.0));
    };
    const double coarse = run(10);
    const double fine = run(20);
    CHECK(coarse / fine == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("waveform record channels and timing") {
    WaveformRecord rec(6400.0, 0.25);
    rec.add_channel("a", {1.0, 2.0, 3.0});
    rec.add_channel("b", {4.0, 5.0, 6.0});
    CHECK(rec.size() == 3);
    CHECK(rec.time(2) == doctest::Approx(0.25 + 2.0 / 6400.0));
    CHECK(rec.channel("b")[1] == 5.0);
    CHECK_THROWS_AS(rec.add_channel("c", {1.0}), Error);
    CHECK_THROWS_AS(static_cast<void>(rec.channel("missing")), Error);
    const std::vector<std::string> pick{"b"};
    const auto sel = rec.select(pick);
    CHECK(sel.channel_count() == 1);
    CHECK(sel.t0() == 0.25);
}

TEST_CASE("samples_per_cycle requires an integer ratio") {
    CHECK(samples_per_cycle(6400.0, 50.0) == 128);
    CHECK(samples_per_cycle(6000.0, 60.0) == 100);
    try {
        static_cast<void>(samples_per_cycle(6430.0, 50.0));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Configuration);
    }
}

TEST_CASE("error categories map to distinct nonzero exit codes") {
    std::set<int> codes;
    for (auto c : {ErrorCategory::InvalidInput, ErrorCategory::Configuration, ErrorCategory::Range,
                   ErrorCategory::Singular, ErrorCategory::Synchronization, ErrorCategory::Parse,
                   ErrorCategory::Estimation, ErrorCategory::Io}) {
        CHECK(exit_code(c) != 0);
        codes.insert(exit_code(c));
        CHECK(!to_string(c).empty());
    }
    CHECK(codes.size() == 8);
}
