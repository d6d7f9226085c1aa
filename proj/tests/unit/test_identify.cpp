#include "hif/core/error.hpp"
#include "hif/identify/identify.hpp"

#include <doctest.h>

#include <cmath>

using namespace hif;
using namespace hif::identify;
using hif::phasor::PhasorSet;

namespace {

PhasorSet set_at(double t, double a1, double a3, double phi3, double phi1 = 0.0) {
    PhasorSet s;
    s.window_start = t;
    s.harmonics = {{a1, phi1}, {0.0, 0.0}, {a3, phi3}};
    return s;
}

/// Faulty feeder third harmonic opposes the healthy ones.
std::vector<PhasorSet> window(double t, std::size_t faulty, std::size_t n = 3, double amp3 = 0.5) {
    std::vector<PhasorSet> w;
    for (std::size_t i = 0; i < n; ++i) {
        w.push_back(set_at(t, 10.0, amp3, i == faulty ? 10.0 : -170.0));
    }
    return w;
}

}  // namespace

TEST_CASE("pairwise indicator measures departure from opposition") {
    CHECK(pairwise_indicator(10.0, -170.0) == doctest::Approx(0.0));
    CHECK(pairwise_indicator(0.0, 0.0) == doctest::Approx(180.0));
    CHECK(pairwise_indicator(30.0, -120.0) == doctest::Approx(30.0));
    CHECK(pairwise_indicator(-170.0, 170.0) == doctest::Approx(160.0));
    CHECK(pairwise_indicator(25.0, -100.0) == pairwise_indicator(-100.0, 25.0));
}

TEST_CASE("amplitude gate applies relative and absolute floors") {
    const AmplitudeGate gate;
    CHECK(gate.passes(set_at(0, 10.0, 0.06, 0.0), 3));
    CHECK_FALSE(gate.passes(set_at(0, 10.0, 0.04, 0.0), 3));
    CHECK_FALSE(gate.passes(set_at(0, 1.0, 0.009, 0.0), 3));
}

TEST_CASE("identifier confirms after k consecutive agreeing windows") {
    Identifier id(3);
    for (int j = 0; j < 4; ++j) {
        const auto w = window(0.01 * j, 2);
        id.push(w);
        CHECK(id.result().per_window.back().verdict == std::optional<std::size_t>(2));
        CHECK_FALSE(id.result().aggregated_verdict.has_value());
    }
    id.push(window(0.04, 2));
    CHECK(id.result().aggregated_verdict == std::optional<std::size_t>(2));
    const auto& w = id.result().per_window.back();
    CHECK(std::isnan(w.indicator[0][0]));
    CHECK(w.indicator[2][0] == doctest::Approx(0.0));
    CHECK(w.indicator[0][1] == doctest::Approx(180.0));
}

TEST_CASE("gated windows are undetermined and break runs") {
    Identifier id(3);
    for (int j = 0; j < 3; ++j) {
        id.push(window(0.01 * j, 1));
    }
    id.push(window(0.03, 1, 3, 0.001));
    CHECK_FALSE(id.result().per_window.back().verdict.has_value());
    CHECK_FALSE(id.result().per_window.back().valid[0][1]);
    for (int j = 4; j < 7; ++j) {
        id.push(window(0.01 * j, 1));
    }
    CHECK_FALSE(id.result().aggregated_verdict.has_value());
    id.push(window(0.07, 1));
    id.push(window(0.08, 1));
    CHECK(id.result().aggregated_verdict == std::optional<std::size_t>(1));
}

TEST_CASE("two confirmed feeders leave the aggregate undetermined") {
    Identifier id(3, IdentifyOptions{40.0, {}, 2, 3});
    id.push(window(0.0, 0));
    id.push(window(0.01, 0));
    CHECK(id.result().aggregated_verdict == std::optional<std::size_t>(0));
    id.push(window(0.02, 1));
    id.push(window(0.03, 1));
    CHECK_FALSE(id.result().aggregated_verdict.has_value());
}

TEST_CASE("two feeders cannot single out a candidate on phase alone") {
    // With two feeders the indicator is symmetric, so both qualify at once.
    Identifier id(2, IdentifyOptions{40.0, {}, 1, 3});
    id.push(window(0.0, 0, 2));
    CHECK_FALSE(id.result().per_window.back().verdict.has_value());
}

TEST_CASE("identifier rejects unsynchronized or malformed input") {
    Identifier id(3);
    auto w = window(0.0, 0);
    w[1].window_start = 0.005;
    try {
        id.push(w);
        FAIL("expected a synchronization error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Synchronization);
    }
    CHECK_THROWS_AS(Identifier(1), Error);
    const std::vector<std::vector<PhasorSet>> ragged = {{set_at(0, 1, 1, 0)}, {}};
    CHECK_THROWS_AS(static_cast<void>(identify::identify(ragged)), Error);
}

TEST_CASE("identify over streams matches incremental pushes") {
    std::vector<std::vector<PhasorSet>> streams(4);
    for (int j = 0; j < 12; ++j) {
        const auto w = window(0.01 * j, 3, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            streams[i].push_back(w[i]);
        }
    }
    const auto r = identify::identify(streams);
    CHECK(r.per_window.size() == 12);
    CHECK(r.aggregated_verdict == std::optional<std::size_t>(3));
    CHECK(r.thr == 40.0);
}

TEST_CASE("classic phase difference and criterion") {
    CHECK(classic_delta_phi(set_at(0, 1.0, 0.1, 30.0, 70.0)) == doctest::Approx(180.0));
    CHECK(classic_delta_phi(set_at(0, 1.0, 0.1, 0.0, 10.0)) == doctest::Approx(30.0));
    CHECK(classic_criterion(180.0));
    CHECK(classic_criterion(-145.0));
    CHECK_FALSE(classic_criterion(130.0));
}

TEST_CASE("classic bracket frozen values") {
    CHECK(classic_bracket(-0.1, 0.17) == doctest::Approx(357.7029189175252).epsilon(1e-12));
    CHECK(classic_bracket(-0.05, 0.0) == doctest::Approx(540.0));
    CHECK(classic_bracket(-0.02, 0.4) == doctest::Approx(270.0353854445152).epsilon(1e-12));
    CHECK(classic_bracket(-0.1, 0.5) == doctest::Approx(293.1788304288726).epsilon(1e-12));
    CHECK_THROWS_AS(static_cast<void>(classic_bracket(0.0, 0.1)), Error);
}

TEST_CASE("effective area maps") {
    const auto v = linear_grid(-0.1, -0.005, 0.005);
    const auto d = linear_grid(0.0, 0.5, 0.05);
    CHECK(v.size() == 20);
    CHECK(d.size() == 11);
    const auto proposed = effective_area_map(0.2, v, d, MapMethod::Proposed);
    CHECK(proposed.cells.size() == v.size() * d.size());
    CHECK(proposed.pass_count() == proposed.evaluated_count());
    const auto wide = effective_area_map(0.9, v, d, MapMethod::Proposed);
    CHECK(wide.pass_count() < wide.evaluated_count());
    const auto classic = effective_area_map(0.2, v, d, MapMethod::Classic);
    CHECK(classic.pass_count() < classic.evaluated_count());
    CHECK(classic.pass_count() > 0);
    const std::vector<double> with_zero{-0.05, 0.0};
    const std::vector<double> lossless{0.0};
    const auto sing = effective_area_map(0.2, with_zero, lossless, MapMethod::Proposed);
    CHECK(sing.cells[1].singular);
    CHECK(sing.evaluated_count() == 1);
    CHECK_THROWS_AS(static_cast<void>(effective_area_map(1.2, v, d, MapMethod::Proposed)), Error);
    CHECK_THROWS_AS(static_cast<void>(linear_grid(0.0, 1.0, 0.0)), Error);
}
