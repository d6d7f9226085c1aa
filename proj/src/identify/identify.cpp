#include "hif/identify/identify.hpp"

#include "hif/core/angles.hpp"
#include "hif/core/error.hpp"
#include "hif/theory/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hif::identify {

namespace {

constexpr double kSyncTolerance = 1e-9;  // s

}  // namespace

double pairwise_indicator(double phi_a_deg, double phi_b_deg) noexcept {
    return std::abs(wrap_deg(phi_a_deg - phi_b_deg - 180.0));
}

bool AmplitudeGate::passes(const phasor::PhasorSet& set, int k) const {
    const double a = set.at(k).amplitude;
    return a >= std::max(relative * set.at(1).amplitude, absolute);
}

Identifier::Identifier(std::size_t feeders, IdentifyOptions options)
    : n_(feeders), options_(options), confirmed_(feeders, false) {
    if (n_ < 2) {
        fail(ErrorCategory::Configuration, "need >= 2 feeders for identification");
    }
    if (options_.k_consec == 0) {
        fail(ErrorCategory::Configuration, "k_consec must be >= 1");
    }
    if (!(options_.thr >= 0.0 && options_.thr <= 180.0)) {
        fail(ErrorCategory::Configuration, "threshold must lie in [0, 180] degrees");
    }
    result_.thr = options_.thr;
    result_.k_consec = options_.k_consec;
}

void Identifier::push(std::span<const phasor::PhasorSet> window) {
    if (window.size() != n_) {
        fail(ErrorCategory::InvalidInput,
             "expected " + std::to_string(n_) + " phasor sets, got " + std::to_string(window.size()));
    }
    const double start = window.front().window_start;
    for (const auto& set : window) {
        if (std::abs(set.window_start - start) > kSyncTolerance) {
            fail(ErrorCategory::Synchronization, "feeder windows start at different times (" +
                                                     std::to_string(start) + " s vs " +
                                                     std::to_string(set.window_start) + " s)");
        }
    }

    const int k = options_.order;
    std::vector<bool> gated(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        gated[i] = options_.gate.passes(window[i], k);
    }

    WindowResult w;
    w.window_start = start;
    w.indicator.assign(n_, std::vector<double>(n_, std::numeric_limits<double>::quiet_NaN()));
    w.valid.assign(n_, std::vector<bool>(n_, false));
    for (std::size_t a = 0; a < n_; ++a) {
        for (std::size_t b = a + 1; b < n_; ++b) {
            const double value = pairwise_indicator(window[a].at(k).phase_deg, window[b].at(k).phase_deg);
            w.indicator[a][b] = w.indicator[b][a] = value;
            w.valid[a][b] = w.valid[b][a] = gated[a] && gated[b];
        }
    }

    std::size_t candidates = 0;
    for (std::size_t a = 0; a < n_; ++a) {
        bool ok = true;
        for (std::size_t i = 0; i < n_ && ok; ++i) {
            if (i != a) {
                ok = w.valid[a][i] && w.indicator[a][i] <= options_.thr;
            }
        }
        if (ok) {
            ++candidates;
            w.verdict = a;
        }
    }
    if (candidates != 1) {
        w.verdict.reset();
    }

    if (w.verdict && w.verdict == run_feeder_) {
        ++run_length_;
    } else {
        run_feeder_ = w.verdict;
        run_length_ = w.verdict ? 1 : 0;
    }
    if (run_feeder_ && run_length_ >= options_.k_consec) {
        confirmed_[*run_feeder_] = true;
    }
    const auto confirmed = static_cast<std::size_t>(std::count(confirmed_.begin(), confirmed_.end(), true));
    if (confirmed == 1) {
        result_.aggregated_verdict =
            static_cast<std::size_t>(std::find(confirmed_.begin(), confirmed_.end(), true) - confirmed_.begin());
    } else {
        result_.aggregated_verdict.reset();
    }
    result_.per_window.push_back(std::move(w));
}

IdentificationResult identify(std::span<const std::vector<phasor::PhasorSet>> streams,
                              const IdentifyOptions& options) {
    if (streams.size() < 2) {
        fail(ErrorCategory::Configuration, "need >= 2 feeders for identification");
    }
    const std::size_t windows = streams.front().size();
    for (const auto& s : streams) {
        if (s.size() != windows) {
            fail(ErrorCategory::Synchronization, "phasor streams differ in window count");
        }
    }
    Identifier id(streams.size(), options);
    std::vector<phasor::PhasorSet> window(streams.size());
    for (std::size_t j = 0; j < windows; ++j) {
        for (std::size_t i = 0; i < streams.size(); ++i) {
            window[i] = streams[i][j];
        }
        id.push(window);
    }
    return id.result();
}

double classic_delta_phi(const phasor::PhasorSet& set) {
    return wrap_deg(3.0 * set.at(1).phase_deg - set.at(3).phase_deg);
}

bool classic_criterion(double delta_phi_deg, double thr) noexcept {
    return std::abs(wrap_deg(delta_phi_deg - 180.0)) <= thr;
}

double classic_bracket(double v, double d) {
    if (v == 0.0) {
        fail(ErrorCategory::Singular, "classic bracket is undefined at v = 0");
    }
    return 3.0 * (180.0 + rad_to_deg(std::atan(d / v))) - rad_to_deg(std::atan(3.0 * d / (8.0 + v)));
}

std::size_t EffectiveAreaMap::pass_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const MapCell& c) { return c.pass; }));
}

std::size_t EffectiveAreaMap::evaluated_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const MapCell& c) { return !c.singular; }));
}

EffectiveAreaMap effective_area_map(double c_n, std::span<const double> v_grid, std::span<const double> d_grid,
                                    MapMethod method, const MapOptions& options) {
    using theory::FeederRole;
    if (!(c_n > 0.0 && c_n < 1.0)) {
        fail(ErrorCategory::InvalidInput, "c_n must lie in (0, 1)");
    }
    const double c_h = options.c_healthy.value_or(1.0 - c_n);
    EffectiveAreaMap map;
    map.method = method;
    map.c_n = c_n;
    map.v_grid.assign(v_grid.begin(), v_grid.end());
    map.d_grid.assign(d_grid.begin(), d_grid.end());
    map.cells.reserve(v_grid.size() * d_grid.size());
    for (double v : v_grid) {
        for (double d : d_grid) {
            MapCell cell{v, d};
            if (v == 0.0) {
                cell.singular = true;
                map.cells.push_back(cell);
                continue;
            }
            auto rot = [&](FeederRole role, int k) {
                const double c = role == FeederRole::Faulty ? c_n : c_h;
                const double r = role == FeederRole::Faulty ? options.r_faulty : options.r_healthy;
                return theory::damped_transfer(v, d, k, role, c, r, options.r_coil).rotation_deg;
            };
            const double faulty3 = rot(FeederRole::Faulty, 3);
            const double healthy3 = rot(FeederRole::Healthy, 3);
            if (method == MapMethod::Proposed) {
                cell.value = pairwise_indicator(faulty3, healthy3);
                cell.pass = cell.value <= options.thr;
            } else {
                cell.faulty_delta_phi =
                    wrap_deg(options.fault_delta_phi + 3.0 * rot(FeederRole::Faulty, 1) - faulty3);
                cell.healthy_delta_phi =
                    wrap_deg(options.fault_delta_phi + 3.0 * rot(FeederRole::Healthy, 1) - healthy3);
                cell.value = std::abs(wrap_deg(cell.healthy_delta_phi - 180.0));
                cell.pass = classic_criterion(cell.faulty_delta_phi, options.thr) &&
                            !classic_criterion(cell.healthy_delta_phi, options.thr);
            }
            map.cells.push_back(cell);
        }
    }
    return map;
}

std::vector<double> linear_grid(double first, double last, double step) {
    if (!(step > 0.0) || last < first) {
        fail(ErrorCategory::InvalidInput, "grid needs a positive step and last >= first");
    }
    const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = first + static_cast<double>(i) * step;
    }
    return grid;
}

}  // namespace hif::identify
