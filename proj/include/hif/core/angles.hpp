#pragma once

#include <cmath>
#include <numbers>

namespace hif {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[nodiscard]] constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
[[nodiscard]] constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Wraps an angle in degrees into (-180, 180].
[[nodiscard]] inline double wrap_deg(double deg) noexcept {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) {
        w += 360.0;
    } else if (w > 180.0) {
        w -= 360.0;
    }
    return w;
}

/// Wraps an angle in radians into (-pi, pi].
[[nodiscard]] inline double wrap_rad(double rad) noexcept {
    double w = std::fmod(rad, kTwoPi);
    if (w <= -kPi) {
        w += kTwoPi;
    } else if (w > kPi) {
        w -= kTwoPi;
    }
    return w;
}

/// Smallest absolute separation of two angles in degrees, in [0, 180].
[[nodiscard]] inline double angular_distance_deg(double a, double b) noexcept {
    return std::abs(wrap_deg(a - b));
}

}  // namespace hif
