#pragma once

#include <array>
#include <cstddef>

namespace hif {

/// One classical fourth-order Runge-Kutta step of size h for y' = f(t, y).
template <std::size_t N, typename Rhs>
[[nodiscard]] std::array<double, N> rk4_step(const Rhs& f, double t, const std::array<double, N>& y,
                                             double h) {
    auto axpy = [](const std::array<double, N>& base, double a, const std::array<double, N>& k) {
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = base[i] + a * k[i];
        }
        return out;
    };
    const std::array<double, N> k1 = f(t, y);
    const std::array<double, N> k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const std::array<double, N> k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const std::array<double, N> k4 = f(t + h, axpy(y, h, k3));
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

}  // namespace hif
