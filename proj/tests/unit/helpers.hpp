#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "mixadc/signal_model.hpp"

namespace testutil {

using namespace mixadc;

inline RadarSystem small_system(int m_tx, int m_rx, int n, std::uint64_t seed, double d_tx = -1.0) {
    return RadarSystem(m_tx, m_rx, d_tx > 0 ? d_tx : m_rx * 0.5, 0.5, gen_code(m_tx, n, seed));
}

/// K targets with distinct angles in (-60, 60) deg and amplitudes of order 1.
inline Scene random_scene(int k, std::uint64_t seed, double noise_var = 0.1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Scene sc;
    for (int i = 0; i < k; ++i) {
        const double th = deg2rad(-60.0 + 120.0 * (i + 0.5 + 0.3 * u(rng)) / k);
        sc.targets.push_back({th, 2.5 * u(rng), std::polar(0.5 + 0.5 * std::abs(u(rng)), kPi * u(rng))});
    }
    sc.noise_var = noise_var;
    return sc;
}

/// Central difference of a vector-valued function of one scalar.
template <typename F>
auto central_diff(F&& f, double x, double h) {
    return ((f(x + h) - f(x - h)) / (2.0 * h)).eval();
}

template <typename A, typename B>
double rel_err(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    const double s = std::max(a.norm(), b.norm());
    return s > 0 ? (a - b).norm() / s : 0.0;
}

/// Golden-section minimum of a unimodal f on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (std::abs(a) + std::abs(b) + 1e-300)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace testutil
