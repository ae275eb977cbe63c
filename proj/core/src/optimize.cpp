#include "mixadc/optimize.hpp"

#include <cmath>

namespace mixadc {

namespace {

RVec project(const RVec& z, const RVec& lo, const RVec& hi) { return z.cwiseMax(lo).cwiseMin(hi); }

/// Mask of coordinates that are free at z given the gradient g.
Eigen::Array<bool, Eigen::Dynamic, 1> free_set(const RVec& z, const RVec& g, const RVec& lo, const RVec& hi) {
    Eigen::Array<bool, Eigen::Dynamic, 1> f(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const bool at_lo = z(i) <= lo(i) && g(i) > 0.0;
        const bool at_hi = z(i) >= hi(i) && g(i) < 0.0;
        f(i) = !(at_lo || at_hi);
    }
    return f;
}

}  // namespace

BoxResult minimize_box(const Objective& fn, const RVec& x0, const RVec& lower, const RVec& upper,
                       const RVec& scale, const BoxOptions& opts) {
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n || scale.size() != n) {
        throw DimensionError("minimize_box: bound/scale size mismatch");
    }
    if ((lower.array() > upper.array()).any()) throw DomainError("minimize_box: lower > upper");
    if ((scale.array() <= 0.0).any()) throw DomainError("minimize_box: scale must be positive");

    const RVec lo = lower.cwiseQuotient(scale);
    const RVec hi = upper.cwiseQuotient(scale);
    auto eval = [&](const RVec& z, RVec& gz) {
        RVec gx(n);
        const double f = fn(z.cwiseProduct(scale), gx);
        gz = gx.cwiseProduct(scale);
        return f;
    };

    RVec z = project(x0.cwiseQuotient(scale), lo, hi);
    RVec g(n);
    double f = eval(z, g);
    if (!std::isfinite(f)) throw NumericalError("minimize_box: non-finite objective at start");
    RMat h = RMat::Identity(n, n);

    BoxResult res;
    for (int it = 0; it < opts.max_iter; ++it) {
        res.iterations = it + 1;
        const RVec pg = project(z - g, lo, hi) - z;
        if (pg.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
            res.converged = true;
            break;
        }
        const auto fr = free_set(z, g, lo, hi);
        RVec d = -(h * g);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!fr(i)) d(i) = 0.0;
        }
        if (d.dot(g) >= 0.0) {
            h.setIdentity();
            d = -g;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!fr(i)) d(i) = 0.0;
            }
        }

        double step = 1.0;
        bool accepted = false;
        RVec z_new, g_new(n);
        double f_new = f;
        for (int b = 0; b < opts.max_backtracks; ++b) {
            z_new = project(z + step * d, lo, hi);
            f_new = eval(z_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(z_new - z)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (h.isIdentity()) break;
            h.setIdentity();
            continue;
        }
        const RVec s = z_new - z;
        const RVec y = g_new - g;
        const double sy = s.dot(y);
        const double f_old = f;
        z = z_new;
        g = g_new;
        f = f_new;
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const RMat id = RMat::Identity(n, n);
            h = (id - rho * s * y.transpose()) * h * (id - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        if (std::abs(f_old - f) <= opts.f_rel_tol * std::max(1.0, std::abs(f))) {
            res.converged = true;
            break;
        }
    }
    res.x = z.cwiseProduct(scale);
    res.f = f;
    return res;
}

}  // namespace mixadc
