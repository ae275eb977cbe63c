#pragma once

#include <functional>

#include "mixadc/types.hpp"

namespace mixadc {

/// Objective returning f(x) and writing the gradient into `grad`.
using Objective = std::function<double(const RVec& x, RVec& grad)>;

struct BoxOptions {
    int max_iter = 200;
    double grad_tol = 1e-6;   // infinity norm of the scaled projected gradient
    double f_rel_tol = 1e-12; // relative change of f between iterations
    int max_backtracks = 40;
};

struct BoxResult {
    RVec x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Box-constrained local minimization by projected BFGS with Armijo
/// backtracking. `scale` holds a typical magnitude per coordinate; the
/// search runs in x / scale. Never returns a point worse than x0.
BoxResult minimize_box(const Objective& fn, const RVec& x0, const RVec& lower, const RVec& upper,
                       const RVec& scale, const BoxOptions& opts = {});

}  // namespace mixadc
