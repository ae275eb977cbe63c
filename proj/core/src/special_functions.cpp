#include "mixadc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mixadc/types.hpp"

namespace mixadc::special {

namespace {

constexpr double kTailSwitch = -5.0;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void check(double x, const char* what) {
    if (std::isnan(x)) throw DomainError(std::string(what) + ": NaN argument");
}

}  // namespace

double mills_ratio(double t) {
    if (t < 0.0) throw DomainError("mills_ratio: t must be >= 0");
    if (std::isinf(t)) return 0.0;
    if (t < 5.0) {
        // Direct form is accurate where erfc does not underflow.
        const double q = 0.5 * std::erfc(t / std::numbers::sqrt2);
        return q / std::exp(-0.5 * t * t - kLogSqrt2Pi);
    }
    // Modified Lentz for t + 1/(t + 2/(t + 3/(t + ...))); ratio is 1/that.
    constexpr double tiny = 1e-300;
    double f = t;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 5000; ++k) {
        d = t + k * d;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = t + k / c;
        if (std::abs(c) < tiny) c = tiny;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

double log_phi(double x) {
    check(x, "log_phi");
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    if (x == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
    if (x < kTailSwitch) return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio(-x));
    if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
    return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

double f_prime(double x) {
    check(x, "f_prime");
    if (x == -std::numeric_limits<double>::infinity()) return x;
    if (x < kTailSwitch) return -1.0 / mills_ratio(-x);
    const double pdf = std::exp(-0.5 * x * x - kLogSqrt2Pi);
    const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
    return -pdf / cdf;
}

double f_second(double x) {
    check(x, "f_second");
    if (x < kTailSwitch) {
        const double t = -x;
        const double inv_m = 1.0 / mills_ratio(t);
        // f' - x = t - 1/M(t)
        return inv_m * (inv_m - t);
    }
    const double fp = f_prime(x);
    return fp * (fp - x);
}

double g_func(double x) {
    check(x, "g_func");
    if (std::isinf(x)) return 0.0;
    const double e = -x * x;
    return std::exp(e - log_phi(x)) + std::exp(e - log_phi(-x));
}

}  // namespace mixadc::special
