#pragma once

namespace mixadc::special {

// Scalar kernels of the one-bit likelihood. With Phi the standard normal
// CDF and f(x) = -ln Phi(x):
//
//   log_phi(x)  = ln Phi(x)
//   f_prime(x)  = f'(x)  = -phi(x) / Phi(x)
//   f_second(x) = f''(x) = f'(x) (f'(x) - x),   0 < f'' < 1
//   g_func(x)   = [1/Phi(x) + 1/Phi(-x)] exp(-x^2),   0 < G <= 4
//
// Below x = -5 everything is evaluated through the Mills ratio
// Q(t)/phi(t) (continued fraction), so ln Phi stays finite and accurate far
// past the point where Phi itself underflows. No argument clamping is done.
// NaN arguments throw DomainError.

double log_phi(double x);
double f_prime(double x);
double f_second(double x);
double g_func(double x);

/// Mills ratio Q(t)/phi(t) for t >= 0.
double mills_ratio(double t);

}  // namespace mixadc::special
