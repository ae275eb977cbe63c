#pragma once

#include <string>
#include <vector>

#include "mixadc/dictionary.hpp"
#include "mixadc/quantizer.hpp"

namespace mixadc {

/// Sparse angle-Doppler spectrum and noise parameters. alpha is on the
/// amplitude scale of the data (not multiplied by eta1).
struct SparseEstimate {
    CVec alpha;
    RVec p;
    double sigma0 = 1.0;
    double eta1 = 1.0;
};

/// How the inner surrogate point g is extrapolated.
///   none:     plain MM.
///   nesterov: g~ = g_i + ((t_i - 1)/t_{i+1}) (g_i - g_{i-1}).
///   listing:  g~ = g_{i-1} + ((t_{i-1} - 1)/t_i) g_i, the variant written in
///             the algorithm table.
enum class Acceleration { none, nesterov, listing };

Acceleration parse_acceleration(const std::string& name);
const char* acceleration_name(Acceleration a);

struct MlikesOptions {
    int max_outer = 50;
    int max_inner = 10;
    double outer_tol = 1e-4;  // relative change of p
    double inner_tol = 1e-4;
    Acceleration acceleration = Acceleration::nesterov;
    bool restart = true;       // fall back to the plain step when the surrogate increases
    double eta_min = 1e-6;
    double eta_max = 1e6;
    double sigma_floor = 1e-8;  // relative to sqrt of the reference power
};

struct MlikesResult {
    SparseEstimate estimate;
    std::vector<double> psi;  // objective at the start and after each outer iteration
    int outer_iterations = 0;
    int inner_iterations = 0;
    int restarts = 0;
    bool converged = false;
};

/// Tangent-plane weights of ln|R|: w_k = a_k^H R^-1 a_k and the sums of
/// diag(R^-1) over high-precision (w0_bar) and one-bit (w1_bar) rows.
struct LogdetWeights {
    RVec w;
    double w0_bar = 0.0;
    double w1_bar = 0.0;
};

LogdetWeights majorize_logdet(const CMat& r, const DictionaryOperator& op, const AdcConfig& adc);

/// g = y_R u_R + j y_I u_I with u = gamma - f'(gamma) and
/// gamma = y sqrt2 eta1 (A_1 alpha - h_1) taken per real/imaginary part.
CVec inner_surrogate_targets(const CVec& a1_alpha, double eta1, const CVec& y1, const CVec& h1);

/// P A^H (A P A^H + diag(noise))^-1 y~.
CVec update_alpha(const RVec& p, const RVec& noise, const CVec& y_tilde, const DictionaryOperator& op);

/// p_k = |alpha_k| / sqrt(w_k).
RVec update_p(const CVec& alpha, const RVec& w);

/// sigma0 = sqrt(||r||) / w0_bar^(1/4), not below `floor`.
double update_sigma0(const CVec& residual, double w0_bar, double floor = 0.0);

/// eta^2 ||d - g / (sqrt2 eta)||^2 + w1_bar / eta^2 with d = A_1 alpha - h_1.
double eta1_objective(double eta, const CVec& d, const CVec& g, double w1_bar);

/// Minimizer of eta1_objective over [eta_min, eta_max]; returns eta_prev if
/// that is no worse.
double update_eta1(const CVec& d, const CVec& g, double w1_bar, double eta_prev, double eta_min, double eta_max);

struct NesterovStep {
    CVec g_tilde;
    double t_next = 1.0;
};

NesterovStep nesterov_combine(const CVec& g_curr, const CVec& g_prev, double t,
                              Acceleration scheme = Acceleration::nesterov);

/// Psi = -ln L_1 + ||A_0 alpha - y_0||^2 / sigma0^2 + sum |alpha|^2/p + ln|R|.
double mlikes_objective(const SparseEstimate& est, const MeasurementSet& meas, const DictionaryOperator& op);

/// Matched-filter start used by mlikes_run.
SparseEstimate mlikes_initial(const MeasurementSet& meas, const DictionaryOperator& op, const MlikesOptions& opts = {});

MlikesResult mlikes_run(const MeasurementSet& meas, const DictionaryOperator& op, const MlikesOptions& opts = {});
MlikesResult mlikes_run(const MeasurementSet& meas, const DictionaryOperator& op, const SparseEstimate& start,
                        const MlikesOptions& opts);

}  // namespace mixadc
