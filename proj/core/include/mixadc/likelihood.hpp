#pragma once

#include <vector>

#include "mixadc/quantizer.hpp"
#include "mixadc/signal_model.hpp"

namespace mixadc {

/// One target in the scaled parameterization beta = eta * b, eta = 1/sigma.
struct TargetEstimate {
    double theta = 0.0;
    double omega = 0.0;
    cplx beta{0.0, 0.0};

    void validate() const;
};

/// sum_k beta_k a(theta_k, omega_k) in vec order.
CVec scaled_signal(const RadarSystem& sys, const std::vector<TargetEstimate>& targets);

/// Value and sensitivities of the mixed-ADC negative log-likelihood with
/// respect to the (scaled) noise-free signal s and eta.
struct NllSensitivity {
    double value = 0.0;
    /// d nll = Re{ c^H ds } for a perturbation ds of s.
    CVec c;
    double d_eta = 0.0;
};

/// Negative log-likelihood of a measurement set, evaluated on a candidate
/// scaled signal rather than a target list so that callers can hold part
/// of the signal fixed.
class MixedLikelihood {
public:
    MixedLikelihood(const MeasurementSet& meas);

    int n_samples() const { return n_samples_; }

    double value(const CVec& s, double eta) const;
    NllSensitivity evaluate(const CVec& s, double eta) const;

private:
    void check(const CVec& s, double eta) const;

    int n_samples_;
    std::vector<int> hp_rows_;
    std::vector<int> ob_rows_;
    CVec y0_;
    CVec y1_;
    CVec h1_;
};

double nll(const std::vector<TargetEstimate>& targets, double eta, const MeasurementSet& meas,
           const RadarSystem& sys);

/// Gradient of nll ordered [theta_k, omega_k, Re beta_k, Im beta_k] per
/// target, then eta. Length 4K + 1.
RVec nll_grad(const std::vector<TargetEstimate>& targets, double eta, const MeasurementSet& meas,
              const RadarSystem& sys);

}  // namespace mixadc
