#include "mixadc/likelihood.hpp"

#include <cmath>
#include <numbers>

#include "mixadc/special_functions.hpp"

namespace mixadc {

void TargetEstimate::validate() const {
    if (!std::isfinite(theta) || !std::isfinite(omega) || !std::isfinite(beta.real()) ||
        !std::isfinite(beta.imag())) {
        throw DomainError("TargetEstimate: non-finite field");
    }
    if (std::abs(theta) >= kPi / 2.0) throw DomainError("TargetEstimate: |theta| must be < pi/2");
}

CVec scaled_signal(const RadarSystem& sys, const std::vector<TargetEstimate>& targets) {
    CVec s = CVec::Zero(sys.n_samples());
    for (const auto& t : targets) {
        t.validate();
        s += t.beta * atom(sys, t.theta, t.omega);
    }
    return s;
}

MixedLikelihood::MixedLikelihood(const MeasurementSet& meas)
    : n_samples_(meas.m_rx() * meas.n_pri()),
      hp_rows_(meas.adc.hp_rows()),
      ob_rows_(meas.adc.onebit_rows()),
      y0_(meas.y0),
      y1_(meas.y1),
      h1_(meas.adc.onebit_thresholds()) {
    if (static_cast<std::size_t>(y0_.size()) != hp_rows_.size() ||
        static_cast<std::size_t>(y1_.size()) != ob_rows_.size()) {
        throw DimensionError("MixedLikelihood: measurement blocks do not match the ADC configuration");
    }
}

void MixedLikelihood::check(const CVec& s, double eta) const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("nll: eta must be positive and finite");
    if (s.size() != n_samples_) throw DimensionError("nll: signal length mismatch");
}

double MixedLikelihood::value(const CVec& s, double eta) const {
    check(s, eta);
    double v = 0.0;
    for (std::size_t i = 0; i < ob_rows_.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const cplx d = s(ob_rows_[i]) - eta * h1_(ii);
        v -= special::log_phi(y1_(ii).real() * std::numbers::sqrt2 * d.real());
        v -= special::log_phi(y1_(ii).imag() * std::numbers::sqrt2 * d.imag());
    }
    const double nl = static_cast<double>(hp_rows_.size());
    for (std::size_t i = 0; i < hp_rows_.size(); ++i) {
        v += std::norm(eta * y0_(static_cast<Eigen::Index>(i)) - s(hp_rows_[i]));
    }
    if (nl > 0) v += -nl * std::log(eta * eta) + nl * std::log(kPi);
    return v;
}

NllSensitivity MixedLikelihood::evaluate(const CVec& s, double eta) const {
    check(s, eta);
    NllSensitivity out;
    out.c = CVec::Zero(n_samples_);
    const double r2 = std::numbers::sqrt2;
    for (std::size_t i = 0; i < ob_rows_.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const cplx y = y1_(ii);
        const cplx d = s(ob_rows_[i]) - eta * h1_(ii);
        const double zr = y.real() * r2 * d.real();
        const double zi = y.imag() * r2 * d.imag();
        out.value -= special::log_phi(zr) + special::log_phi(zi);
        const double cr = special::f_prime(zr) * y.real() * r2;
        const double ci = special::f_prime(zi) * y.imag() * r2;
        out.c(ob_rows_[i]) = {cr, ci};
        out.d_eta -= cr * h1_(ii).real() + ci * h1_(ii).imag();
    }
    const double nl = static_cast<double>(hp_rows_.size());
    for (std::size_t i = 0; i < hp_rows_.size(); ++i) {
        const cplx y = y0_(static_cast<Eigen::Index>(i));
        const cplx r = eta * y - s(hp_rows_[i]);
        out.value += std::norm(r);
        out.c(hp_rows_[i]) = -2.0 * r;
        out.d_eta += 2.0 * (std::conj(r) * y).real();
    }
    if (nl > 0) {
        out.value += -nl * std::log(eta * eta) + nl * std::log(kPi);
        out.d_eta -= 2.0 * nl / eta;
    }
    return out;
}

double nll(const std::vector<TargetEstimate>& targets, double eta, const MeasurementSet& meas,
           const RadarSystem& sys) {
    return MixedLikelihood(meas).value(scaled_signal(sys, targets), eta);
}

RVec nll_grad(const std::vector<TargetEstimate>& targets, double eta, const MeasurementSet& meas,
              const RadarSystem& sys) {
    const NllSensitivity sens = MixedLikelihood(meas).evaluate(scaled_signal(sys, targets), eta);
    const auto k = static_cast<Eigen::Index>(targets.size());
    RVec g(4 * k + 1);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& t = targets[static_cast<std::size_t>(i)];
        const AtomDerivatives a = atom_with_derivatives(sys, t.theta, t.omega);
        g(4 * i) = (sens.c.dot(t.beta * a.d_theta)).real();
        g(4 * i + 1) = (sens.c.dot(t.beta * a.d_omega)).real();
        g(4 * i + 2) = sens.c.dot(a.value).real();
        g(4 * i + 3) = sens.c.dot(kJ * a.value).real();
    }
    g(4 * k) = sens.d_eta;
    return g;
}

}  // namespace mixadc
