#include "mixadc/mlikes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <boost/math/tools/toms748_solve.hpp>

#include "mixadc/special_functions.hpp"

namespace mixadc {

Acceleration parse_acceleration(const std::string& name) {
    if (name == "none") return Acceleration::none;
    if (name == "nesterov") return Acceleration::nesterov;
    if (name == "listing") return Acceleration::listing;
    throw DomainError("unknown acceleration scheme '" + name + "'");
}

const char* acceleration_name(Acceleration a) {
    switch (a) {
        case Acceleration::none: return "none";
        case Acceleration::nesterov: return "nesterov";
        case Acceleration::listing: return "listing";
    }
    return "?";
}

LogdetWeights majorize_logdet(const CMat& r, const DictionaryOperator& op, const AdcConfig& adc) {
    if (r.rows() != op.rows() || r.cols() != op.rows()) throw DimensionError("majorize_logdet: R size mismatch");
    const Eigen::LLT<CMat> llt(r);
    if (llt.info() != Eigen::Success) throw NumericalError("majorize_logdet: R is not positive definite");
    const CMat q = llt.solve(CMat::Identity(r.rows(), r.cols()));
    LogdetWeights lw;
    lw.w = op.quadratic_forms(q);
    for (int i : adc.hp_rows()) lw.w0_bar += q(i, i).real();
    for (int i : adc.onebit_rows()) lw.w1_bar += q(i, i).real();
    return lw;
}

CVec inner_surrogate_targets(const CVec& a1_alpha, double eta1, const CVec& y1, const CVec& h1) {
    if (a1_alpha.size() != y1.size() || h1.size() != y1.size()) {
        throw DimensionError("inner_surrogate_targets: length mismatch");
    }
    CVec g(y1.size());
    const double s = std::numbers::sqrt2 * eta1;
    for (Eigen::Index i = 0; i < y1.size(); ++i) {
        const cplx d = a1_alpha(i) - h1(i);
        const double yr = y1(i).real();
        const double yi = y1(i).imag();
        const double gr = yr * s * d.real();
        const double gi = yi * s * d.imag();
        g(i) = {yr * (gr - special::f_prime(gr)), yi * (gi - special::f_prime(gi))};
    }
    return g;
}

RVec update_p(const CVec& alpha, const RVec& w) {
    if (alpha.size() != w.size()) throw DimensionError("update_p: length mismatch");
    return alpha.cwiseAbs().cwiseQuotient(w.cwiseSqrt());
}

double update_sigma0(const CVec& residual, double w0_bar, double floor) {
    if (!(w0_bar > 0.0)) throw DomainError("update_sigma0: w0_bar must be positive");
    return std::max(std::sqrt(residual.norm()) / std::pow(w0_bar, 0.25), floor);
}

double eta1_objective(double eta, const CVec& d, const CVec& g, double w1_bar) {
    return eta * eta * (d - g / (std::numbers::sqrt2 * eta)).squaredNorm() + w1_bar / (eta * eta);
}

double update_eta1(const CVec& d, const CVec& g, double w1_bar, double eta_prev, double eta_min, double eta_max) {
    if (!(eta_min > 0.0) || !(eta_max > eta_min)) throw DomainError("update_eta1: bad bounds");
    const double a = d.squaredNorm();
    const double b = std::numbers::sqrt2 * d.dot(g).real();
    const double c = w1_bar;
    if (a == 0.0 && c == 0.0) return eta_prev;
    // The objective is convex in eta > 0; find the root of its derivative.
    auto deriv = [&](double e) { return 2.0 * a * e - b - 2.0 * c / (e * e * e); };
    double eta;
    if (deriv(eta_min) >= 0.0) {
        eta = eta_min;
    } else if (deriv(eta_max) <= 0.0) {
        eta = eta_max;
    } else {
        std::uintmax_t iters = 200;
        const auto br = boost::math::tools::toms748_solve(deriv, eta_min, eta_max,
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
        eta = 0.5 * (br.first + br.second);
    }
    if (eta_prev >= eta_min && eta_prev <= eta_max &&
        eta1_objective(eta_prev, d, g, w1_bar) <= eta1_objective(eta, d, g, w1_bar)) {
        return eta_prev;
    }
    return eta;
}

NesterovStep nesterov_combine(const CVec& g_curr, const CVec& g_prev, double t, Acceleration scheme) {
    if (g_curr.size() != g_prev.size()) throw DimensionError("nesterov_combine: length mismatch");
    NesterovStep st;
    st.t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double coef = (t - 1.0) / st.t_next;
    switch (scheme) {
        case Acceleration::none:
            st.g_tilde = g_curr;
            st.t_next = 1.0;
            break;
        case Acceleration::nesterov: st.g_tilde = g_curr + coef * (g_curr - g_prev); break;
        case Acceleration::listing: st.g_tilde = g_prev + coef * g_curr; break;
    }
    return st;
}

namespace {

/// Measurement blocks and the dictionary, with row bookkeeping.
class Problem {
public:
    Problem(const MeasurementSet& meas, const DictionaryOperator& op)
        : op_(op), adc_(meas.adc), hp_(meas.adc.hp_rows()), ob_(meas.adc.onebit_rows()), y0_(meas.y0),
          y1_(meas.y1), h1_(meas.adc.onebit_thresholds()) {
        if (op.rows() != meas.m_rx() * meas.n_pri()) throw DimensionError("mlikes: dictionary/measurement mismatch");
        if (static_cast<std::size_t>(y0_.size()) != hp_.size() || static_cast<std::size_t>(y1_.size()) != ob_.size()) {
            throw DimensionError("mlikes: measurement blocks do not match the ADC configuration");
        }
    }

    const DictionaryOperator& op() const { return op_; }
    const AdcConfig& adc() const { return adc_; }
    bool has_hp() const { return !hp_.empty(); }
    bool has_ob() const { return !ob_.empty(); }
    const CVec& y0() const { return y0_; }
    const CVec& h1() const { return h1_; }
    const CVec& y1() const { return y1_; }

    CVec pick(const CVec& full, const std::vector<int>& rows) const {
        CVec out(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = full(rows[i]);
        return out;
    }
    CVec hp_part(const CVec& full) const { return pick(full, hp_); }
    CVec ob_part(const CVec& full) const { return pick(full, ob_); }

    RVec noise_diag(double sigma0, double eta1) const {
        RVec d(op_.rows());
        for (int i : hp_) d(i) = sigma0 * sigma0;
        for (int i : ob_) d(i) = 1.0 / (eta1 * eta1);
        return d;
    }

    /// y~ with y0 on hp rows and h1 + g/(sqrt2 eta1) on one-bit rows.
    CVec y_tilde(const CVec& g, double eta1) const {
        CVec y(op_.rows());
        for (std::size_t i = 0; i < hp_.size(); ++i) y(hp_[i]) = y0_(static_cast<Eigen::Index>(i));
        for (std::size_t i = 0; i < ob_.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            y(ob_[i]) = h1_(ii) + g(ii) / (std::numbers::sqrt2 * eta1);
        }
        return y;
    }

    Eigen::LLT<CMat> factor(const RVec& p, double sigma0, double eta1) const {
        CMat r = op_.weighted_gram(p);
        r.diagonal() += noise_diag(sigma0, eta1).cast<cplx>();
        Eigen::LLT<CMat> llt(r);
        if (llt.info() != Eigen::Success) throw NumericalError("mlikes: R lost positive definiteness");
        return llt;
    }

    double neg_log_l1(const CVec& a_alpha, double eta1) const {
        double v = 0.0;
        const double s = std::numbers::sqrt2 * eta1;
        for (std::size_t i = 0; i < ob_.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const cplx d = a_alpha(ob_[i]) - h1_(ii);
            v -= special::log_phi(y1_(ii).real() * s * d.real());
            v -= special::log_phi(y1_(ii).imag() * s * d.imag());
        }
        return v;
    }

    double hp_fit(const CVec& a_alpha, double sigma0) const {
        if (!has_hp()) return 0.0;
        return (hp_part(a_alpha) - y0_).squaredNorm() / (sigma0 * sigma0);
    }

    /// Reference power scale used by the initialization and the sigma0 floor.
    double reference_power() const {
        if (has_hp()) {
            const double v = y0_.squaredNorm() / static_cast<double>(y0_.size());
            if (v > 0.0) return v;
        }
        double m = 0.0;
        for (Eigen::Index i = 0; i < h1_.size(); ++i) {
            m = std::max({m, h1_(i).real() * h1_(i).real(), h1_(i).imag() * h1_(i).imag()});
        }
        return m > 0.0 ? m : 1.0;
    }

    /// hp residual power after removing the strongest single-atom fit.
    double initial_noise_power() const {
        if (!has_hp()) return reference_power();
        CVec full = CVec::Zero(op_.rows());
        RVec mask = RVec::Zero(op_.rows());
        for (std::size_t i = 0; i < hp_.size(); ++i) {
            full(hp_[i]) = y0_(static_cast<Eigen::Index>(i));
            mask(hp_[i]) = 1.0;
        }
        const CVec corr = op_.adjoint(full);
        const RVec n0 = op_.quadratic_forms(mask.cast<cplx>().asDiagonal().toDenseMatrix());
        Eigen::Index best = -1;
        double best_v = 0.0;
        for (Eigen::Index k = 0; k < corr.size(); ++k) {
            if (!(n0(k) > 0.0)) continue;
            const double v = std::norm(corr(k)) / n0(k);
            if (v > best_v) {
                best_v = v;
                best = k;
            }
        }
        const double total = y0_.squaredNorm();
        const double v = (total - best_v) / static_cast<double>(y0_.size());
        return best >= 0 && v > 0.0 ? v : reference_power();
    }

private:
    const DictionaryOperator& op_;
    const AdcConfig& adc_;
    std::vector<int> hp_;
    std::vector<int> ob_;
    CVec y0_;
    CVec y1_;
    CVec h1_;
};

double prior_term(const CVec& alpha, const RVec& p) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        const double a2 = std::norm(alpha(k));
        if (a2 == 0.0) continue;
        v += a2 / p(k);
    }
    return v;
}

double log_det(const Eigen::LLT<CMat>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

double psi_value(const Problem& pb, const SparseEstimate& e, const Eigen::LLT<CMat>& llt) {
    const CVec a_alpha = pb.op().apply(e.alpha);
    return pb.neg_log_l1(a_alpha, e.eta1) + pb.hp_fit(a_alpha, e.sigma0) + prior_term(e.alpha, e.p) + log_det(llt);
}

double surrogate_value(const Problem& pb, const SparseEstimate& e, const LogdetWeights& lw) {
    const CVec a_alpha = pb.op().apply(e.alpha);
    double v = pb.neg_log_l1(a_alpha, e.eta1) + pb.hp_fit(a_alpha, e.sigma0) + prior_term(e.alpha, e.p) +
               lw.w.dot(e.p);
    if (pb.has_hp()) v += lw.w0_bar * e.sigma0 * e.sigma0;
    if (pb.has_ob()) v += lw.w1_bar / (e.eta1 * e.eta1);
    return v;
}

/// One blockwise pass alpha -> p -> sigma0 -> eta1 on the surrogate with
/// extrapolated point g.
SparseEstimate inner_step(const Problem& pb, const SparseEstimate& cur, const Eigen::LLT<CMat>& llt, const CVec& g,
                          const LogdetWeights& lw, const MlikesOptions& opts, double sigma_floor) {
    SparseEstimate next = cur;
    const CVec yt = pb.y_tilde(g, cur.eta1);
    next.alpha = cur.p.cast<cplx>().cwiseProduct(pb.op().adjoint(llt.solve(yt)));
    next.p = update_p(next.alpha, lw.w);
    const CVec a_alpha = pb.op().apply(next.alpha);
    if (pb.has_hp()) next.sigma0 = update_sigma0(pb.hp_part(a_alpha) - pb.y0(), lw.w0_bar, sigma_floor);
    if (pb.has_ob()) {
        next.eta1 = update_eta1(pb.ob_part(a_alpha) - pb.h1(), g, lw.w1_bar, cur.eta1, opts.eta_min, opts.eta_max);
    }
    return next;
}

double rel_change(const RVec& a, const RVec& b) {
    const double nb = b.norm();
    return nb > 0.0 ? (a - b).norm() / nb : (a - b).norm();
}

[[noreturn]] void abort_run(const std::string& why, int outer, const SparseEstimate& e, const std::vector<double>& psi) {
    std::ostringstream os;
    os << "mlikes: " << why << " at outer iteration " << outer << " (sigma0=" << e.sigma0 << ", eta1=" << e.eta1
       << ", max|alpha|=" << (e.alpha.size() ? e.alpha.cwiseAbs().maxCoeff() : 0.0) << ", psi trace:";
    for (double v : psi) os << ' ' << v;
    os << ')';
    throw NumericalError(os.str());
}

}  // namespace

CVec update_alpha(const RVec& p, const RVec& noise, const CVec& y_tilde, const DictionaryOperator& op) {
    if (p.size() != op.cols() || noise.size() != op.rows() || y_tilde.size() != op.rows()) {
        throw DimensionError("update_alpha: size mismatch");
    }
    CMat r = op.weighted_gram(p);
    r.diagonal() += noise.cast<cplx>();
    const Eigen::LLT<CMat> llt(r);
    if (llt.info() != Eigen::Success) throw NumericalError("update_alpha: R is not positive definite");
    return p.cast<cplx>().cwiseProduct(op.adjoint(llt.solve(y_tilde)));
}

double mlikes_objective(const SparseEstimate& est, const MeasurementSet& meas, const DictionaryOperator& op) {
    const Problem pb(meas, op);
    return psi_value(pb, est, pb.factor(est.p, est.sigma0, est.eta1));
}

SparseEstimate mlikes_initial(const MeasurementSet& meas, const DictionaryOperator& op, const MlikesOptions& opts) {
    const Problem pb(meas, op);
    SparseEstimate e;
    e.sigma0 = std::sqrt(pb.initial_noise_power());
    e.eta1 = std::clamp(1.0 / e.sigma0, opts.eta_min, opts.eta_max);
    const CVec g = inner_surrogate_targets(CVec::Zero(meas.y1.size()), e.eta1, pb.y1(), pb.h1());
    const CVec mf = op.adjoint(pb.y_tilde(g, e.eta1)).cwiseQuotient(op.column_norms2().cast<cplx>());
    e.p = mf.cwiseAbs2();
    // A applied to the MF image overshoots the data by roughly cols/rows, which
    // would poison the first one-bit expansion point; start alpha at zero.
    e.alpha = CVec::Zero(mf.size());
    return e;
}

MlikesResult mlikes_run(const MeasurementSet& meas, const DictionaryOperator& op, const MlikesOptions& opts) {
    return mlikes_run(meas, op, mlikes_initial(meas, op, opts), opts);
}

MlikesResult mlikes_run(const MeasurementSet& meas, const DictionaryOperator& op, const SparseEstimate& start,
                        const MlikesOptions& opts) {
    if (opts.max_outer < 0 || opts.max_inner < 1) throw DomainError("mlikes: iteration caps must be positive");
    const Problem pb(meas, op);
    if (start.alpha.size() != op.cols() || start.p.size() != op.cols()) {
        throw DimensionError("mlikes: start estimate has wrong length");
    }
    const double sigma_floor = opts.sigma_floor * std::sqrt(pb.reference_power());

    MlikesResult res;
    SparseEstimate cur = start;
    Eigen::LLT<CMat> llt = pb.factor(cur.p, cur.sigma0, cur.eta1);
    res.psi.push_back(psi_value(pb, cur, llt));
    if (!std::isfinite(res.psi.back())) abort_run("non-finite objective", 0, cur, res.psi);

    for (int m = 0; m < opts.max_outer; ++m) {
        const RVec p_outer = cur.p;
        LogdetWeights lw;
        {
            const CMat q = llt.solve(CMat::Identity(op.rows(), op.rows()));
            lw.w = op.quadratic_forms(q);
            for (int i : pb.adc().hp_rows()) lw.w0_bar += q(i, i).real();
            for (int i : pb.adc().onebit_rows()) lw.w1_bar += q(i, i).real();
        }

        double t = 1.0;
        CVec g_prev;
        for (int i = 0; i < opts.max_inner; ++i) {
            ++res.inner_iterations;
            const CVec g = inner_surrogate_targets(pb.ob_part(op.apply(cur.alpha)), cur.eta1, pb.y1(), pb.h1());
            if (i == 0) g_prev = g;
            const Acceleration scheme = (i == 0 || !pb.has_ob()) ? Acceleration::none : opts.acceleration;
            NesterovStep st = nesterov_combine(g, g_prev, t, scheme);
            if (scheme == Acceleration::none && opts.acceleration != Acceleration::none) {
                st.t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            }
            SparseEstimate next = inner_step(pb, cur, llt, st.g_tilde, lw, opts, sigma_floor);
            if (opts.restart && scheme != Acceleration::none &&
                surrogate_value(pb, next, lw) > surrogate_value(pb, cur, lw)) {
                next = inner_step(pb, cur, llt, g, lw, opts, sigma_floor);
                st.t_next = 1.0;
                ++res.restarts;
            }
            const double rel = rel_change(next.p, cur.p);
            g_prev = g;
            t = st.t_next;
            cur = std::move(next);
            llt = pb.factor(cur.p, cur.sigma0, cur.eta1);
            if (rel < opts.inner_tol) break;
        }

        res.outer_iterations = m + 1;
        res.psi.push_back(psi_value(pb, cur, llt));
        if (!std::isfinite(res.psi.back())) abort_run("non-finite objective", m + 1, cur, res.psi);
        if (rel_change(cur.p, p_outer) < opts.outer_tol) {
            res.converged = true;
            break;
        }
    }
    res.estimate = std::move(cur);
    return res;
}

}  // namespace mixadc
