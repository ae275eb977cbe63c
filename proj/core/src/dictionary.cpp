#include "mixadc/dictionary.hpp"

namespace mixadc {

DictionaryOperator::DictionaryOperator(const RadarSystem& sys, const Grid& grid)
    : grid_(grid),
      m_rx_(sys.m_rx()),
      n_pri_(sys.n_pri()),
      k_theta_(grid.k_theta()),
      k_omega_(grid.k_omega()),
      ar_(sys.m_rx(), grid.k_theta()),
      u_(sys.n_pri(), grid.k_theta()),
      dft_(sys.n_pri(), grid.k_omega()),
      lag_dft_(2 * sys.n_pri() - 1, grid.k_omega()),
      outer_(grid.k_theta(), sys.m_rx() * sys.m_rx()),
      norms2_(grid.size()) {
    for (int kt = 0; kt < k_theta_; ++kt) {
        const double th = grid.theta(kt);
        ar_.col(kt) = steering_rx(sys, th);
        u_.col(kt) = sys.code().transpose() * steering_tx(sys, th);
        for (int m2 = 0; m2 < m_rx_; ++m2) {
            for (int m1 = 0; m1 < m_rx_; ++m1) outer_(kt, m1 + m_rx_ * m2) = ar_(m1, kt) * std::conj(ar_(m2, kt));
        }
    }
    for (int ko = 0; ko < k_omega_; ++ko) {
        const double om = grid.omega(ko);
        for (int n = 0; n < n_pri_; ++n) dft_(n, ko) = std::polar(1.0, om * n);
        for (int l = -(n_pri_ - 1); l < n_pri_; ++l) lag_dft_(l + n_pri_ - 1, ko) = std::polar(1.0, om * l);
    }
    // |atom|^2 = ||a_r||^2 ||u||^2 (Doppler phases are unimodular).
    for (int ko = 0; ko < k_omega_; ++ko) {
        for (int kt = 0; kt < k_theta_; ++kt) norms2_(grid.column(kt, ko)) = m_rx_ * u_.col(kt).squaredNorm();
    }
}

CVec DictionaryOperator::apply(const CVec& alpha) const {
    if (alpha.size() != cols()) throw DimensionError("DictionaryOperator::apply: size mismatch");
    Eigen::Map<const CMat> a(alpha.data(), k_theta_, k_omega_);
    const CMat t = dft_ * a.transpose();          // N x K_theta
    const CMat w = u_.cwiseProduct(t);            // N x K_theta
    const CMat x = ar_ * w.transpose();           // M_r x N
    return Eigen::Map<const CVec>(x.data(), x.size());
}

CVec DictionaryOperator::adjoint(const CVec& z) const {
    if (z.size() != rows()) throw DimensionError("DictionaryOperator::adjoint: size mismatch");
    Eigen::Map<const CMat> zm(z.data(), m_rx_, n_pri_);
    CMat y = ar_.adjoint() * zm;                  // K_theta x N
    y = y.cwiseProduct(u_.transpose().conjugate());
    const CMat out = y * dft_.conjugate();        // K_theta x K_omega
    return Eigen::Map<const CVec>(out.data(), out.size());
}

CMat DictionaryOperator::weighted_gram(const RVec& p) const {
    if (p.size() != cols()) throw DimensionError("DictionaryOperator::weighted_gram: size mismatch");
    const int n = n_pri_;
    const int m = m_rx_;
    Eigen::Map<const RMat> pm(p.data(), k_theta_, k_omega_);
    // tau(l, theta) = sum_omega p(theta, omega) exp(j omega l)
    const CMat tau = lag_dft_ * pm.transpose().cast<cplx>();  // (2N-1) x K_theta
    // B[(n1 + N n2), theta] = u[n1] conj(u[n2]) tau(n1 - n2)
    CMat b(n * n, k_theta_);
    for (int kt = 0; kt < k_theta_; ++kt) {
        for (int n2 = 0; n2 < n; ++n2) {
            const cplx u2 = std::conj(u_(n2, kt));
            for (int n1 = 0; n1 < n; ++n1) b(n1 + n * n2, kt) = u_(n1, kt) * u2 * tau(n1 - n2 + n - 1, kt);
        }
    }
    const CMat rt = b * outer_;  // (N^2) x (M_r^2)
    CMat r(n * m, n * m);
    for (int n2 = 0; n2 < n; ++n2) {
        for (int m2 = 0; m2 < m; ++m2) {
            for (int n1 = 0; n1 < n; ++n1) {
                for (int m1 = 0; m1 < m; ++m1) r(n1 * m + m1, n2 * m + m2) = rt(n1 + n * n2, m1 + m * m2);
            }
        }
    }
    return r;
}

RVec DictionaryOperator::quadratic_forms(const CMat& q) const {
    const int n = n_pri_;
    const int m = m_rx_;
    if (q.rows() != rows() || q.cols() != rows()) throw DimensionError("quadratic_forms: size mismatch");
    CMat qt(n * n, m * m);
    for (int n2 = 0; n2 < n; ++n2) {
        for (int m2 = 0; m2 < m; ++m2) {
            for (int n1 = 0; n1 < n; ++n1) {
                for (int m1 = 0; m1 < m; ++m1) qt(n1 + n * n2, m1 + m * m2) = q(n1 * m + m1, n2 * m + m2);
            }
        }
    }
    // s[(n1,n2), theta] = sum_{m1,m2} conj(a[m1]) Q a[m2]
    const CMat s = qt * outer_.adjoint();  // N^2 x K_theta
    // c(l, theta) = sum_{n2 - n1 = l} conj(u[n1]) u[n2] s
    CMat c = CMat::Zero(2 * n - 1, k_theta_);
    for (int kt = 0; kt < k_theta_; ++kt) {
        for (int n2 = 0; n2 < n; ++n2) {
            for (int n1 = 0; n1 < n; ++n1) {
                c(n2 - n1 + n - 1, kt) += std::conj(u_(n1, kt)) * u_(n2, kt) * s(n1 + n * n2, kt);
            }
        }
    }
    // w(theta, omega) = sum_l c(l) exp(j omega l)
    const CMat w = c.transpose() * lag_dft_;  // K_theta x K_omega
    RVec out(cols());
    Eigen::Map<RMat>(out.data(), k_theta_, k_omega_) = w.real();
    return out;
}

CVec DictionaryOperator::column(int k) const {
    const int kt = grid_.theta_index(k);
    const int ko = grid_.omega_index(k);
    CVec out(rows());
    for (int nn = 0; nn < n_pri_; ++nn) out.segment(nn * m_rx_, m_rx_) = (u_(nn, kt) * dft_(nn, ko)) * ar_.col(kt);
    return out;
}

}  // namespace mixadc
