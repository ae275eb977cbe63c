#pragma once

#include "mixadc/signal_model.hpp"

namespace mixadc {

/// Matrix-free form of the angle-Doppler dictionary A.
///
/// Every atom factors as (u_theta .* d(omega)) (x) a_r(theta) with
/// u_theta = C^T a_t(theta), so products with A, A^H, the weighted Gram
/// A diag(p) A^H and the quadratic forms diag(A^H Q A) reduce to small
/// per-angle kernels and DFTs along Doppler. Results match the explicit
/// dictionary() to rounding.
class DictionaryOperator {
public:
    DictionaryOperator(const RadarSystem& sys, const Grid& grid);

    int rows() const { return n_pri_ * m_rx_; }
    int cols() const { return k_theta_ * k_omega_; }
    const Grid& grid() const { return grid_; }

    /// A * alpha.
    CVec apply(const CVec& alpha) const;
    /// A^H * z.
    CVec adjoint(const CVec& z) const;
    /// A diag(p) A^H, Hermitian rows() x rows().
    CMat weighted_gram(const RVec& p) const;
    /// diag(A^H Q A) for Hermitian Q.
    RVec quadratic_forms(const CMat& q) const;
    /// ||a_k||^2 for every column.
    const RVec& column_norms2() const { return norms2_; }
    CVec column(int k) const;

private:
    Grid grid_;
    int m_rx_;
    int n_pri_;
    int k_theta_;
    int k_omega_;
    CMat ar_;      // M_r x K_theta receive steering vectors
    CMat u_;       // N x K_theta, C^T a_t(theta)
    CMat dft_;     // N x K_omega, exp(j n omega)
    CMat lag_dft_; // (2N-1) x K_omega, exp(j l omega), l = -(N-1)..N-1
    CMat outer_;   // K_theta x M_r^2, a_r[m] conj(a_r[m']) at (m + M_r m')
    RVec norms2_;
};

}  // namespace mixadc
