#include "mixadc/linalg.hpp"

#include <cmath>
#include <limits>

namespace mixadc {

RMat symmetrize(const RMat& m) { return 0.5 * (m + m.transpose()); }

namespace {

RVec inv_sqrt_diag(const RMat& ref) {
    RVec d(ref.rows());
    for (Eigen::Index i = 0; i < ref.rows(); ++i) {
        const double v = std::abs(ref(i, i));
        d(i) = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
    }
    return d;
}

}  // namespace

SymmetricInverse symmetric_inverse(const RMat& f) {
    SymmetricInverse out;
    const Eigen::Index n = f.rows();
    if (n == 0) return out;
    const RVec d = inv_sqrt_diag(f);
    const RMat g = symmetrize(d.asDiagonal() * f * d.asDiagonal());
    Eigen::SelfAdjointEigenSolver<RMat> eig(g);
    const RVec& ev = eig.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    out.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    out.singular = !(lo > 0.0) || out.condition > 1e13;
    RVec inv_ev(n);
    for (Eigen::Index i = 0; i < n; ++i) inv_ev(i) = ev(i) > 0.0 ? 1.0 / ev(i) : std::numeric_limits<double>::infinity();
    const RMat gi = eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();
    out.inverse = symmetrize(d.asDiagonal() * gi * d.asDiagonal());
    return out;
}

double min_scaled_eigenvalue(const RMat& m, const RMat& ref) {
    const RVec d = inv_sqrt_diag(ref);
    const RMat s = symmetrize(d.asDiagonal() * m * d.asDiagonal());
    return Eigen::SelfAdjointEigenSolver<RMat>(s, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

bool is_psd_scaled(const RMat& m, const RMat& ref, double rel_slack) {
    // ref has unit diagonal after scaling, so trace/dim = 1.
    return min_scaled_eigenvalue(m, ref) >= -rel_slack;
}

}  // namespace mixadc
