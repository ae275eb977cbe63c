#pragma once

#include "mixadc/types.hpp"

namespace mixadc {

/// Inverse of a symmetric positive (semi)definite matrix, computed on the
/// Jacobi-equilibrated matrix D^-1/2 F D^-1/2 so that wildly different
/// parameter scales (radians vs amplitudes) do not pollute the result.
struct SymmetricInverse {
    RMat inverse;
    double condition = 0.0;  // of the equilibrated matrix
    bool singular = false;   // non-positive pivot or condition > 1e13
};

SymmetricInverse symmetric_inverse(const RMat& f);

/// Smallest eigenvalue of the symmetric part of `m` after the congruence
/// D m D with D = diag(ref)^-1/2. PSD orderings are invariant under this
/// congruence, and it puts every parameter on a unit scale first.
double min_scaled_eigenvalue(const RMat& m, const RMat& ref);

/// True if `m` is PSD up to the slack 1e-9 * trace/dim, measured in the
/// coordinates of min_scaled_eigenvalue (where the reference has unit
/// diagonal).
bool is_psd_scaled(const RMat& m, const RMat& ref, double rel_slack = 1e-9);

RMat symmetrize(const RMat& m);

}  // namespace mixadc
