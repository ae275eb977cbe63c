#pragma once

#include "mixadc/linalg.hpp"
#include "mixadc/quantizer.hpp"
#include "mixadc/signal_model.hpp"

namespace mixadc {

// Parameter ordering everywhere in this header:
//   phi  = [theta_1..K, omega_1..K, Re b_1..K, Im b_1..K]   (4K)
//   zeta = [phi, sigma]                                     (4K+1)

/// Steering matrices and their analytic derivatives for a scene.
struct DerivativeBundle {
    CMat ar;        // M_r x K
    CMat d_ar;      // M_r x K, d a_r(theta_k) / d theta_k
    CMat v;         // N x K, v(theta_k, omega_k)
    CMat d_v_theta; // N x K
    CMat d_v_omega; // N x K
    CVec b;         // K amplitudes
};

DerivativeBundle derivative_bundle(const RadarSystem& sys, const Scene& scene);

/// Per-sample quantities shared by the FIM constructions. Column i of u is
/// the conjugated gradient of sample i of vec(X) with respect to phi, so
/// that F_0 = (2/sigma^2) Re{U U^H}.
struct FimWorkspace {
    CMat u;           // 4K x N M_r
    CMat u_bar;       // (4K+1) x N M_r, last row conj(-(s - h)/sigma)
    CVec mu;          // (s - h) / (sigma / sqrt 2)
    CVec lambda;      // G(mu_R) + j G(mu_I)
    CVec lambda_bar;  // exp(-mu_R^2) + j exp(-mu_I^2)
};

/// `thresholds` is M_r x N (may be zero).
FimWorkspace fim_workspace(const RadarSystem& sys, const Scene& scene, const CMat& thresholds);

/// High-precision FIM assembled block by block from Hadamard products of
/// the steering Gram matrices.
RMat fim_hp_blocks(const RadarSystem& sys, const Scene& scene);
/// Same FIM as the Gram form (2/sigma^2) Re{U U^H}.
RMat fim_hp_khatri_rao(const RadarSystem& sys, const Scene& scene);

/// One-bit FIM, every receive channel quantized against `thresholds`.
RMat fim_onebit(const RadarSystem& sys, const Scene& scene, const CMat& thresholds);
/// (2/sigma^2)(U_R diag(exp(-mu_R^2)) U_R^T + ...); (2/pi) of it lower-bounds F_1.
RMat fim_onebit_lower(const RadarSystem& sys, const Scene& scene, const CMat& thresholds);

/// Mixed-ADC FIM: hp contribution of the delta rows plus one-bit
/// contribution of the rest.
RMat fim_mixed(const RadarSystem& sys, const Scene& scene, const AdcConfig& adc);

enum class Receiver { high_precision, one_bit, mixed };

/// FIM over zeta (4K+1 square) for unknown noise power.
RMat fim_unknown_sigma(Receiver kind, const RadarSystem& sys, const Scene& scene, const AdcConfig& adc);

struct CrbReport {
    RMat fim;
    RMat crb;
    RVec root_crb;  // +inf where the information underflowed to zero
    double condition = 0.0;
    bool singular = false;
};

/// CRB = F^-1 with diagnostics.
CrbReport crb_from_fim(RMat fim);

/// CRB(phi) from a (4K+1) zeta-FIM via the Schur complement of the sigma entry.
CrbReport crb_unknown_sigma(const RMat& fim_zeta);

/// Convenience: known-sigma CRB for a receiver kind.
CrbReport crb_known_sigma(Receiver kind, const RadarSystem& sys, const Scene& scene, const AdcConfig& adc);

struct MixedCrbBounds {
    RMat crb0;
    RMat lower;    // CRB_0 + CRB_0 Gamma_l
    RMat upper;    // CRB_0 + CRB_0 Gamma_u
    RMat gamma_l;  // [pi/(pi-2) F_0 Fbar_0^-1 - I]^-1
    RMat gamma_u;  // [F_0 (F_0 - Fbar_1l)^-1 - I]^-1
    bool degenerate = false;  // no usable one-bit block; bounds equal CRB_0
};

/// Sandwich bounds lower <= CRB_m <= upper on the mixed-ADC CRB.
MixedCrbBounds crb_mixed_bounds(const RadarSystem& sys, const Scene& scene, const AdcConfig& adc);

}  // namespace mixadc
