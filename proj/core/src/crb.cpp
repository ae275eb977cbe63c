#include "mixadc/crb.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "mixadc/special_functions.hpp"

namespace mixadc {

namespace {

int num_targets(const Scene& scene) { return static_cast<int>(scene.targets.size()); }

void require_targets(const Scene& scene) {
    scene.validate();
    if (scene.targets.empty()) throw DomainError("CRB: scene must contain at least one target");
}

/// Column-wise Kronecker product: column k is left_k (x) right_k.
CMat khatri_rao(const CMat& left, const CMat& right) {
    CMat out(left.rows() * right.rows(), left.cols());
    for (Eigen::Index k = 0; k < left.cols(); ++k) {
        for (Eigen::Index i = 0; i < left.rows(); ++i) {
            out.col(k).segment(i * right.rows(), right.rows()) = left(i, k) * right.col(k);
        }
    }
    return out;
}

/// Real FIM sum (2/s2) Re{U0 U0^H} over `hp` columns + (1/(pi s2)) weighted
/// one-bit terms over `ob` columns.
RMat combine(const CMat& u, const CVec& weights, const std::vector<int>& hp, const std::vector<int>& ob,
             double sigma2, double onebit_scale) {
    const Eigen::Index p = u.rows();
    RMat f = RMat::Zero(p, p);
    if (!hp.empty()) {
        CMat u0(p, static_cast<Eigen::Index>(hp.size()));
        for (std::size_t i = 0; i < hp.size(); ++i) u0.col(static_cast<Eigen::Index>(i)) = u.col(hp[i]);
        f += (2.0 / sigma2) * (u0 * u0.adjoint()).real();
    }
    if (!ob.empty()) {
        const auto n1 = static_cast<Eigen::Index>(ob.size());
        RMat ur(p, n1), ui(p, n1);
        RVec wr(n1), wi(n1);
        for (Eigen::Index i = 0; i < n1; ++i) {
            const int c = ob[static_cast<std::size_t>(i)];
            ur.col(i) = u.col(c).real();
            ui.col(i) = u.col(c).imag();
            wr(i) = weights(c).real();
            wi(i) = weights(c).imag();
        }
        f += onebit_scale * (ur * wr.asDiagonal() * ur.transpose() + ui * wi.asDiagonal() * ui.transpose());
    }
    return symmetrize(f);
}

std::vector<int> all_rows(int n) {
    std::vector<int> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = i;
    return r;
}

}  // namespace

DerivativeBundle derivative_bundle(const RadarSystem& sys, const Scene& scene) {
    const int k = num_targets(scene);
    DerivativeBundle d{CMat(sys.m_rx(), k), CMat(sys.m_rx(), k), CMat(sys.n_pri(), k),
                       CMat(sys.n_pri(), k), CMat(sys.n_pri(), k), CVec(k)};
    const CMat ct = sys.code().transpose();
    for (int i = 0; i < k; ++i) {
        const auto& t = scene.targets[static_cast<std::size_t>(i)];
        const CVec dop = doppler_vec(sys, t.omega);
        d.ar.col(i) = steering_rx(sys, t.theta);
        d.d_ar.col(i) = steering_rx_deriv(sys, t.theta);
        d.v.col(i) = (ct * steering_tx(sys, t.theta)).cwiseProduct(dop);
        d.d_v_theta.col(i) = (ct * steering_tx_deriv(sys, t.theta)).cwiseProduct(dop);
        for (int n = 0; n < sys.n_pri(); ++n) d.d_v_omega(n, i) = d.v(n, i) * (kJ * static_cast<double>(n));
        d.b(i) = t.amp;
    }
    return d;
}

FimWorkspace fim_workspace(const RadarSystem& sys, const Scene& scene, const CMat& thresholds) {
    require_targets(scene);
    if (thresholds.rows() != sys.m_rx() || thresholds.cols() != sys.n_pri()) {
        throw DimensionError("fim_workspace: thresholds must be M_r x N");
    }
    const int k = num_targets(scene);
    const DerivativeBundle d = derivative_bundle(sys, scene);
    const auto b = d.b.asDiagonal();
    const CMat vb = d.v * b;
    CMat jac(sys.n_samples(), 4 * k);
    jac.leftCols(k) = khatri_rao(vb, d.d_ar) + khatri_rao(d.d_v_theta * b, d.ar);
    jac.middleCols(k, k) = khatri_rao(d.d_v_omega * b, d.ar);
    const CMat kr = khatri_rao(d.v, d.ar);
    jac.middleCols(2 * k, k) = kr;
    jac.rightCols(k) = kJ * kr;

    FimWorkspace ws;
    ws.u = jac.adjoint();
    const double sigma = std::sqrt(scene.noise_var);
    const CVec s = kr * d.b;
    const CVec centered = s - vec(thresholds);
    ws.u_bar.resize(4 * k + 1, sys.n_samples());
    ws.u_bar.topRows(4 * k) = ws.u;
    ws.u_bar.bottomRows(1) = (-centered / sigma).adjoint();
    ws.mu = centered * (std::numbers::sqrt2 / sigma);
    ws.lambda.resize(ws.mu.size());
    ws.lambda_bar.resize(ws.mu.size());
    for (Eigen::Index i = 0; i < ws.mu.size(); ++i) {
        const double r = ws.mu(i).real();
        const double im = ws.mu(i).imag();
        ws.lambda(i) = {special::g_func(r), special::g_func(im)};
        ws.lambda_bar(i) = {std::exp(-r * r), std::exp(-im * im)};
    }
    return ws;
}

RMat fim_hp_blocks(const RadarSystem& sys, const Scene& scene) {
    require_targets(scene);
    const int k = num_targets(scene);
    const DerivativeBundle d = derivative_bundle(sys, scene);
    const CMat bc = d.b.conjugate().asDiagonal();
    const auto b = d.b.asDiagonal();
    const CMat aa = d.ar.adjoint() * d.ar;
    const CMat da_da = d.d_ar.adjoint() * d.d_ar;
    const CMat da_a = d.d_ar.adjoint() * d.ar;
    const CMat a_da = d.ar.adjoint() * d.d_ar;
    const CMat vv = d.v.adjoint() * d.v;

    const CMat f11 = da_da.cwiseProduct(bc * vv * b) + da_a.cwiseProduct(bc * d.v.adjoint() * d.d_v_theta * b) +
                     a_da.cwiseProduct(bc * d.d_v_theta.adjoint() * d.v * b) +
                     aa.cwiseProduct(bc * d.d_v_theta.adjoint() * d.d_v_theta * b);
    const CMat f12 = da_a.cwiseProduct(bc * d.v.adjoint() * d.d_v_omega * b) +
                     aa.cwiseProduct(bc * d.d_v_theta.adjoint() * d.d_v_omega * b);
    const CMat f13 = da_a.cwiseProduct(bc * vv) + aa.cwiseProduct(bc * d.d_v_theta.adjoint() * d.v);
    const CMat f22 = aa.cwiseProduct(bc * d.d_v_omega.adjoint() * d.d_v_omega * b);
    const CMat f23 = aa.cwiseProduct(bc * d.d_v_omega.adjoint() * d.v);
    const CMat f33 = aa.cwiseProduct(vv);

    CMat m(4 * k, 4 * k);
    m << f11, f12, f13, kJ * f13,                                   //
        f12.transpose(), f22, f23, kJ * f23,                        //
        f13.transpose(), f23.transpose(), f33, kJ * f33,            //
        kJ * f13.transpose(), kJ * f23.transpose(), kJ * f33.transpose(), f33;
    return (2.0 / scene.noise_var) * m.real();
}

RMat fim_hp_khatri_rao(const RadarSystem& sys, const Scene& scene) {
    const FimWorkspace ws = fim_workspace(sys, scene, CMat::Zero(sys.m_rx(), sys.n_pri()));
    return symmetrize((2.0 / scene.noise_var) * (ws.u * ws.u.adjoint()).real());
}

RMat fim_onebit(const RadarSystem& sys, const Scene& scene, const CMat& thresholds) {
    const FimWorkspace ws = fim_workspace(sys, scene, thresholds);
    return combine(ws.u, ws.lambda, {}, all_rows(sys.n_samples()), scene.noise_var,
                   1.0 / (kPi * scene.noise_var));
}

RMat fim_onebit_lower(const RadarSystem& sys, const Scene& scene, const CMat& thresholds) {
    const FimWorkspace ws = fim_workspace(sys, scene, thresholds);
    return combine(ws.u, ws.lambda_bar, {}, all_rows(sys.n_samples()), scene.noise_var, 2.0 / scene.noise_var);
}

RMat fim_mixed(const RadarSystem& sys, const Scene& scene, const AdcConfig& adc) {
    const FimWorkspace ws = fim_workspace(sys, scene, adc.thresholds());
    return combine(ws.u, ws.lambda, adc.hp_rows(), adc.onebit_rows(), scene.noise_var,
                   1.0 / (kPi * scene.noise_var));
}

RMat fim_unknown_sigma(Receiver kind, const RadarSystem& sys, const Scene& scene, const AdcConfig& adc) {
    std::vector<int> delta;
    switch (kind) {
        case Receiver::high_precision: delta.assign(static_cast<std::size_t>(sys.m_rx()), 1); break;
        case Receiver::one_bit: delta.assign(static_cast<std::size_t>(sys.m_rx()), 0); break;
        case Receiver::mixed: delta = adc.delta(); break;
    }
    const AdcConfig cfg(delta, adc.thresholds());
    const FimWorkspace ws = fim_workspace(sys, scene, cfg.thresholds());
    const int k = num_targets(scene);
    const double s2 = scene.noise_var;
    // The hp block is block diagonal: phi part from U_0, sigma part 2 * 2NL / sigma^2.
    RMat f = RMat::Zero(4 * k + 1, 4 * k + 1);
    f.topLeftCorner(4 * k, 4 * k) = combine(ws.u, ws.lambda, cfg.hp_rows(), {}, s2, 0.0);
    f(4 * k, 4 * k) = 2.0 * (2.0 * static_cast<double>(cfg.hp_rows().size())) / s2;
    f += combine(ws.u_bar, ws.lambda, {}, cfg.onebit_rows(), s2, 1.0 / (kPi * s2));
    return symmetrize(f);
}

CrbReport crb_from_fim(RMat fim) {
    CrbReport r;
    const SymmetricInverse inv = symmetric_inverse(fim);
    r.fim = std::move(fim);
    r.crb = inv.inverse;
    r.condition = inv.condition;
    r.singular = inv.singular;
    r.root_crb = r.crb.diagonal().cwiseMax(0.0).cwiseSqrt();
    // Information that underflowed to zero leaves inf * 0 in the inverse.
    for (Eigen::Index i = 0; i < r.root_crb.size(); ++i) {
        if (!std::isfinite(r.root_crb(i))) r.root_crb(i) = std::numeric_limits<double>::infinity();
    }
    return r;
}

CrbReport crb_unknown_sigma(const RMat& fim_zeta) {
    const Eigen::Index p = fim_zeta.rows() - 1;
    const RMat fpp = fim_zeta.topLeftCorner(p, p);
    const RVec fps = fim_zeta.topRightCorner(p, 1);
    const double fss = fim_zeta(p, p);
    RMat schur = fpp;
    if (fss > 0.0) schur -= fps * fps.transpose() / fss;
    CrbReport r = crb_from_fim(symmetrize(schur));
    r.fim = fim_zeta;
    return r;
}

CrbReport crb_known_sigma(Receiver kind, const RadarSystem& sys, const Scene& scene, const AdcConfig& adc) {
    switch (kind) {
        case Receiver::high_precision: return crb_from_fim(fim_hp_khatri_rao(sys, scene));
        case Receiver::one_bit: return crb_from_fim(fim_onebit(sys, scene, adc.thresholds()));
        case Receiver::mixed: return crb_from_fim(fim_mixed(sys, scene, adc));
    }
    throw std::logic_error("crb_known_sigma: bad receiver kind");
}

namespace {

/// Gamma = (F0 D^-1 - I)^-1 = D (F0 - D)^-1 and CRB0 + CRB0 Gamma, evaluated
/// in Jacobi-equilibrated coordinates of F0 so that a rank-deficient D is fine.
std::pair<RMat, RMat> loss_bound(const RMat& f0, const RMat& d) {
    const Eigen::Index n = f0.rows();
    RVec s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = 1.0 / std::sqrt(f0(i, i));
    const RMat f0t = s.asDiagonal() * f0 * s.asDiagonal();
    const RMat dt = s.asDiagonal() * d * s.asDiagonal();
    const RMat id = RMat::Identity(n, n);
    const RMat gamma_t = (f0t - dt).fullPivLu().solve(dt).transpose();
    const RMat crb0_t = symmetric_inverse(f0t).inverse;
    const RMat bound_t = symmetrize(crb0_t + crb0_t * gamma_t);
    const RMat gamma = s.cwiseInverse().asDiagonal() * gamma_t * s.asDiagonal();
    return {gamma, s.asDiagonal() * bound_t * s.asDiagonal()};
}

}  // namespace

MixedCrbBounds crb_mixed_bounds(const RadarSystem& sys, const Scene& scene, const AdcConfig& adc) {
    const FimWorkspace ws = fim_workspace(sys, scene, adc.thresholds());
    const double s2 = scene.noise_var;
    const RMat f0 = combine(ws.u, ws.lambda, all_rows(sys.n_samples()), {}, s2, 0.0);
    MixedCrbBounds out;
    out.crb0 = symmetric_inverse(f0).inverse;
    const Eigen::Index p = f0.rows();
    if (adc.onebit_rows().empty()) {
        out.degenerate = true;
        out.lower = out.upper = out.crb0;
        out.gamma_l = out.gamma_u = RMat::Zero(p, p);
        return out;
    }
    const RMat fbar0 = combine(ws.u, ws.lambda, adc.onebit_rows(), {}, s2, 0.0);
    // Lower bound on F_m: hp part exactly, one-bit part by (2/pi) F_1,l.
    const RMat fbar1l = combine(ws.u, ws.lambda_bar, adc.hp_rows(), adc.onebit_rows(), s2, 4.0 / (kPi * s2));
    std::tie(out.gamma_l, out.lower) = loss_bound(f0, ((kPi - 2.0) / kPi) * fbar0);
    std::tie(out.gamma_u, out.upper) = loss_bound(f0, symmetrize(f0 - fbar1l));
    return out;
}

}  // namespace mixadc
