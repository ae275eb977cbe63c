#include "mixadc/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixadc {

namespace {

bool before(const Peak& a, const Peak& b) {
    if (a.power != b.power) return a.power > b.power;
    if (a.k_theta != b.k_theta) return a.k_theta < b.k_theta;
    return a.k_omega < b.k_omega;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

PeakList pick_peaks(const CVec& alpha, const Grid& grid, int max_k) {
    if (alpha.size() != grid.size()) throw DimensionError("pick_peaks: alpha length must equal grid size");
    if (max_k < 0) throw DomainError("pick_peaks: max_k must be >= 0");
    const int kt = grid.k_theta();
    const int ko = grid.k_omega();
    auto pw = [&](int t, int o) { return std::norm(alpha(grid.column(t, o))); };
    PeakList out;
    for (int o = 0; o < ko; ++o) {
        for (int t = 0; t < kt; ++t) {
            const Peak c{t, o, alpha(grid.column(t, o)), pw(t, o)};
            if (!(c.power > 0.0)) continue;
            bool is_peak = true;
            for (int dt = -1; dt <= 1 && is_peak; ++dt) {
                for (int dw = -1; dw <= 1; ++dw) {
                    if (dt == 0 && dw == 0) continue;
                    const int t2 = t + dt;
                    if (t2 < 0 || t2 >= kt) continue;
                    const int o2 = ((o + dw) % ko + ko) % ko;
                    if (o2 == o && t2 == t) continue;
                    const Peak n{t2, o2, {}, pw(t2, o2)};
                    if (!before(c, n)) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (is_peak) out.push_back(c);
        }
    }
    std::sort(out.begin(), out.end(), before);
    if (static_cast<int>(out.size()) > max_k) out.resize(static_cast<std::size_t>(max_k));
    return out;
}

double mbic_penalty(int k, const RadarSystem& sys) {
    return (6.0 * k + 1.0) * std::log(static_cast<double>(sys.m_rx()) * sys.m_tx() * sys.n_pri());
}

MbicResult mbic_select(const PeakList& peaks, double eta_init, const MeasurementSet& meas, const RadarSystem& sys,
                       const Grid& grid, int k_max) {
    if (!(eta_init > 0.0)) throw DomainError("mbic_select: eta_init must be positive");
    k_max = std::min<int>(k_max, static_cast<int>(peaks.size()));
    const MixedLikelihood lik(meas);
    CMat atoms(sys.n_samples(), k_max);
    for (int k = 0; k < k_max; ++k) {
        const auto& pk = peaks[static_cast<std::size_t>(k)];
        atoms.col(k) = atom(sys, grid.theta(pk.k_theta), grid.omega(pk.k_omega));
    }

    MbicResult res;
    CVec beta_prev;
    double eta = eta_init;
    for (int kk = 0; kk <= k_max; ++kk) {
        // x = [Re beta_1, Im beta_1, ..., eta]
        RVec x0(2 * kk + 1), lo(2 * kk + 1), hi(2 * kk + 1), sc(2 * kk + 1);
        for (int k = 0; k < kk; ++k) {
            // New peaks enter at their image amplitude, rescaled to the current eta.
            const cplx b = k < beta_prev.size() ? beta_prev(k)
                                                : peaks[static_cast<std::size_t>(k)].amplitude * (eta / eta_init);
            x0(2 * k) = b.real();
            x0(2 * k + 1) = b.imag();
            const double s = std::max(std::abs(peaks[static_cast<std::size_t>(k)].amplitude) * (eta / eta_init), 1e-12);
            sc(2 * k) = sc(2 * k + 1) = s;
            lo(2 * k) = lo(2 * k + 1) = -kInf;
            hi(2 * k) = hi(2 * k + 1) = kInf;
        }
        x0(2 * kk) = eta;
        sc(2 * kk) = eta;
        lo(2 * kk) = 1e-8 * eta_init;
        hi(2 * kk) = 1e8 * eta_init;

        const Objective fn = [&](const RVec& x, RVec& grad) {
            CVec beta(kk);
            for (int k = 0; k < kk; ++k) beta(k) = {x(2 * k), x(2 * k + 1)};
            const CVec s = atoms.leftCols(kk) * beta;
            const NllSensitivity sens = lik.evaluate(s, x(2 * kk));
            const CVec proj = atoms.leftCols(kk).adjoint() * sens.c;  // a_k^H c
            for (int k = 0; k < kk; ++k) {
                grad(2 * k) = proj(k).real();
                grad(2 * k + 1) = proj(k).imag();
            }
            grad(2 * kk) = sens.d_eta;
            return sens.value;
        };
        BoxOptions bo;
        bo.max_iter = 500;
        const BoxResult br = minimize_box(fn, x0, lo, hi, sc, bo);

        std::vector<TargetEstimate> est;
        beta_prev.resize(kk);
        for (int k = 0; k < kk; ++k) {
            beta_prev(k) = {br.x(2 * k), br.x(2 * k + 1)};
            const auto& pk = peaks[static_cast<std::size_t>(k)];
            est.push_back({grid.theta(pk.k_theta), grid.omega(pk.k_omega), beta_prev(k)});
        }
        eta = br.x(2 * kk);
        const double score = 2.0 * br.f + mbic_penalty(kk, sys);
        res.score.push_back(score);
        res.nll.push_back(br.f);
        res.coarse.push_back(std::move(est));
        res.eta.push_back(eta);
        if (score < res.score[static_cast<std::size_t>(res.k_hat)]) res.k_hat = kk;
    }
    return res;
}

std::vector<Target> RefineResult::amplitudes() const {
    std::vector<Target> out;
    for (const auto& t : targets) out.push_back({t.theta, wrap_phase(t.omega), t.beta / eta});
    return out;
}

RefineResult cyclic_refine(const std::vector<TargetEstimate>& initial, double eta_init, const MeasurementSet& meas,
                           const RadarSystem& sys, const Grid& grid, const RefineOptions& opts) {
    if (initial.empty()) throw DomainError("cyclic_refine: need at least one target");
    if (!(eta_init > 0.0)) throw DomainError("cyclic_refine: eta_init must be positive");
    const MixedLikelihood lik(meas);
    const auto kc = initial.size();
    const double half_th = grid.theta_step() / 2.0;
    const double half_om = grid.omega_step() / 2.0;
    const double th_lim = kPi / 2.0 - 1e-9;

    RefineResult res;
    res.targets = initial;
    res.eta = eta_init;
    std::vector<CVec> parts(kc);
    CVec total = CVec::Zero(sys.n_samples());
    for (std::size_t k = 0; k < kc; ++k) {
        initial[k].validate();
        parts[k] = initial[k].beta * atom(sys, initial[k].theta, initial[k].omega);
        total += parts[k];
    }
    double current = lik.value(total, res.eta);
    res.nll_trace.push_back(current);

    for (int cyc = 0; cyc < opts.max_cycles; ++cyc) {
        const double at_start = current;
        for (std::size_t k = 0; k < kc; ++k) {
            const bool with_eta = (k == 0);
            const int nv = with_eta ? 5 : 4;
            const CVec offset = total - parts[k];
            const TargetEstimate& t0 = initial[k];
            const TargetEstimate& t = res.targets[k];
            RVec x0(nv), lo(nv), hi(nv), sc(nv);
            const double bs = std::max(std::abs(t.beta), 1e-12);
            x0.head<4>() << t.theta, t.omega, t.beta.real(), t.beta.imag();
            lo.head<4>() << std::max(t0.theta - half_th, -th_lim), t0.omega - half_om, -kInf, -kInf;
            hi.head<4>() << std::min(t0.theta + half_th, th_lim), t0.omega + half_om, kInf, kInf;
            sc.head<4>() << grid.theta_step(), grid.omega_step(), bs, bs;
            if (with_eta) {
                x0(4) = res.eta;
                lo(4) = 1e-8 * eta_init;
                hi(4) = 1e8 * eta_init;
                sc(4) = res.eta;
            }

            const Objective fn = [&](const RVec& x, RVec& grad) {
                const cplx beta{x(2), x(3)};
                const double eta = with_eta ? x(4) : res.eta;
                const AtomDerivatives a = atom_with_derivatives(sys, x(0), x(1));
                const NllSensitivity sens = lik.evaluate(offset + beta * a.value, eta);
                grad(0) = sens.c.dot(beta * a.d_theta).real();
                grad(1) = sens.c.dot(beta * a.d_omega).real();
                const cplx ca = a.value.dot(sens.c);  // a^H c
                grad(2) = ca.real();
                grad(3) = ca.imag();
                if (with_eta) grad(4) = sens.d_eta;
                return sens.value;
            };
            try {
                const BoxResult br = minimize_box(fn, x0, lo, hi, sc, opts.box);
                if (!std::isfinite(br.f) || br.f > current) throw NumericalError("block search did not descend");
                res.targets[k] = {br.x(0), br.x(1), {br.x(2), br.x(3)}};
                if (with_eta) res.eta = br.x(4);
                parts[k] = res.targets[k].beta * atom(sys, br.x(0), br.x(1));
                total = offset + parts[k];
                current = br.f;
            } catch (const std::exception&) {
                res.failed_blocks.push_back(static_cast<int>(k));
            }
        }
        res.cycles = cyc + 1;
        res.nll_trace.push_back(current);
        if (std::abs(at_start - current) <= opts.rel_tol * std::abs(at_start)) {
            res.converged = true;
            break;
        }
    }
    return res;
}

bool within_one_cell(const Target& a, const Target& b, const Grid& grid) {
    return std::abs(a.theta - b.theta) <= grid.theta_step() * (1.0 + 1e-9) &&
           std::abs(wrap_phase(a.omega - b.omega)) <= grid.omega_step() * (1.0 + 1e-9);
}

std::vector<int> match_targets(const std::vector<Target>& truth, const std::vector<Target>& estimates,
                               const Grid& grid) {
    struct Pair {
        double d;
        int i;
        int j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (std::size_t j = 0; j < estimates.size(); ++j) {
            const double dt = (truth[i].theta - estimates[j].theta) / grid.theta_step();
            const double dw = wrap_phase(truth[i].omega - estimates[j].omega) / grid.omega_step();
            pairs.push_back({std::hypot(dt, dw), static_cast<int>(i), static_cast<int>(j)});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    std::vector<int> match(truth.size(), -1);
    std::vector<bool> used(estimates.size(), false);
    for (const auto& p : pairs) {
        if (match[static_cast<std::size_t>(p.i)] >= 0 || used[static_cast<std::size_t>(p.j)]) continue;
        match[static_cast<std::size_t>(p.i)] = p.j;
        used[static_cast<std::size_t>(p.j)] = true;
    }
    return match;
}

}  // namespace mixadc
