#include "mixadc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "mixadc/baseline.hpp"
#include "mixadc/rng.hpp"

namespace mixadc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs fn(0..n-1) on a pool of threads. Exceptions are rethrown for the
/// lowest failing index so the error does not depend on scheduling.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, n);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto body = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

RadarSystem make_system(const ExperimentConfig& cfg, std::uint64_t code_seed) {
    const auto& s = cfg.system;
    return RadarSystem(s.m_tx, s.m_rx, s.d_tx, s.d_rx, gen_code(s.m_tx, s.n_pri, code_seed));
}

Scene two_target_scene(const ExperimentConfig& cfg, double r, const Grid& grid) {
    Scene sc;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& t = cfg.scene.targets[k];
        double th = deg2rad(t.theta_deg);
        double om = wrap_phase(t.omega);
        if (cfg.scene.snap_to_grid) {
            th = grid.theta(grid.nearest_theta(th));
            om = grid.omega(grid.nearest_omega(om));
        }
        const double mag = k == 1 ? t.amplitude / r : t.amplitude;
        sc.targets.push_back({th, om, std::polar(mag, t.phase)});
    }
    const double b2 = std::norm(sc.targets[1].amp);
    sc.noise_var = b2 / std::pow(10.0, cfg.scene.snr2_db / 10.0);
    return sc;
}

Receiver receiver_for(const std::vector<int>& delta) {
    const auto l = std::count(delta.begin(), delta.end(), 1);
    if (l == static_cast<long>(delta.size())) return Receiver::high_precision;
    if (l == 0) return Receiver::one_bit;
    return Receiver::mixed;
}

/// eta used to normalize the sparse image and to seed refinement: the
/// one-bit noise parameter when there are sign rows, else 1/sigma0.
double handoff_eta(const SparseEstimate& e, const AdcConfig& adc) {
    return adc.onebit_rows().empty() ? 1.0 / e.sigma0 : e.eta1;
}

struct Detection {
    MbicResult mbic;
    double eta = 1.0;
    std::vector<Target> targets;  // coarse, data scale
};

Detection detect(const SparseEstimate& est, const MeasurementSet& meas, const RadarSystem& sys, const Grid& grid,
                 int k_max) {
    Detection d;
    d.eta = handoff_eta(est, meas.adc);
    const PeakList peaks = pick_peaks(est.alpha * d.eta, grid, k_max);
    d.mbic = mbic_select(peaks, d.eta, meas, sys, grid, k_max);
    const auto k = static_cast<std::size_t>(d.mbic.k_hat);
    for (const auto& t : d.mbic.coarse[k]) d.targets.push_back({t.theta, t.omega, t.beta / d.mbic.eta[k]});
    return d;
}

int count_recovered(const std::vector<Target>& truth, const std::vector<Target>& est, const Grid& grid) {
    const auto m = match_targets(truth, est, grid);
    int n = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (m[i] >= 0 && within_one_cell(truth[i], est[static_cast<std::size_t>(m[i])], grid)) ++n;
    }
    return n;
}

}  // namespace

// ---------------------------------------------------------------- crb sweep

std::vector<CrbSweepRow> run_crb_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const Grid grid(cfg.grid.k_theta, cfg.grid.k_omega);
    const RadarSystem sys = make_system(cfg, derive_seed(cfg.run.seed, Stream::code));
    const std::uint64_t thr_seed = derive_seed(cfg.run.seed, Stream::thresholds);
    std::vector<CrbSweepRow> rows;
    for (double r : cfg.scene.r_values) {
        const Scene scene = two_target_scene(cfg, r, grid);
        const CMat h = gen_thresholds(sys.m_rx(), sys.n_pri(), avg_received_power(sys, scene), thr_seed,
                                      cfg.adc.threshold_levels);
        for (const auto& name : cfg.adc.sweep) {
            const AdcConfig adc(delta_pattern(parse_pattern(name), sys.m_rx()), h);
            const Receiver kind = receiver_for(adc.delta());
            const CrbReport rep = cfg.scene.known_noise
                                      ? crb_known_sigma(kind, sys, scene, adc)
                                      : crb_unknown_sigma(fim_unknown_sigma(kind, sys, scene, adc));
            rows.push_back({r, name, rep.root_crb, rep.singular, rep.condition});
        }
    }
    return rows;
}

// -------------------------------------------------------------- monte carlo

namespace {

struct TrialOutcome {
    RVec sq_err = RVec::Zero(4);  // theta_2, omega_2, Re b_2, Im b_2
    RVec crb = RVec::Zero(4);
    int k_hat = 0;
    bool missed = false;
};

TrialOutcome rmse_trial(const ExperimentConfig& cfg, const Grid& grid, double r, int trial) {
    const std::uint64_t ts = derive_seed(cfg.run.seed, static_cast<std::uint64_t>(trial));
    const RadarSystem sys = make_system(cfg, derive_seed(ts, Stream::code));
    const Scene scene = two_target_scene(cfg, r, grid);
    const CMat x = simulate(sys, scene, derive_seed(ts, Stream::noise));
    const CMat h = gen_thresholds(sys.m_rx(), sys.n_pri(), avg_received_power(sys, scene),
                                  derive_seed(ts, Stream::thresholds), cfg.adc.threshold_levels);
    const AdcConfig adc(configured_delta(cfg), h);
    const MeasurementSet meas = quantize_mixed(x, adc);
    const DictionaryOperator op(sys, grid);

    TrialOutcome out;
    const CrbReport rep = crb_unknown_sigma(fim_unknown_sigma(receiver_for(adc.delta()), sys, scene, adc));
    const int k = 2;
    out.crb << rep.crb(1, 1), rep.crb(k + 1, k + 1), rep.crb(2 * k + 1, 2 * k + 1), rep.crb(3 * k + 1, 3 * k + 1);

    const MlikesResult ml = mlikes_run(meas, op, cfg.run.mlikes);
    const double eta0 = handoff_eta(ml.estimate, adc);
    const PeakList peaks = pick_peaks(ml.estimate.alpha * eta0, grid, cfg.run.k_max);
    if (peaks.empty()) throw NumericalError("rmse trial: sparse image has no peaks");
    const MbicResult mb = mbic_select(peaks, eta0, meas, sys, grid, cfg.run.k_max);
    out.k_hat = mb.k_hat;
    const auto kk = static_cast<std::size_t>(std::max(mb.k_hat, 1));
    const RefineResult ref = cyclic_refine(mb.coarse[kk], mb.eta[kk], meas, sys, grid, cfg.run.refine);
    const std::vector<Target> est = ref.amplitudes();

    const auto match = match_targets(scene.targets, est, grid);
    int j = match[1];
    if (j < 0) {
        out.missed = true;
        double best = 1e300;
        for (std::size_t i = 0; i < est.size(); ++i) {
            const double d = std::hypot((est[i].theta - scene.targets[1].theta) / grid.theta_step(),
                                        wrap_phase(est[i].omega - scene.targets[1].omega) / grid.omega_step());
            if (d < best) {
                best = d;
                j = static_cast<int>(i);
            }
        }
    }
    const Target& e = est[static_cast<std::size_t>(j)];
    const Target& t = scene.targets[1];
    out.sq_err << std::pow(e.theta - t.theta, 2), std::pow(wrap_phase(e.omega - t.omega), 2),
        std::pow(e.amp.real() - t.amp.real(), 2), std::pow(e.amp.imag() - t.amp.imag(), 2);
    return out;
}

}  // namespace

RmseResult run_rmse_mc(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    const Grid grid(cfg.grid.k_theta, cfg.grid.k_omega);
    RmseResult res;
    static const char* names[] = {"theta_2", "omega_2", "b_2R", "b_2I"};
    for (double r : cfg.scene.r_values) {
        std::vector<TrialOutcome> outs(static_cast<std::size_t>(cfg.run.trials));
        parallel_for(cfg.run.trials, cfg.run.workers,
                     [&](int i) { outs[static_cast<std::size_t>(i)] = rmse_trial(cfg, grid, r, i); });
        RVec se = RVec::Zero(4), crb = RVec::Zero(4);
        for (const auto& o : outs) {
            se += o.sq_err;
            crb += o.crb;
            res.k_hat_histogram[r][o.k_hat] += 1;
            if (o.missed) res.misses[r] += 1;
        }
        const double n = static_cast<double>(outs.size());
        for (int p = 0; p < 4; ++p) {
            res.rows.push_back({r, names[p], std::sqrt(se(p) / n), std::sqrt(crb(p) / n), cfg.run.trials});
        }
    }
    res.seconds = seconds_since(t0);
    return res;
}

// ------------------------------------------------------------------ imaging

Scene random_imaging_scene(const ExperimentConfig& cfg, std::uint64_t seed, std::vector<bool>* off_grid) {
    const auto& sc = cfg.scene;
    const Grid grid(cfg.grid.k_theta, cfg.grid.k_omega);
    const double max_th = deg2rad(sc.max_theta_deg);
    std::vector<int> theta_ok;
    for (int k = 0; k < grid.k_theta(); ++k) {
        if (std::abs(grid.theta(k)) + grid.theta_step() / 2.0 <= max_th) theta_ok.push_back(k);
    }
    if (theta_ok.empty()) throw DomainError("imaging scene: no grid angles within max_theta_deg");
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick_t(0, theta_ok.size() - 1);
    std::uniform_int_distribution<int> pick_o(0, grid.k_omega() - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<std::pair<int, int>> cells;
    int attempts = 0;
    while (static_cast<int>(cells.size()) < sc.n_targets) {
        if (++attempts > 1000000) throw DomainError("imaging scene: cannot place targets with the requested separation");
        const int t = theta_ok[pick_t(rng)];
        const int o = pick_o(rng);
        bool ok = true;
        for (const auto& [t2, o2] : cells) {
            const int dw = std::abs(o - o2);
            const int dwc = std::min(dw, grid.k_omega() - dw);
            if (std::max(std::abs(t - t2), dwc) < sc.min_separation_cells) {
                ok = false;
                break;
            }
        }
        if (ok) cells.emplace_back(t, o);
    }

    Scene scene;
    if (off_grid) off_grid->assign(static_cast<std::size_t>(sc.n_targets), false);
    const double ratio = sc.amp_max / sc.amp_min;
    for (int k = 0; k < sc.n_targets; ++k) {
        double mag;
        if (k == 0) {
            mag = sc.amp_max;
        } else if (k == 1) {
            mag = sc.amp_min;
        } else {
            mag = sc.amp_min * std::pow(ratio, unif(rng));
        }
        const double phase = 2.0 * kPi * unif(rng);
        double th = grid.theta(cells[static_cast<std::size_t>(k)].first);
        double om = grid.omega(cells[static_cast<std::size_t>(k)].second);
        if (k >= sc.n_targets - sc.n_off_grid) {
            th += grid.theta_step() / 2.0;
            om = wrap_phase(om + grid.omega_step() / 2.0);
            if (off_grid) (*off_grid)[static_cast<std::size_t>(k)] = true;
        }
        scene.targets.push_back({th, om, std::polar(mag, phase)});
    }
    scene.noise_var = sc.amp_min * sc.amp_min / std::pow(10.0, sc.min_snr_db / 10.0);
    return scene;
}

ImagingRun run_imaging_trial(const ExperimentConfig& cfg, int trial) {
    const Grid grid(cfg.grid.k_theta, cfg.grid.k_omega);
    const std::uint64_t ts = derive_seed(cfg.run.seed, static_cast<std::uint64_t>(trial));
    const RadarSystem sys = make_system(cfg, derive_seed(ts, Stream::code));
    ImagingRun run;
    run.seed = ts;
    run.truth = random_imaging_scene(cfg, derive_seed(ts, Stream::scene), &run.off_grid);
    const CMat x = simulate(sys, run.truth, derive_seed(ts, Stream::noise));
    const CMat h = gen_thresholds(sys.m_rx(), sys.n_pri(), avg_received_power(sys, run.truth),
                                  derive_seed(ts, Stream::thresholds), cfg.adc.threshold_levels);
    const DictionaryOperator op(sys, grid);

    {
        const auto t0 = Clock::now();
        MethodImage mf;
        mf.name = "mf";
        mf.image = matched_filter(vec(x), op);
        mf.recovered = -1;
        mf.seconds = seconds_since(t0);
        run.methods.push_back(std::move(mf));
    }

    const std::vector<std::pair<std::string, std::vector<int>>> methods = {
        {"likes", delta_pattern(AdcPattern::high_precision, sys.m_rx())},
        {"1blikes", delta_pattern(AdcPattern::one_bit, sys.m_rx())},
        {"mlikes", configured_delta(cfg)},
    };
    for (const auto& [name, delta] : methods) {
        const auto t0 = Clock::now();
        const AdcConfig adc(delta, h);
        const MeasurementSet meas = quantize_mixed(x, adc);
        const MlikesResult ml = mlikes_run(meas, op, cfg.run.mlikes);
        MethodImage mi;
        mi.name = name;
        mi.image = Eigen::Map<const RMat>(ml.estimate.alpha.cwiseAbs2().eval().data(), grid.k_theta(), grid.k_omega());
        const Detection det = detect(ml.estimate, meas, sys, grid, cfg.run.k_max);
        mi.detections = det.targets;
        mi.recovered = count_recovered(run.truth.targets, mi.detections, grid);
        if (name == "mlikes" && det.mbic.k_hat > 0) {
            const auto k = static_cast<std::size_t>(det.mbic.k_hat);
            const RefineResult ref = cyclic_refine(det.mbic.coarse[k], det.mbic.eta[k], meas, sys, grid, cfg.run.refine);
            run.refined = ref.amplitudes();
        }
        mi.seconds = seconds_since(t0);
        run.methods.push_back(std::move(mi));
    }

    const auto match = match_targets(run.truth.targets, run.refined, grid);
    for (std::size_t i = 0; i < run.truth.targets.size(); ++i) {
        if (!run.off_grid[i]) continue;
        double err = std::numeric_limits<double>::infinity();
        if (match[i] >= 0) {
            const Target& e = run.refined[static_cast<std::size_t>(match[i])];
            err = std::max(std::abs(e.theta - run.truth.targets[i].theta) / grid.theta_step(),
                           std::abs(wrap_phase(e.omega - run.truth.targets[i].omega)) / grid.omega_step());
        }
        run.off_grid_error_cells.push_back(err);
    }
    return run;
}

ImagingResult run_imaging(const ExperimentConfig& cfg) {
    cfg.validate();
    ImagingResult res;
    res.runs.resize(static_cast<std::size_t>(cfg.run.trials));
    parallel_for(cfg.run.trials, cfg.run.workers,
                 [&](int i) { res.runs[static_cast<std::size_t>(i)] = run_imaging_trial(cfg, i); });
    return res;
}

}  // namespace mixadc
