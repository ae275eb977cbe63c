#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mixadc/crb.hpp"
#include "mixadc/likelihood.hpp"
#include "mixadc/mlikes.hpp"
#include "mixadc/refine.hpp"
#include "mixadc/special_functions.hpp"

namespace mixadc::tools {

namespace {

RadarSystem small_system(std::uint64_t seed) { return RadarSystem(2, 4, 2.0, 0.5, gen_code(2, 12, seed)); }

bool g_at_zero() { return std::abs(special::g_func(0.0) - 4.0) < 1e-12; }

bool fim_routes_agree() {
    const RadarSystem sys = small_system(7);
    Scene sc{{{0.2, 0.7, {0.8, 0.3}}, {-0.5, -1.9, {0.1, -0.6}}}, 0.05};
    const RMat a = fim_hp_blocks(sys, sc);
    const RMat b = fim_hp_khatri_rao(sys, sc);
    return (a - b).norm() <= 1e-10 * b.norm();
}

bool gradient_matches() {
    const RadarSystem sys = small_system(11);
    Scene sc{{{0.3, 1.1, {1.0, 0.5}}}, 0.2};
    const CMat x = simulate(sys, sc, 5);
    const CMat h = gen_thresholds(4, 12, avg_received_power(sys, sc), 6);
    const MeasurementSet meas = quantize_mixed(x, AdcConfig(delta_pattern(AdcPattern::mixed1, 4), h));
    std::vector<TargetEstimate> t{{0.28, 1.05, {1.8, 1.2}}};
    const double eta = 2.1;
    const RVec g = nll_grad(t, eta, meas, sys);
    const double step = 1e-6;
    RVec fd(5);
    for (int i = 0; i < 5; ++i) {
        auto shifted = [&](double d) {
            auto tt = t;
            double e = eta;
            if (i == 0) tt[0].theta += d;
            if (i == 1) tt[0].omega += d;
            if (i == 2) tt[0].beta += d;
            if (i == 3) tt[0].beta += cplx(0.0, d);
            if (i == 4) e += d;
            return nll(tt, e, meas, sys);
        };
        fd(i) = (shifted(step) - shifted(-step)) / (2 * step);
    }
    return (g - fd).norm() <= 1e-5 * std::max(1.0, g.norm());
}

bool mlikes_finds_target() {
    const RadarSystem sys = small_system(3);
    const Grid grid(16, 24);
    const int col = grid.column(11, 5);
    Scene sc{{{grid.theta(11), grid.omega(5), {1.0, 1.0}}}, 0.01};
    const CMat x = simulate(sys, sc, 9);
    const CMat h = gen_thresholds(4, 12, avg_received_power(sys, sc), 10);
    const MeasurementSet meas = quantize_mixed(x, AdcConfig(delta_pattern(AdcPattern::mixed1, 4), h));
    const DictionaryOperator op(sys, grid);
    const MlikesResult r = mlikes_run(meas, op);
    Eigen::Index best = 0;
    r.estimate.alpha.cwiseAbs().maxCoeff(&best);
    return best == col;
}

}  // namespace

bool run_selftest(std::ostream& out) {
    const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
        {"G(0) = 4", g_at_zero},
        {"FIM block and Gram routes agree", fim_routes_agree},
        {"likelihood gradient matches finite differences", gradient_matches},
        {"mLIKES peak at the true grid cell", mlikes_finds_target},
    };
    bool all = true;
    for (const auto& [name, fn] : checks) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            out << "  error: " << e.what() << '\n';
        }
        out << (ok ? "PASS " : "FAIL ") << name << '\n';
        all = all && ok;
    }
    return all;
}

}  // namespace mixadc::tools
