#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mixadc/refine.hpp"

using namespace mixadc;

namespace {

CVec image_with(const Grid& g, std::initializer_list<std::tuple<int, int, double>> cells) {
    CVec a = CVec::Zero(g.size());
    for (const auto& [t, o, v] : cells) a(g.column(t, o)) = v;
    return a;
}

}  // namespace

TEST_SUITE("refine") {

TEST_CASE("peaks are strict 8-neighbourhood maxima") {
    const Grid g(5, 6);
    const auto pk = pick_peaks(image_with(g, {{2, 3, 2.0}, {0, 0, 1.0}, {4, 0, 0.5}}), g, 10);
    REQUIRE(pk.size() == 3);
    CHECK(pk[0].k_theta == 2);
    CHECK(pk[0].k_omega == 3);
    CHECK(pk[0].power == doctest::Approx(4.0));
    CHECK(pk[0].amplitude == cplx(2.0, 0.0));
    // Angle does not wrap: cells 0 and 4 are not neighbours.
    CHECK(pk[1].k_theta == 0);
    CHECK(pk[2].k_theta == 4);
    CHECK(pick_peaks(image_with(g, {{2, 3, 2.0}, {0, 0, 1.0}, {4, 0, 0.5}}), g, 2).size() == 2);
}

TEST_CASE("Doppler wraps around") {
    const Grid g(5, 6);
    const auto pk = pick_peaks(image_with(g, {{1, 0, 1.0}, {2, 5, 2.0}}), g, 10);
    REQUIRE(pk.size() == 1);
    CHECK(pk[0].k_omega == 5);
}

TEST_CASE("plateaus keep the first cell in angle then Doppler order") {
    const Grid g(5, 6);
    const auto pk = pick_peaks(image_with(g, {{2, 2, 1.0}, {3, 2, 1.0}, {3, 3, 1.0}}), g, 10);
    REQUIRE(pk.size() == 1);
    CHECK(pk[0].k_theta == 2);
    CHECK(pk[0].k_omega == 2);
    const auto two = pick_peaks(image_with(g, {{0, 1, 1.0}, {3, 4, 1.0}}), g, 10);
    REQUIRE(two.size() == 2);
    CHECK(two[0].k_theta == 0);
    CHECK_THROWS_AS(pick_peaks(CVec::Zero(4), g, 1), DimensionError);
}

TEST_CASE("mBIC penalty") {
    const auto sys = testutil::small_system(2, 4, 16, 1);
    CHECK(mbic_penalty(0, sys) == doctest::Approx(std::log(128.0)));
    CHECK(mbic_penalty(3, sys) == doctest::Approx(19.0 * std::log(128.0)));
}

TEST_CASE("mBIC picks the true order on clean high-precision data") {
    const auto sys = testutil::small_system(2, 4, 16, 2);
    const Grid g(16, 32);
    Scene sc;
    sc.noise_var = 0.01;
    sc.targets = {{g.theta(4), g.omega(8), {1.0, 0.0}}, {g.theta(11), g.omega(22), {0.0, 0.7}}};
    const AdcConfig adc({1, 1, 1, 1}, CMat::Zero(4, 16));
    const auto meas = quantize_mixed(simulate(sys, sc, 4), adc);
    const double eta = 1.0 / std::sqrt(0.01);
    PeakList peaks = {{4, 8, eta * cplx(1.0, 0.0), 1.0}, {11, 22, eta * cplx(0.0, 0.7), 0.49}, {7, 3, 0.05 * eta, 0.1}};
    const auto r = mbic_select(peaks, eta, meas, sys, g, 3);
    CHECK(r.k_hat == 2);
    CHECK(r.score.size() == 4);
    CHECK(std::abs(r.coarse[2][1].beta / r.eta[2] - cplx(0.0, 0.7)) < 0.05);

    Scene empty;
    empty.noise_var = 0.01;
    const auto noise = quantize_mixed(simulate(sys, empty, 5), adc);
    CHECK(mbic_select(peaks, eta, noise, sys, g, 3).k_hat == 0);
}

TEST_CASE("single-target refinement reaches the likelihood maximum in its box") {
    const auto sys = testutil::small_system(2, 4, 16, 6);
    const Grid g(16, 32);
    const double th = g.theta(5) + 0.31 * g.theta_step(), om = g.omega(12) - 0.27 * g.omega_step();
    Scene sc;
    sc.noise_var = 0.05;
    sc.targets = {{th, om, {0.8, -0.4}}};
    const auto meas = quantize_mixed(simulate(sys, sc, 8), AdcConfig({1, 1, 1, 1}, CMat::Zero(4, 16)));
    const double eta0 = 1.0 / std::sqrt(0.05);
    const auto r = cyclic_refine({{g.theta(5), g.omega(12), eta0 * cplx(0.8, -0.4)}}, eta0, meas, sys, g);
    CHECK(r.failed_blocks.empty());
    for (std::size_t i = 1; i < r.nll_trace.size(); ++i) CHECK(r.nll_trace[i] <= r.nll_trace[i - 1]);

    // With one target and Gaussian data the ML position maximizes |a^H y|^2 / ||a||^2.
    const CVec y = meas.y0;
    double bt = 0.0, bo = 0.0, bv = -1.0;
    const int n = 300;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double t = g.theta(5) + (2.0 * i / n - 1.0) * g.theta_step() / 2;
            const double o = g.omega(12) + (2.0 * j / n - 1.0) * g.omega_step() / 2;
            const CVec a = atom(sys, t, o);
            const double v = std::norm(a.dot(y)) / a.squaredNorm();
            if (v > bv) {
                bv = v;
                bt = t;
                bo = o;
            }
        }
    }
    CHECK(std::abs(r.targets[0].theta - bt) < 2.0 * g.theta_step() / n);
    CHECK(std::abs(r.targets[0].omega - bo) < 2.0 * g.omega_step() / n);
    const auto amps = r.amplitudes();
    CHECK(std::abs(amps[0].amp - cplx(0.8, -0.4)) < 0.1);
    CHECK_THROWS_AS(cyclic_refine({}, 1.0, meas, sys, g), DomainError);
}

TEST_CASE("one-bit refinement descends") {
    const auto sys = testutil::small_system(2, 4, 16, 6);
    const Grid g(16, 32);
    Scene sc;
    sc.noise_var = 0.2;
    sc.targets = {{g.theta(3) + 0.02, g.omega(4), {1.0, 0.0}}, {g.theta(12), g.omega(20) + 0.05, {0.0, 0.6}}};
    const CMat thr = gen_thresholds(4, 16, avg_received_power(sys, sc), 2);
    const auto meas = quantize_mixed(simulate(sys, sc, 8), AdcConfig({1, 0, 0, 0}, thr));
    const double eta0 = 1.0 / std::sqrt(0.2);
    const auto r = cyclic_refine({{g.theta(3), g.omega(4), eta0}, {g.theta(12), g.omega(20), eta0 * cplx(0, 0.6)}}, eta0,
                                 meas, sys, g);
    CHECK(r.nll_trace.back() < r.nll_trace.front());
    for (std::size_t i = 1; i < r.nll_trace.size(); ++i) CHECK(r.nll_trace[i] <= r.nll_trace[i - 1]);
    for (std::size_t k = 0; k < 2; ++k) CHECK(within_one_cell(r.amplitudes()[k], sc.targets[k], g));
}

TEST_CASE("greedy matching and the one-cell test") {
    const Grid g(10, 20);
    const std::vector<Target> truth = {{0.0, 0.0, {}}, {0.5, 1.0, {}}, {-0.5, -3.1, {}}};
    const std::vector<Target> est = {{0.49, 1.02, {}}, {-0.5, 3.1, {}}, {0.01, 0.0, {}}};
    const auto m = match_targets(truth, est, g);
    CHECK(m == std::vector<int>{2, 0, 1});
    CHECK(within_one_cell(truth[2], est[1], g));
    CHECK_FALSE(within_one_cell(truth[0], {g.theta_step() * 1.1, 0.0, {}}, g));
    CHECK(match_targets(truth, {}, g) == std::vector<int>{-1, -1, -1});
}

}  // TEST_SUITE
