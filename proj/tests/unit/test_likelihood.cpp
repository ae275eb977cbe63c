#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mixadc/likelihood.hpp"

using namespace mixadc;

namespace {

double log_cdf(double x) { return std::log(0.5 * std::erfc(-x / std::sqrt(2.0))); }

struct Setup {
    RadarSystem sys = testutil::small_system(2, 4, 10, 3);
    Scene sc = testutil::random_scene(2, 12, 0.4);
    MeasurementSet meas;
    std::vector<TargetEstimate> est;
    double eta = 1.0 / std::sqrt(0.4);

    explicit Setup(std::vector<int> delta)
        : meas(quantize_mixed(simulate(sys, sc, 99),
                              AdcConfig(std::move(delta), gen_thresholds(4, 10, avg_received_power(sys, sc), 4)))) {
        for (const auto& t : sc.targets) est.push_back({t.theta + 0.01, t.omega - 0.02, eta * t.amp * 0.9});
    }
};

// Direct density of the data given b = beta / eta and sigma = 1 / eta:
// hp samples are CN(b a, sigma^2); one-bit rails are signs of N(., sigma^2/2).
double nll_oracle(const Setup& s) {
    const double sigma = 1.0 / s.eta;
    CVec x = CVec::Zero(s.sys.n_samples());
    for (const auto& t : s.est) x += (t.beta / s.eta) * atom(s.sys, t.theta, t.omega);
    const CVec h = vec(s.meas.adc.thresholds());
    double v = 0.0;
    const auto& hp = s.meas.adc.hp_rows();
    for (std::size_t i = 0; i < hp.size(); ++i) {
        const double r2 = std::norm(s.meas.y0(static_cast<Eigen::Index>(i)) - x(hp[i]));
        v -= std::log(1.0 / (kPi * sigma * sigma)) - r2 / (sigma * sigma);
    }
    const auto& ob = s.meas.adc.onebit_rows();
    const double sd = sigma / std::sqrt(2.0);
    for (std::size_t i = 0; i < ob.size(); ++i) {
        const cplx y = s.meas.y1(static_cast<Eigen::Index>(i));
        const cplx c = x(ob[i]) - h(ob[i]);
        v -= log_cdf(y.real() * c.real() / sd) + log_cdf(y.imag() * c.imag() / sd);
    }
    return v;
}

}  // namespace

TEST_SUITE("likelihood") {

TEST_CASE("nll equals the direct mixed density") {
    for (const auto& d : {std::vector<int>{1, 1, 1, 1}, std::vector<int>{0, 0, 0, 0}, std::vector<int>{1, 0, 1, 0}}) {
        const Setup s(d);
        CHECK(nll(s.est, s.eta, s.meas, s.sys) == doctest::Approx(nll_oracle(s)).epsilon(1e-12));
    }
}

TEST_CASE("nll gradient matches central differences") {
    for (const auto& d : {std::vector<int>{1, 1, 1, 1}, std::vector<int>{0, 0, 0, 0}, std::vector<int>{1, 1, 0, 0}}) {
        const Setup s(d);
        const RVec g = nll_grad(s.est, s.eta, s.meas, s.sys);
        REQUIRE(g.size() == 9);
        const double h = 1e-6;
        for (int p = 0; p < 9; ++p) {
            auto at = [&](double step) {
                auto e = s.est;
                double eta = s.eta;
                if (p == 8) {
                    eta += step;
                } else {
                    auto& t = e[static_cast<std::size_t>(p / 4)];
                    switch (p % 4) {
                        case 0: t.theta += step; break;
                        case 1: t.omega += step; break;
                        case 2: t.beta += step; break;
                        default: t.beta += cplx(0.0, step); break;
                    }
                }
                return nll(e, eta, s.meas, s.sys);
            };
            const double fd = (at(h) - at(-h)) / (2 * h);
            CHECK(g(p) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("sensitivity vector is the conjugate gradient in s") {
    const Setup s({1, 0, 0, 1});
    const MixedLikelihood lik(s.meas);
    const CVec s0 = scaled_signal(s.sys, s.est);
    const auto sens = lik.evaluate(s0, s.eta);
    CHECK(sens.value == doctest::Approx(lik.value(s0, s.eta)).epsilon(1e-13));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    CVec ds(s0.size());
    for (Eigen::Index i = 0; i < ds.size(); ++i) ds(i) = {n01(rng), n01(rng)};
    const double h = 1e-6;
    const double fd = (lik.value(s0 + h * ds, s.eta) - lik.value(s0 - h * ds, s.eta)) / (2 * h);
    CHECK((sens.c.adjoint() * ds)(0).real() == doctest::Approx(fd).epsilon(1e-6));
    const double fde = (lik.value(s0, s.eta + h) - lik.value(s0, s.eta - h)) / (2 * h);
    CHECK(sens.d_eta == doctest::Approx(fde).epsilon(1e-6));
}

TEST_CASE("invalid inputs") {
    const Setup s({1, 0, 0, 0});
    CHECK_THROWS_AS(nll(s.est, 0.0, s.meas, s.sys), DomainError);
    auto bad = s.est;
    bad[0].theta = kPi / 2;
    CHECK_THROWS_AS(nll(bad, s.eta, s.meas, s.sys), DomainError);
    const MixedLikelihood lik(s.meas);
    CHECK_THROWS_AS(lik.value(CVec::Zero(3), 1.0), DimensionError);
}

}  // TEST_SUITE
