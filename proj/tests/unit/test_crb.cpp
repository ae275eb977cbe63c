#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mixadc/crb.hpp"

using namespace mixadc;
using testutil::rel_err;

namespace {

double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
double cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<Target> perturbed(const Scene& sc, int p, double h) {
    std::vector<Target> t = sc.targets;
    const int k = static_cast<int>(t.size());
    const int which = p / k, i = p % k;
    switch (which) {
        case 0: t[i].theta += h; break;
        case 1: t[i].omega += h; break;
        case 2: t[i].amp += h; break;
        default: t[i].amp += cplx(0.0, h); break;
    }
    return t;
}

// d vec(X) / d phi by central differences, one column per parameter.
CMat numeric_jacobian(const RadarSystem& sys, const Scene& sc) {
    const int np = 4 * static_cast<int>(sc.targets.size());
    CMat j(sys.n_samples(), np);
    const double h = 1e-6;
    for (int p = 0; p < np; ++p) {
        j.col(p) = (noise_free_signal(sys, perturbed(sc, p, h)) - noise_free_signal(sys, perturbed(sc, p, -h))) /
                   (2.0 * h);
    }
    return j;
}

// Fisher information of independent complex Gaussian (hp) and sign
// (one-bit) samples, written out rail by rail from first principles.
// With `with_sigma` the last parameter is the noise standard deviation.
RMat brute_fim(const RadarSystem& sys, const Scene& sc, const AdcConfig& adc, bool with_sigma) {
    const CMat j = numeric_jacobian(sys, sc);
    const CVec s = noise_free_signal(sys, sc.targets);
    const CVec h = vec(adc.thresholds());
    const double sigma = std::sqrt(sc.noise_var);
    const int np = static_cast<int>(j.cols());
    const int nz = np + (with_sigma ? 1 : 0);
    RMat f = RMat::Zero(nz, nz);
    for (int r : adc.hp_rows()) {
        for (int rail = 0; rail < 2; ++rail) {
            RVec g = RVec::Zero(nz);
            for (int p = 0; p < np; ++p) g(p) = rail == 0 ? j(r, p).real() : j(r, p).imag();
            // Real rail ~ N(s_R, sigma^2/2).
            f += (2.0 / sc.noise_var) * g * g.transpose();
        }
        if (with_sigma) f(np, np) += 4.0 / sc.noise_var;
    }
    for (int r : adc.onebit_rows()) {
        for (int rail = 0; rail < 2; ++rail) {
            const double c = rail == 0 ? (s(r) - h(r)).real() : (s(r) - h(r)).imag();
            const double mu = c * std::sqrt(2.0) / sigma;
            RVec g = RVec::Zero(nz);
            for (int p = 0; p < np; ++p) g(p) = (rail == 0 ? j(r, p).real() : j(r, p).imag()) * std::sqrt(2.0) / sigma;
            if (with_sigma) g(np) = -mu / sigma;
            const double w = pdf(mu) * pdf(mu) / (cdf(mu) * cdf(-mu));
            f += w * g * g.transpose();
        }
    }
    return f;
}

struct Fixture {
    RadarSystem sys = testutil::small_system(2, 4, 12, 31);
    Scene sc = testutil::random_scene(2, 8, 0.6);
    CMat thr;
    Fixture() { thr = gen_thresholds(4, 12, avg_received_power(sys, sc), 5); }
    AdcConfig adc(std::vector<int> d) const { return AdcConfig(std::move(d), thr); }
};

}  // namespace

TEST_SUITE("crb") {

TEST_CASE("derivative bundle matches finite differences") {
    const Fixture fx;
    const auto db = derivative_bundle(fx.sys, fx.sc);
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
        const auto& t = fx.sc.targets[static_cast<std::size_t>(k)];
        CHECK(rel_err(db.ar.col(k), steering_rx(fx.sys, t.theta)) < 1e-14);
        const CVec dar =
            testutil::central_diff([&](double x) { return steering_rx(fx.sys, x); }, t.theta, h);
        CHECK(rel_err(db.d_ar.col(k), dar) < 1e-8);
        const CVec dvt = testutil::central_diff(
            [&](double x) { return slow_time_response(fx.sys, x, t.omega); }, t.theta, h);
        CHECK(rel_err(db.d_v_theta.col(k), dvt) < 1e-8);
        const CVec dvo = testutil::central_diff(
            [&](double x) { return slow_time_response(fx.sys, t.theta, x); }, t.omega, h);
        CHECK(rel_err(db.d_v_omega.col(k), dvo) < 1e-8);
        CHECK(db.b(k) == t.amp);
    }
}

TEST_CASE("hp FIM: block route, Gram route and brute force agree") {
    const Fixture fx;
    const RMat blocks = fim_hp_blocks(fx.sys, fx.sc);
    const RMat gram = fim_hp_khatri_rao(fx.sys, fx.sc);
    CHECK(rel_err(blocks, gram) < 1e-12);
    CHECK(rel_err(gram, brute_fim(fx.sys, fx.sc, fx.adc({1, 1, 1, 1}), false)) < 1e-7);
}

TEST_CASE("one-bit and mixed FIMs match the probit Fisher information") {
    const Fixture fx;
    CHECK(rel_err(fim_onebit(fx.sys, fx.sc, fx.thr), brute_fim(fx.sys, fx.sc, fx.adc({0, 0, 0, 0}), false)) < 1e-7);
    for (const auto& d : {std::vector<int>{1, 0, 0, 0}, std::vector<int>{0, 1, 1, 0}}) {
        const AdcConfig adc = fx.adc(d);
        CHECK(rel_err(fim_mixed(fx.sys, fx.sc, adc), brute_fim(fx.sys, fx.sc, adc, false)) < 1e-7);
    }
}

TEST_CASE("unknown-sigma FIM matches brute force for every receiver") {
    const Fixture fx;
    const AdcConfig mixed = fx.adc({1, 1, 0, 0});
    CHECK(rel_err(fim_unknown_sigma(Receiver::high_precision, fx.sys, fx.sc, mixed),
                  brute_fim(fx.sys, fx.sc, fx.adc({1, 1, 1, 1}), true)) < 1e-7);
    CHECK(rel_err(fim_unknown_sigma(Receiver::one_bit, fx.sys, fx.sc, mixed),
                  brute_fim(fx.sys, fx.sc, fx.adc({0, 0, 0, 0}), true)) < 1e-7);
    CHECK(rel_err(fim_unknown_sigma(Receiver::mixed, fx.sys, fx.sc, mixed), brute_fim(fx.sys, fx.sc, mixed, true)) <
          1e-7);
}

TEST_CASE("information orderings") {
    const Fixture fx;
    const RMat f0 = fim_hp_khatri_rao(fx.sys, fx.sc);
    const RMat f1 = fim_onebit(fx.sys, fx.sc, fx.thr);
    const RMat f1l = fim_onebit_lower(fx.sys, fx.sc, fx.thr);
    const RMat fm = fim_mixed(fx.sys, fx.sc, fx.adc({1, 1, 0, 0}));
    CHECK(is_psd_scaled(f0 - fm, f0));
    CHECK(is_psd_scaled(fm - f1, f0));
    CHECK(is_psd_scaled(f1 - (2.0 / kPi) * f1l, f0));
    // At most 2/pi of the hp information survives sign quantization.
    CHECK(is_psd_scaled((2.0 / kPi) * f0 - f1, f0));
}

TEST_CASE("unknown sigma never lowers the bound") {
    const Fixture fx;
    const AdcConfig adc = fx.adc({1, 0, 0, 0});
    for (auto kind : {Receiver::high_precision, Receiver::one_bit, Receiver::mixed}) {
        const auto known = crb_known_sigma(kind, fx.sys, fx.sc, adc);
        const auto unknown = crb_unknown_sigma(fim_unknown_sigma(kind, fx.sys, fx.sc, adc));
        REQUIRE_FALSE(known.singular);
        CHECK(is_psd_scaled(unknown.crb - known.crb, known.crb));
    }
    // hp: sigma decouples from phi, so nothing is lost.
    const auto k0 = crb_known_sigma(Receiver::high_precision, fx.sys, fx.sc, adc);
    const auto u0 = crb_unknown_sigma(fim_unknown_sigma(Receiver::high_precision, fx.sys, fx.sc, adc));
    CHECK(rel_err(k0.crb, u0.crb) < 1e-10);
}

TEST_CASE("mixed CRB lies between its lower and upper bounds") {
    const Fixture fx;
    for (const auto& d : {std::vector<int>{1, 0, 0, 0}, std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 1, 1, 0}}) {
        const AdcConfig adc = fx.adc(d);
        const auto b = crb_mixed_bounds(fx.sys, fx.sc, adc);
        const RMat crbm = crb_known_sigma(Receiver::mixed, fx.sys, fx.sc, adc).crb;
        CHECK_FALSE(b.degenerate);
        CHECK(is_psd_scaled(crbm - b.lower, crbm));
        CHECK(is_psd_scaled(b.upper - crbm, crbm));
        CHECK(is_psd_scaled(b.lower - b.crb0, crbm));
    }
    const auto all_hp = crb_mixed_bounds(fx.sys, fx.sc, fx.adc({1, 1, 1, 1}));
    CHECK(all_hp.degenerate);
    CHECK(rel_err(all_hp.lower, all_hp.crb0) == 0.0);
}

TEST_CASE("crb_from_fim reports singular information") {
    RMat f = RMat::Identity(3, 3);
    f(2, 2) = 0.0;
    CHECK(crb_from_fim(f).singular);
    const auto ok = crb_from_fim(4.0 * RMat::Identity(2, 2));
    CHECK(ok.root_crb(0) == doctest::Approx(0.5));
}

}  // TEST_SUITE
