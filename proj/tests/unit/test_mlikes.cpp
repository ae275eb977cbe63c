#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mixadc/mlikes.hpp"

using namespace mixadc;
using testutil::rel_err;

namespace {

struct Problem {
    RadarSystem sys = testutil::small_system(1, 4, 8, 21);
    Grid grid{6, 8};
    DictionaryOperator op{sys, grid};
    CMat dict = dictionary(sys, grid);
    Scene sc;
    MeasurementSet meas;

    explicit Problem(std::vector<int> delta, double noise_var = 0.05, std::uint64_t seed = 3)
        : meas(make(std::move(delta), noise_var, seed)) {}

    MeasurementSet make(std::vector<int> delta, double noise_var, std::uint64_t seed) {
        sc.noise_var = noise_var;
        sc.targets = {{grid.theta(1), grid.omega(2), {1.0, 0.5}}, {grid.theta(4), grid.omega(6), {-0.6, 0.2}}};
        const CMat thr = gen_thresholds(4, 8, avg_received_power(sys, sc), seed + 1);
        return quantize_mixed(simulate(sys, sc, seed), AdcConfig(std::move(delta), thr));
    }
};

RVec random_positive(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    RVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

CVec random_complex(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = {n01(rng), n01(rng)};
    return v;
}

double neg_log_l1(const CVec& d, double eta, const CVec& y) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double zr = y(i).real() * std::sqrt(2.0) * eta * d(i).real();
        const double zi = y(i).imag() * std::sqrt(2.0) * eta * d(i).imag();
        v -= std::log(0.5 * std::erfc(-zr / std::sqrt(2.0))) + std::log(0.5 * std::erfc(-zi / std::sqrt(2.0)));
    }
    return v;
}

}  // namespace

TEST_SUITE("mlikes") {

TEST_CASE("log-det weights at R = I and the tangency trace") {
    const Problem pb({1, 0, 1, 0});
    const auto lw = majorize_logdet(CMat::Identity(32, 32), pb.op, pb.meas.adc);
    CHECK(rel_err(lw.w, pb.op.column_norms2()) < 1e-13);
    CHECK(lw.w0_bar == doctest::Approx(16.0));
    CHECK(lw.w1_bar == doctest::Approx(16.0));

    // At the expansion point the linearization touches: sum p w + sigma0^2 w0 + w1/eta^2 = tr(I) = N M_r.
    const RVec p = random_positive(pb.op.cols(), 4);
    const double s0 = 0.7, eta = 1.3;
    CMat r = pb.dict * p.cast<cplx>().asDiagonal() * pb.dict.adjoint();
    for (int i : pb.meas.adc.hp_rows()) r(i, i) += s0 * s0;
    for (int i : pb.meas.adc.onebit_rows()) r(i, i) += 1.0 / (eta * eta);
    const auto l2 = majorize_logdet(r, pb.op, pb.meas.adc);
    CHECK(p.dot(l2.w) + s0 * s0 * l2.w0_bar + l2.w1_bar / (eta * eta) == doctest::Approx(32.0).epsilon(1e-10));
    const CMat q = r.inverse();
    for (int k = 0; k < pb.op.cols(); k += 7) {
        CHECK(l2.w(k) == doctest::Approx((pb.dict.col(k).adjoint() * q * pb.dict.col(k))(0).real()).epsilon(1e-10));
    }
    CHECK_THROWS_AS(majorize_logdet(CMat::Identity(3, 3), pb.op, pb.meas.adc), DimensionError);
}

TEST_CASE("surrogate targets at the threshold and majorization of -ln L1") {
    const CVec y1 = signc(random_complex(40, 8));
    const CVec h1 = random_complex(40, 9);
    const CVec g0 = inner_surrogate_targets(h1, 1.7, y1, h1);
    CHECK(rel_err(g0, y1 * std::sqrt(2.0 / kPi)) < 1e-14);

    const double eta = 0.8;
    const CVec d = random_complex(40, 10);
    const CVec g = inner_surrogate_targets(d + h1, eta, y1, h1);
    const double base = neg_log_l1(d, eta, y1);
    const double at = eta1_objective(eta, d, g, 0.0);
    for (int trial = 0; trial < 50; ++trial) {
        const CVec dn = d + 0.5 * random_complex(40, 100 + static_cast<std::uint64_t>(trial));
        const double bound = base + eta1_objective(eta, dn, g, 0.0) - at;
        CHECK(neg_log_l1(dn, eta, y1) <= bound + 1e-10);
    }
}

TEST_CASE("alpha update equals the regularized normal equations") {
    const Problem pb({1, 1, 0, 0});
    const RVec p = random_positive(pb.op.cols(), 1);
    const RVec noise = random_positive(pb.op.rows(), 2);
    const CVec y = random_complex(pb.op.rows(), 3);
    const CVec a = update_alpha(p, noise, y, pb.op);
    // (A^H N^-1 A + P^-1) alpha = A^H N^-1 y.
    const CMat ni = noise.cwiseInverse().cast<cplx>().asDiagonal();
    CMat lhs = pb.dict.adjoint() * ni * pb.dict;
    lhs.diagonal() += p.cwiseInverse().cast<cplx>();
    const CVec ref = lhs.ldlt().solve(pb.dict.adjoint() * ni * y);
    CHECK(rel_err(a, ref) < 1e-9);
    CHECK_THROWS_AS(update_alpha(p, noise, CVec::Zero(3), pb.op), DimensionError);
}

TEST_CASE("p and sigma0 updates minimize their scalar surrogates") {
    const CVec alpha = random_complex(6, 5);
    const RVec w = random_positive(6, 6);
    const RVec p = update_p(alpha, w);
    for (int k = 0; k < 6; ++k) {
        const double a2 = std::norm(alpha(k)), wk = w(k);
        const double ref = testutil::golden_min([&](double x) { return a2 / x + wk * x; }, 1e-6, 100.0);
        CHECK(p(k) == doctest::Approx(ref).epsilon(1e-7));
    }
    const CVec r = random_complex(20, 7);
    const double w0 = 3.7;
    const double ref = testutil::golden_min([&](double s) { return r.squaredNorm() / (s * s) + w0 * s * s; }, 1e-3, 100.0);
    CHECK(update_sigma0(r, w0) == doctest::Approx(ref).epsilon(1e-7));
    CHECK(update_sigma0(r, w0, 50.0) == 50.0);
    CHECK_THROWS_AS(update_sigma0(r, 0.0), DomainError);
}

TEST_CASE("eta1 update against a dense grid") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const CVec d = random_complex(30, 20 + seed);
        const CVec g = random_complex(30, 40 + seed) * 3.0;
        const double w1 = 5.0 + seed;
        const double eta = update_eta1(d, g, w1, 1.0, 1e-3, 1e3);
        double best = 0.0, best_v = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 60000; ++i) {
            const double e = std::pow(10.0, -3.0 + 6.0 * i / 60000.0);
            const double v = eta1_objective(e, d, g, w1);
            if (v < best_v) {
                best_v = v;
                best = e;
            }
        }
        CHECK(eta == doctest::Approx(best).epsilon(5e-4));
        CHECK(eta1_objective(eta, d, g, w1) <= best_v + 1e-9 * std::abs(best_v));
    }
    // Keeps the previous value when it is already optimal.
    const CVec d = random_complex(10, 1), g = random_complex(10, 2);
    const double e1 = update_eta1(d, g, 2.0, 1.0, 1e-3, 1e3);
    CHECK(update_eta1(d, g, 2.0, e1, 1e-3, 1e3) == e1);
    CHECK_THROWS_AS(update_eta1(d, g, 2.0, 1.0, 1.0, 0.5), DomainError);
}

TEST_CASE("extrapolation step") {
    const CVec a = random_complex(5, 1), b = random_complex(5, 2);
    const auto s1 = nesterov_combine(a, b, 1.0);
    CHECK(rel_err(s1.g_tilde, a) < 1e-15);
    CHECK(s1.t_next == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
    const auto s2 = nesterov_combine(a, b, 3.0);
    const double c = (3.0 - 1.0) / s2.t_next;
    CHECK(rel_err(s2.g_tilde, a + c * (a - b)) < 1e-15);
    const auto s3 = nesterov_combine(a, b, 3.0, Acceleration::listing);
    CHECK(rel_err(s3.g_tilde, b + c * a) < 1e-15);
    const auto s4 = nesterov_combine(a, b, 3.0, Acceleration::none);
    CHECK(rel_err(s4.g_tilde, a) == 0.0);
    double t = 1.0;
    for (int i = 0; i < 50; ++i) t = nesterov_combine(a, b, t).t_next;
    CHECK(t > 25.0);
    CHECK(parse_acceleration(acceleration_name(Acceleration::listing)) == Acceleration::listing);
    CHECK_THROWS_AS(parse_acceleration("heavy-ball"), DomainError);
}

TEST_CASE("all high-precision input reduces to plain LIKES") {
    const Problem pb({1, 1, 1, 1});
    MlikesOptions o;
    o.max_outer = 4;
    o.max_inner = 3;
    o.outer_tol = 0.0;
    o.inner_tol = 0.0;
    o.sigma_floor = 0.0;
    const SparseEstimate start = mlikes_initial(pb.meas, pb.op, o);
    const auto res = mlikes_run(pb.meas, pb.op, start, o);

    // Reference LIKES with an explicit dictionary.
    const CMat& a = pb.dict;
    const CVec& y = pb.meas.y0;
    RVec p = start.p;
    double s0 = start.sigma0;
    CVec alpha = start.alpha;
    auto cov = [&] {
        CMat r = a * p.cast<cplx>().asDiagonal() * a.adjoint();
        r.diagonal().array() += s0 * s0;
        return r;
    };
    for (int m = 0; m < 4; ++m) {
        const CMat q = cov().inverse();
        RVec w(a.cols());
        for (int k = 0; k < a.cols(); ++k) w(k) = (a.col(k).adjoint() * q * a.col(k))(0).real();
        const double w0 = q.trace().real();
        for (int i = 0; i < 3; ++i) {
            alpha = p.cast<cplx>().cwiseProduct(a.adjoint() * cov().ldlt().solve(y));
            for (int k = 0; k < a.cols(); ++k) p(k) = std::abs(alpha(k)) / std::sqrt(w(k));
            s0 = std::sqrt((a * alpha - y).norm()) / std::pow(w0, 0.25);
        }
    }
    CHECK(rel_err(res.estimate.p, p) < 1e-8);
    CHECK(rel_err(res.estimate.alpha, alpha) < 1e-8);
    CHECK(res.estimate.sigma0 == doctest::Approx(s0).epsilon(1e-8));
}

TEST_CASE("objective never increases without extrapolation") {
    for (const auto& d : {std::vector<int>{1, 0, 0, 0}, std::vector<int>{0, 0, 0, 0}, std::vector<int>{1, 1, 0, 0}}) {
        const Problem pb(d, 0.1);
        MlikesOptions o;
        o.acceleration = Acceleration::none;
        o.max_outer = 15;
        const auto res = mlikes_run(pb.meas, pb.op, o);
        REQUIRE(res.psi.size() >= 2);
        for (std::size_t i = 1; i < res.psi.size(); ++i) {
            CHECK(res.psi[i] <= res.psi[i - 1] + 1e-9 * std::abs(res.psi[i - 1]));
        }
        CHECK(res.psi.back() == doctest::Approx(mlikes_objective(res.estimate, pb.meas, pb.op)).epsilon(1e-10));
    }
}

TEST_CASE("strongest cell of the sparse image is the strong target") {
    const Problem pb({1, 0, 0, 0}, 0.02);
    const auto res = mlikes_run(pb.meas, pb.op);
    Eigen::Index best;
    res.estimate.p.maxCoeff(&best);
    CHECK(static_cast<int>(best) == pb.grid.column(1, 2));
}

TEST_CASE("noise-only data stay finite") {
    Problem pb({1, 0, 0, 0}, 0.5);
    pb.sc.targets.clear();
    const CMat thr = gen_thresholds(4, 8, 0.5, 11);
    const auto meas = quantize_mixed(simulate(pb.sys, pb.sc, 5), AdcConfig({1, 0, 0, 0}, thr));
    const auto res = mlikes_run(meas, pb.op);
    CHECK(std::isfinite(res.psi.back()));
    CHECK(res.estimate.alpha.allFinite());
    CHECK(res.estimate.sigma0 > 0.0);
}

TEST_CASE("mismatched inputs are rejected") {
    const Problem pb({1, 0, 0, 0});
    const DictionaryOperator other(testutil::small_system(1, 4, 6, 1), Grid(6, 8));
    CHECK_THROWS_AS(mlikes_run(pb.meas, other), DimensionError);
    SparseEstimate bad = mlikes_initial(pb.meas, pb.op);
    bad.p.resize(3);
    CHECK_THROWS_AS(mlikes_run(pb.meas, pb.op, bad, MlikesOptions{}), DimensionError);
}

}  // TEST_SUITE
