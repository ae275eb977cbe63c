#include <doctest.h>

#include <random>

#include "mixadc/linalg.hpp"

using namespace mixadc;

namespace {

RMat random_spd(int n, std::uint64_t seed, double spread) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    RMat a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = n01(rng);
    RMat m = a * a.transpose() + n * RMat::Identity(n, n);
    RVec s(n);
    for (int i = 0; i < n; ++i) s(i) = std::pow(spread, double(i) / (n - 1));
    return s.asDiagonal() * m * s.asDiagonal();
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("equilibrated inverse survives badly scaled SPD matrices") {
    const RMat f = random_spd(6, 3, 1e6);
    const auto inv = symmetric_inverse(f);
    REQUIRE_FALSE(inv.singular);
    const RMat id = f * inv.inverse;
    CHECK((id - RMat::Identity(6, 6)).norm() < 1e-8);
    CHECK(inv.condition < 100.0);
    CHECK((inv.inverse - inv.inverse.transpose()).norm() <= 1e-12 * inv.inverse.norm());
}

TEST_CASE("singular input is flagged") {
    RMat f = random_spd(4, 5, 1.0);
    f.row(3) = f.row(2);
    f.col(3) = f.col(2);
    CHECK(symmetric_inverse(f).singular);
    RMat z = RMat::Identity(3, 3);
    z(1, 1) = 0.0;
    CHECK(symmetric_inverse(z).singular);
}

TEST_CASE("scaled PSD test is invariant to diagonal congruence") {
    const RMat ref = random_spd(5, 7, 1.0);
    RMat m = RMat::Identity(5, 5) * 0.1;
    m(0, 0) = -1e-3;
    RVec d(5);
    d << 1e-6, 1.0, 1e3, 1e-2, 1e5;
    const RMat ms = d.asDiagonal() * m * d.asDiagonal();
    const RMat rs = d.asDiagonal() * ref * d.asDiagonal();
    CHECK(min_scaled_eigenvalue(m, ref) == doctest::Approx(min_scaled_eigenvalue(ms, rs)).epsilon(1e-8));
    CHECK_FALSE(is_psd_scaled(ms, rs));
    CHECK(is_psd_scaled(rs, rs));
    CHECK(is_psd_scaled(RMat::Zero(5, 5), rs));
}

TEST_CASE("symmetrize") {
    RMat a(2, 2);
    a << 1, 2, 4, 3;
    const RMat s = symmetrize(a);
    CHECK(s(0, 1) == 3.0);
    CHECK(s(1, 0) == 3.0);
    CHECK(s(1, 1) == 3.0);
}

}  // TEST_SUITE
