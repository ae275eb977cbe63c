#include <doctest.h>

#include "helpers.hpp"
#include "mixadc/dictionary.hpp"

using namespace mixadc;
using testutil::rel_err;

TEST_SUITE("dictionary") {

TEST_CASE("structured products agree with the explicit dictionary") {
    const RadarSystem sys = testutil::small_system(3, 4, 6, 21);
    const Grid grid(7, 10);
    const DictionaryOperator op(sys, grid);
    const CMat a = dictionary(sys, grid);
    REQUIRE(a.rows() == op.rows());
    REQUIRE(a.cols() == op.cols());

    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    CVec alpha(op.cols());
    for (auto& x : alpha) x = {n01(rng), n01(rng)};
    CVec z(op.rows());
    for (auto& x : z) x = {n01(rng), n01(rng)};
    RVec p(op.cols());
    for (auto& x : p) x = std::abs(n01(rng));
    CMat b(op.rows(), op.rows());
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = {n01(rng), n01(rng)};
    const CMat q = b * b.adjoint();

    CHECK(rel_err(op.apply(alpha), a * alpha) < 1e-12);
    CHECK(rel_err(op.adjoint(z), a.adjoint() * z) < 1e-12);
    CHECK(rel_err(op.weighted_gram(p), a * p.cast<cplx>().asDiagonal() * a.adjoint()) < 1e-12);
    const RVec qf = (a.adjoint() * q * a).diagonal().real();
    CHECK(rel_err(op.quadratic_forms(q), qf) < 1e-12);
    CHECK(rel_err(op.column_norms2(), a.colwise().squaredNorm().transpose().eval()) < 1e-12);
    for (int k : {0, 13, 69}) CHECK(rel_err(op.column(k), a.col(k).eval()) < 1e-13);
}

TEST_CASE("column k is the atom at the grid point") {
    const RadarSystem sys = testutil::small_system(2, 3, 4, 2);
    const Grid grid(5, 8);
    const DictionaryOperator op(sys, grid);
    const int k = grid.column(3, 6);
    CHECK(rel_err(op.column(k), atom(sys, grid.theta(3), grid.omega(6))) < 1e-13);
}

TEST_CASE("weighted Gram is Hermitian") {
    const RadarSystem sys = testutil::small_system(2, 4, 8, 7);
    const Grid grid(6, 12);
    const DictionaryOperator op(sys, grid);
    const CMat r = op.weighted_gram(RVec::Constant(op.cols(), 0.3));
    CHECK((r - r.adjoint()).norm() < 1e-12 * r.norm());
}

TEST_CASE("size mismatches are rejected") {
    const RadarSystem sys = testutil::small_system(2, 2, 4, 7);
    const DictionaryOperator op(sys, Grid(4, 4));
    CHECK_THROWS_AS(op.apply(CVec::Zero(3)), DimensionError);
    CHECK_THROWS_AS(op.adjoint(CVec::Zero(3)), DimensionError);
    CHECK_THROWS_AS(op.weighted_gram(RVec::Zero(3)), DimensionError);
}

}  // TEST_SUITE
