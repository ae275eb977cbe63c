#include <doctest.h>

#include "helpers.hpp"
#include "mixadc/baseline.hpp"

using namespace mixadc;

TEST_SUITE("baseline") {

TEST_CASE("on-grid unit target reads one in its own cell") {
    const auto sys = testutil::small_system(2, 4, 16, 1);
    const Grid g(8, 16);
    const DictionaryOperator op(sys, g);
    const RMat img = matched_filter(atom(sys, g.theta(3), g.omega(5)), op);
    REQUIRE(img.rows() == 8);
    REQUIRE(img.cols() == 16);
    CHECK(img(3, 5) == doctest::Approx(1.0));
    Eigen::Index r, c;
    img.maxCoeff(&r, &c);
    CHECK(r == 3);
    CHECK(c == 5);
}

TEST_CASE("image equals the explicit dictionary formula") {
    const auto sys = testutil::small_system(1, 4, 8, 2);
    const Grid g(5, 7);
    const DictionaryOperator op(sys, g);
    const CMat a = dictionary(sys, g);
    const CVec x = simulate(sys, testutil::random_scene(2, 3), 4).reshaped();
    const RMat img = matched_filter(x, op);
    for (int k = 0; k < g.size(); ++k) {
        const double n2 = a.col(k).squaredNorm();
        CHECK(img(g.theta_index(k), g.omega_index(k)) == doctest::Approx(std::norm(a.col(k).dot(x)) / (n2 * n2)));
    }
}

TEST_CASE("measurement overload needs every channel high precision") {
    const auto sys = testutil::small_system(1, 4, 8, 2);
    const Grid g(5, 7);
    const DictionaryOperator op(sys, g);
    const CMat x = simulate(sys, testutil::random_scene(1, 3), 4);
    const auto hp = quantize_mixed(x, AdcConfig({1, 1, 1, 1}, CMat::Zero(4, 8)));
    CHECK(testutil::rel_err(matched_filter(hp, op), matched_filter(vec(x), op)) < 1e-15);
    const auto mixed = quantize_mixed(x, AdcConfig({1, 0, 1, 1}, CMat::Zero(4, 8)));
    CHECK_THROWS(matched_filter(mixed, op));
    CHECK_THROWS_AS(matched_filter(CVec::Zero(3), op), DimensionError);
}

}  // TEST_SUITE
