#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dnurbs/bspline_basis.hpp"
#include "dnurbs/errors.hpp"
#include "dnurbs/verify.hpp"
#include "oracles.hpp"

using namespace dnurbs;

TEST_CASE("order-1 basis is the indicator of its span") {
    const KnotVector kv({0, 1}, 1);
    const BasisEval b = eval_bspline_basis(kv, 0.5);
    REQUIRE(b.values.size() == 1);
    CHECK(b.values[0] == 1.0);
    CHECK(b.d1[0] == 0.0);
}

TEST_CASE("uniform quadratic bump at its apex") {
    const KnotVector kv({0, 1, 2, 3}, 3);
    const BasisEval b = eval_bspline_basis(kv, 1.5);
    // Hand-unrolled recursion: B_{0,2} = B_{1,2} = 0.5, B_{0,3} = 0.75*0.5 + 0.75*0.5.
    const double expected = oracle::bspline(kv.knots(), 0, 3, 1.5);
    CHECK(expected == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(b.values[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(std::abs(b.d1[0]) < 1e-15);
}

TEST_CASE("open vector interpolates at the left end") {
    const KnotVector kv({0, 0, 1, 2, 3, 4, 5, 5}, 2);
    const BasisEval b = eval_bspline_basis(kv, 0.0);
    CHECK(b.values[0] == 1.0);
    for (std::size_t i = 1; i < b.values.size(); ++i) CHECK(b.values[i] == 0.0);
}

TEST_CASE("right endpoint evaluates the last function to one") {
    const KnotVector kv({0, 0, 0, 0.5, 1, 1, 1}, 3);
    const BasisEval b = eval_bspline_basis(kv, 1.0);
    CHECK(b.values.back() == 1.0);
    CHECK(std::accumulate(b.values.begin(), b.values.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("Bernstein quadratic derivatives at zero") {
    // (1-u)^2, 2u(1-u), u^2 differentiated: (-2, 2, 0) at u = 0; second derivatives (2, -4, 2).
    const KnotVector kv({0, 0, 0, 1, 1, 1}, 3);
    const BasisEval b = eval_bspline_basis(kv, 0.0);
    CHECK(b.d1[0] == doctest::Approx(-2.0));
    CHECK(b.d1[1] == doctest::Approx(2.0));
    CHECK(b.d1[2] == doctest::Approx(0.0));
    CHECK(b.d2[0] == doctest::Approx(2.0));
    CHECK(b.d2[1] == doctest::Approx(-4.0));
    CHECK(b.d2[2] == doctest::Approx(2.0));
}

TEST_CASE("piecewise constant basis has zero derivatives") {
    const KnotVector kv({0, 0.3, 0.6, 1.0}, 1);
    for (double u : {0.1, 0.45, 0.8}) {
        const BasisEval b = eval_bspline_basis(kv, u);
        for (double d : b.d1) CHECK(d == 0.0);
    }
}

TEST_CASE("derivative order limits") {
    const KnotVector kv({0, 0, 0, 1, 1, 1}, 3);
    const BasisEval b = eval_bspline_derivatives(kv, 0.3, 1);
    for (double d : b.d2) CHECK(d == 0.0);
    CHECK(b.d1[0] != 0.0);
    CHECK_THROWS_AS(eval_bspline_derivatives(kv, 0.3, 3), ContractError);
}

TEST_CASE("knot vector classification") {
    const std::vector<double> uniform{0, 1, 2, 3, 4, 5};
    const std::vector<double> open{0, 0, 1, 2, 3, 4, 5, 5};
    const std::vector<double> nonuni{0, 0.1, 0.9, 1};
    CHECK(classify_knot_vector(uniform, 2) == KnotClass::uniform);
    CHECK(classify_knot_vector(open, 2) == KnotClass::open_uniform);
    CHECK(classify_knot_vector(nonuni, 2) == KnotClass::nonuniform);
    const std::vector<double> wire{0, 0, 0, 0, 0.25, 0.5, 0.75, 1, 1, 1, 1};
    CHECK(classify_knot_vector(wire, 4) == KnotClass::open_uniform);
    // Multiplicity above the order is not open uniform.
    const std::vector<double> heavy{0, 0, 0, 1, 2, 2, 2};
    CHECK(classify_knot_vector(heavy, 2) == KnotClass::nonuniform);
}

TEST_CASE("invalid knot vectors and parameters") {
    const std::vector<double> decreasing{0, 1, 0.5, 2};
    CHECK_THROWS_AS(classify_knot_vector(decreasing, 2), InvalidKnotVector);
    CHECK_THROWS_AS(KnotVector({1, 1, 1, 1}, 2), InvalidKnotVector);
    CHECK_THROWS_AS(KnotVector({0, 1}, 2), InvalidKnotVector);
    const KnotVector kv({0, 0, 1, 1}, 2);
    CHECK_THROWS_AS(eval_bspline_basis(kv, 1.5), DomainError);
    CHECK_THROWS_AS(eval_bspline_basis(kv, -0.1), DomainError);
    CHECK_THROWS_AS(eval_bspline_basis(kv, std::nan("")), DomainError);
}

TEST_CASE("matches the plain recursion on random open and uniform vectors") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int k = 1 + trial % 5;
        const KnotVector kv = trial % 3 == 0
                                  ? KnotVector({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, k)
                                  : sim::random_open_knot_vector(rng, k, k + 1 + trial % 7);
        for (int s = 0; s < 50; ++s) {
            const double u = kv.front() + (kv.back() - kv.front()) * unit(rng);
            const BasisEval b = eval_bspline_basis(kv, u);
            for (int i = 0; i < kv.num_basis(); ++i) {
                CHECK(b.values[i] == doctest::Approx(oracle::bspline(kv.knots(), i, k, u)).epsilon(1e-12));
                CHECK(b.d1[i] == doctest::Approx(oracle::bspline_der(kv.knots(), i, k, u, 1)).epsilon(1e-10));
                CHECK(b.d2[i] == doctest::Approx(oracle::bspline_der(kv.knots(), i, k, u, 2)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("local support follows the order-k recursion") {
    // B_{i,k} vanishes outside [u_i, u_{i+k}).
    const KnotVector kv({0, 0, 0, 0.2, 0.4, 0.7, 1, 1, 1}, 3);
    for (int s = 0; s <= 1000; ++s) {
        const double u = s / 1000.0;
        const BasisEval b = eval_bspline_basis(kv, u);
        int nonzero = 0;
        for (int i = 0; i < kv.num_basis(); ++i) {
            const bool inside = kv[i] <= u && (u < kv[i + 3] || (u == 1.0 && kv[i + 3] == 1.0));
            if (!inside) CHECK(b.values[i] == 0.0);
            if (b.values[i] != 0.0) ++nonzero;
        }
        CHECK(nonzero <= 3);
    }
}
