#include <doctest.h>

#include <random>

#include "dnurbs/constraints.hpp"
#include "dnurbs/errors.hpp"
#include "dnurbs/sim_config.hpp"
#include "dnurbs/verify.hpp"

using namespace dnurbs;

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(n);
    for (auto& x : v) x = nd(rng);
    return v;
}

double residual(const ConstraintSpec& spec, const Eigen::VectorXd& p) {
    return (spec.A() * p + spec.d()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("pinning one coordinate") {
    ConstraintSpec spec(8);
    spec.pin(0, Coord::x, 5.0);
    CHECK(spec.num_constraints() == 1);
    CHECK(spec.A()(0, 0) == 1.0);
    CHECK(spec.d()[0] == -5.0);

    const ReductionMap map = build_reduction(spec);
    CHECK(map.full_size() == 8);
    CHECK(map.reduced_size() == 7);
    CHECK(map.dependent == std::vector<int>{0});
    CHECK(map.d0[0] == 5.0);
    const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(7, 1, 7);
    const Eigen::VectorXd p = map.reconstruct(q);
    CHECK(p[0] == 5.0);
    CHECK(p.tail(7) == q);
    CHECK(map.restrict(p) == q);
}

TEST_CASE("wire preset leaves four free coordinates") {
    const sim::SimConfig cfg = sim::SimConfig::wire_preset();
    const ConstraintSpec spec = cfg.constraint_spec();
    CHECK(spec.num_constraints() == 24);
    const ReductionMap map = build_reduction(spec);
    CHECK(map.reduced_size() == 4);
    const GeneralizedState s = cfg.initial_state();
    CHECK(residual(spec, s.p()) == 0.0);
    // The free coordinates are the middle control.
    CHECK(map.free == std::vector<int>{12, 13, 14, 15});
    CHECK((map.reconstruct(map.restrict(s.p())) - s.p()).norm() == 0.0);
}

TEST_CASE("random general constraints") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        ConstraintSpec spec(16);
        for (int r = 0; r < 5; ++r) spec.add_row(random_vector(rng, 16), random_vector(rng, 1)[0]);
        const ReductionMap map = build_reduction(spec);
        REQUIRE(map.reduced_size() == 11);
        const Eigen::VectorXd q = random_vector(rng, 11);
        CHECK((spec.A() * map.reconstruct(q) + spec.d()).norm() < 1e-10);

        const Eigen::MatrixXd PG = map.permuted_G();
        CHECK((PG.bottomRows(11) - Eigen::MatrixXd::Identity(11, 11)).norm() == 0.0);
        // Every column of G lies in the null space of A.
        CHECK((spec.A() * Eigen::MatrixXd(map.G)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("rank deficiency and over-determination") {
    SUBCASE("duplicate rows") {
        ConstraintSpec spec(4);
        spec.pin(0, Coord::y, 1.0);
        spec.pin(0, Coord::y, 1.0);
        CHECK_THROWS_AS(build_reduction(spec), InfeasibleConstraints);
    }
    SUBCASE("linearly dependent rows") {
        ConstraintSpec spec(8);
        Eigen::VectorXd a = Eigen::VectorXd::Zero(8);
        a[0] = 1.0;
        a[5] = 2.0;
        spec.add_row(a, 1.0);
        spec.add_row(3.0 * a, -2.0);
        CHECK_THROWS_AS(build_reduction(spec), InfeasibleConstraints);
    }
    SUBCASE("more rows than coordinates") {
        ConstraintSpec spec(4);
        for (int c = 0; c < 4; ++c) spec.pin(0, static_cast<Coord>(c), 1.0);
        spec.add_row(Eigen::VectorXd::Ones(4), 0.0);
        CHECK_THROWS_AS(build_reduction(spec), InfeasibleConstraints);
    }
    SUBCASE("out of range pin") {
        ConstraintSpec spec(8);
        CHECK_THROWS(spec.pin(2, Coord::x, 0.0));
    }
}

TEST_CASE("unconstrained and fully constrained maps") {
    const ReductionMap id = ReductionMap::identity(8);
    CHECK(id.reduced_size() == 8);
    CHECK(Eigen::MatrixXd(id.G) == Eigen::MatrixXd::Identity(8, 8));
    CHECK(id.d0.norm() == 0.0);
    CHECK(build_reduction(ConstraintSpec(8)).reduced_size() == 8);

    ConstraintSpec all(4);
    for (int c = 0; c < 4; ++c) all.pin(0, static_cast<Coord>(c), c + 1.0);
    const ReductionMap map = build_reduction(all);
    CHECK(map.reduced_size() == 0);
    CHECK(map.reconstruct(Eigen::VectorXd(0)) == Eigen::Vector4d(1, 2, 3, 4));
}

TEST_CASE("reduced system keeps symmetry and definiteness") {
    std::mt19937_64 rng(8);
    const KnotVector kv = sim::random_open_knot_vector(rng, 4, 7);
    const GeneralizedState s = sim::random_state(rng, 7);
    PhysicsParams params{2.0, 0.5, 3.0, 1.0, 9.8};
    const SystemMatrices mats = assemble_matrices(s, kv, params, QuadratureRule::gauss_legendre(5));
    ConstraintSpec spec(s.num_dofs());
    spec.pin_control(s, 0);
    spec.pin_control(s, 6);
    spec.add_row(random_vector(rng, s.num_dofs()), 0.3);
    const ReductionMap map = build_reduction(spec);
    const Eigen::VectorXd f = random_vector(rng, s.num_dofs());
    const Eigen::VectorXd cross = random_vector(rng, s.num_dofs());
    const ReducedSystem red = reduce_system(mats, f, cross, map);

    const Eigen::MatrixXd G(map.G);
    CHECK((red.M - G.transpose() * mats.M.to_dense() * G).norm() < 1e-10 * red.M.norm());
    CHECK((red.M - red.M.transpose()).norm() < 1e-12 * red.M.norm());
    CHECK((red.K - red.K.transpose()).norm() < 1e-12 * red.K.norm());
    CHECK((red.force - G.transpose() * f).norm() < 1e-12 * f.norm());
    CHECK((red.stiffness_offset + G.transpose() * (mats.K.to_dense() * map.d0)).norm() <
          1e-10 * (1.0 + red.stiffness_offset.norm()));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(red.M + red.K);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);

    CHECK_THROWS_AS(reduce_system(mats, Eigen::VectorXd::Zero(3), cross, map), ContractError);
}

TEST_CASE("constrained velocities stay on the tangent space") {
    // Any q-velocity maps to a p-velocity with A v = 0.
    std::mt19937_64 rng(12);
    ConstraintSpec spec(12);
    for (int r = 0; r < 4; ++r) spec.add_row(random_vector(rng, 12), 1.0);
    const ReductionMap map = build_reduction(spec);
    const Eigen::VectorXd qdot = random_vector(rng, map.reduced_size());
    CHECK((spec.A() * (Eigen::MatrixXd(map.G) * qdot)).norm() < 1e-10);
}
