#include <doctest.h>

#include <cmath>
#include <random>

#include "dnurbs/dynamics.hpp"
#include "dnurbs/errors.hpp"
#include "dnurbs/sim_config.hpp"
#include "dnurbs/verify.hpp"
#include "oracles.hpp"

using namespace dnurbs;

namespace {

BandedMatrix random_spd_banded(std::mt19937_64& rng, int n, int hb) {
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    BandedMatrix A(n, hb);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j <= std::min(n - 1, i + hb); ++j) {
            const double v = ud(rng);
            A.add(i, j, v);
            A.add(j, i, v);
        }
    }
    // Diagonal dominance.
    for (int i = 0; i < n; ++i) A.add(i, i, 2.0 * hb + 1.0 + ud(rng));
    return A;
}

StepContext wire_context(const sim::SimConfig& cfg) {
    StepContext ctx{cfg.knot_vector(), cfg.params, QuadratureRule::gauss_legendre(cfg.quadrature_size()),
                    gravity_density(cfg.params), cfg.dt, cfg.policy, cfg.initial_state().p_w()};
    return ctx;
}

Eigen::VectorXd run_wire(sim::SimConfig cfg, double dt, double t_end) {
    cfg.dt = dt;
    const StepContext ctx = wire_context(cfg);
    const ReductionMap map = build_reduction(cfg.constraint_spec());
    SimState s = initialize(cfg.initial_state(), cfg.initial_velocity(), dt);
    const int steps = static_cast<int>(std::lround(t_end / dt));
    for (int i = 0; i < steps; ++i) s = step(s, ctx, map, cfg.solver).state;
    return s.p_curr;
}

}  // namespace

TEST_CASE("conjugate gradient basics") {
    SolverConfig cfg;
    SUBCASE("identity converges in one iteration") {
        BandedMatrix I(6, 1);
        for (int i = 0; i < 6; ++i) I.add(i, i, 1.0);
        const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(6, 1, 6);
        const CgResult r = solve_cg(I, b, cfg);
        CHECK(r.iterations == 1);
        CHECK((r.x - b).norm() == 0.0);
    }
    SUBCASE("zero right-hand side") {
        BandedMatrix I(3, 0);
        for (int i = 0; i < 3; ++i) I.add(i, i, 2.0);
        const CgResult r = solve_cg(I, Eigen::VectorXd::Zero(3), cfg);
        CHECK(r.iterations == 0);
        CHECK(r.x.norm() == 0.0);
    }
    SUBCASE("two by two against the inverse") {
        BandedMatrix A(2, 1);
        A.add(0, 0, 4);
        A.add(0, 1, 1);
        A.add(1, 0, 1);
        A.add(1, 1, 3);
        const CgResult r = solve_cg(A, Eigen::Vector2d(1, 2), cfg);
        CHECK(std::abs(r.x[0] - 1.0 / 11.0) < 1e-12);
        CHECK(std::abs(r.x[1] - 7.0 / 11.0) < 1e-12);
    }
    SUBCASE("random banded systems") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> nd;
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 20 + 17 * trial;
            const BandedMatrix A = random_spd_banded(rng, n, 1 + trial % 8);
            Eigen::VectorXd b(n);
            for (auto& x : b) x = nd(rng);
            const CgResult r = solve_cg(A, b, cfg);
            const double independent = (A.to_dense() * r.x - b).norm() / b.norm();
            CHECK(independent <= 1e-10);
            CHECK(r.residual == doctest::Approx(independent).epsilon(1e-3));
        }
    }
    SUBCASE("indefinite operators and iteration caps") {
        BandedMatrix A(2, 0);
        A.add(0, 0, 1.0);
        A.add(1, 1, -1.0);
        CHECK_THROWS_AS(solve_cg(A, Eigen::Vector2d(0, 1), cfg), SolverDivergence);

        std::mt19937_64 rng(4);
        const BandedMatrix B = random_spd_banded(rng, 50, 3);
        SolverConfig capped;
        capped.max_iter = 1;
        try {
            solve_cg(B, Eigen::VectorXd::Ones(50), capped);
            FAIL("expected divergence");
        } catch (const SolverDivergence& e) {
            CHECK(e.iterations() == 1);
            CHECK(e.residual() > 1e-10);
        }
    }
    SUBCASE("configuration errors") {
        SolverConfig bad;
        bad.tol = 0.0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = SolverConfig{};
        bad.max_iter = -1;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
}

TEST_CASE("initialization from a velocity") {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}};
    const std::vector<double> w{1, 1};
    const GeneralizedState s(pts, w);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
    SimState sim = initialize(s, v, 0.01);
    CHECK(sim.p_prev == sim.p_curr);
    CHECK(sim.t == 0.0);
    CHECK(sim.step == 0);
    v[1] = 2.0;
    sim = initialize(s, v, 0.01);
    CHECK(sim.p_prev[1] == doctest::Approx(-0.02));
    CHECK_THROWS_AS(initialize(s, v, 0.0), ConfigError);
}

TEST_CASE("weight policies") {
    Eigen::VectorXd p(8);
    p << 0, 0, 0, 1.5, 1, 0, 0, 0.7;
    const Eigen::VectorXd w0 = Eigen::Vector2d(1.0, 2.0);
    CHECK(apply_weight_policy(p, WeightPolicy::free, w0) == p);
    CHECK(apply_weight_policy(p, WeightPolicy::pinned, w0) == p);
    const Eigen::VectorXd r = apply_weight_policy(p, WeightPolicy::reset_to_initial, w0);
    CHECK(r[3] == 1.0);
    CHECK(r[7] == 2.0);
    CHECK(r.head(3) == p.head(3));

    CHECK(parse_weight_policy("free") == WeightPolicy::free);
    CHECK(parse_weight_policy("reset") == WeightPolicy::reset_to_initial);
    CHECK(parse_weight_policy("pinned") == WeightPolicy::pinned);
    CHECK_THROWS_AS(parse_weight_policy("floating"), ConfigError);

    ConstraintSpec spec(8);
    pin_weights(spec, GeneralizedState(p));
    CHECK(spec.num_constraints() == 2);
    CHECK(spec.d()[1] == -0.7);
}

TEST_CASE("a collapsed curve at rest without gravity stays put") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> wd(0.5, 2.0);
    const int m = 5;
    std::vector<Vec3> pts(m, Vec3(1.0, 2.0, 3.0));
    std::vector<double> w(m);
    for (auto& x : w) x = wd(rng);
    const GeneralizedState s(pts, w);
    PhysicsParams params;
    params.g = 0.0;
    params.gamma = 4.0;
    const KnotVector kv = KnotVector::open_uniform(m, 3);
    StepContext ctx{kv, params, QuadratureRule::gauss_legendre(4), gravity_density(params), 0.01,
                    WeightPolicy::pinned, s.p_w()};
    ConstraintSpec spec(s.num_dofs());
    pin_weights(spec, s);
    const ReductionMap map = build_reduction(spec);
    SimState sim = initialize(s, Eigen::VectorXd::Zero(s.num_dofs()), ctx.dt);
    for (int i = 0; i < 10; ++i) sim = step(sim, ctx, map, SolverConfig{}).state;
    CHECK((sim.p_curr - s.p()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a fully pinned wire does not move") {
    sim::SimConfig cfg = sim::SimConfig::wire_preset();
    cfg.pins.push_back({3, Coord::x});
    cfg.pins.push_back({3, Coord::y});
    cfg.pins.push_back({3, Coord::z});
    cfg.pins.push_back({3, Coord::w});
    const ReductionMap map = build_reduction(cfg.constraint_spec());
    CHECK(map.reduced_size() == 0);
    const StepContext ctx = wire_context(cfg);
    SimState s = initialize(cfg.initial_state(), cfg.initial_velocity(), cfg.dt);
    const StepOutcome out = step(s, ctx, map, cfg.solver);
    CHECK(out.state.p_curr == cfg.initial_state().p());
    CHECK(out.cg_iterations == 0);
    CHECK(out.state.step == 1);
}

TEST_CASE("first wire step against a dense solve") {
    const sim::SimConfig cfg = sim::SimConfig::wire_preset();
    const StepContext ctx = wire_context(cfg);
    const ReductionMap map = build_reduction(cfg.constraint_spec());
    const GeneralizedState s0 = cfg.initial_state();
    const SimState sim = initialize(s0, cfg.initial_velocity(), cfg.dt);
    const StepOutcome out = step(sim, ctx, map, cfg.solver);

    // Independent assembly by Simpson integration of the dense Jacobian.
    const PhysicsParams& ph = cfg.params;
    const oracle::Curve cv{cfg.knots, cfg.order, s0.p()};
    const oracle::Matrices o = oracle::simpson_matrices(cv, ph.mu, ph.gamma, ph.alpha, ph.beta, 400);
    const Eigen::VectorXd f = oracle::simpson_by_span(
        cfg.knots,
        [&](double u) -> Eigen::VectorXd {
            return oracle::jacobian(cv, u).J.transpose() * Eigen::Vector3d(0.0, -ph.mu * ph.g, 0.0);
        },
        400);
    const Eigen::VectorXd cross = oracle::simpson_cross(cv, cv, ph.mu, 400);
    const double dt = cfg.dt;
    const Eigen::MatrixXd A0 = 4 * o.M + 2 * dt * o.D + 4 * dt * dt * o.K;
    const Eigen::VectorXd A1 = 4 * dt * dt * f + 8 * o.M * sim.p_curr - (3 * o.M - 2 * dt * o.D) * sim.p_prev - cross;
    const Eigen::MatrixXd G(map.G);
    const Eigen::VectorXd q =
        (G.transpose() * A0 * G).ldlt().solve(G.transpose() * (A1 - A0 * map.d0));
    const Eigen::VectorXd expected =
        apply_weight_policy(G * q + map.d0, WeightPolicy::reset_to_initial, s0.p_w());

    CHECK((out.state.p_curr - expected).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(out.residual <= 1e-10);
    // Gravity pulls the middle control down.
    CHECK(out.state.p_curr[13] < s0.p()[13]);
    CHECK(out.state.t == doctest::Approx(dt));
}

TEST_CASE("constraints hold along a trajectory") {
    sim::SimConfig cfg = sim::SimConfig::wire_preset();
    cfg.policy = WeightPolicy::free;
    const StepContext ctx = wire_context(cfg);
    const ConstraintSpec spec = cfg.constraint_spec();
    const ReductionMap map = build_reduction(spec);
    SimState s = initialize(cfg.initial_state(), cfg.initial_velocity(), cfg.dt);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        s = step(s, ctx, map, cfg.solver).state;
        worst = std::max(worst, (spec.A() * s.p_curr + spec.d()).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("damped oscillation without gravity decays") {
    sim::SimConfig cfg = sim::SimConfig::wire_preset();
    cfg.params.g = 0.0;
    cfg.params.gamma = 20.0;
    cfg.velocity.assign(4 * 7, 0.0);
    cfg.velocity[4 * 3 + 1] = 5.0;
    const StepContext ctx = wire_context(cfg);
    const ReductionMap map = build_reduction(cfg.constraint_spec());
    SimState s = initialize(cfg.initial_state(), cfg.initial_velocity(), cfg.dt);
    const double y0 = s.p_curr[13];
    double early = 0.0, late = 0.0;
    for (int i = 1; i <= 600; ++i) {
        s = step(s, ctx, map, cfg.solver).state;
        const double dev = std::abs(s.p_curr[13] - y0);
        if (i <= 100) early = std::max(early, dev);
        if (i > 500) late = std::max(late, dev);
    }
    CHECK(early > 0.05);
    CHECK(late < 0.2 * early);
}

TEST_CASE("refining the time step converges") {
    const sim::SimConfig cfg = sim::SimConfig::wire_preset();
    const double t_end = 0.32;
    const Eigen::VectorXd coarse = run_wire(cfg, 0.008, t_end);
    const Eigen::VectorXd mid = run_wire(cfg, 0.004, t_end);
    const Eigen::VectorXd fine = run_wire(cfg, 0.002, t_end);
    const double e1 = (coarse - fine).norm();
    const double e2 = (mid - fine).norm();
    CHECK(e2 < e1);
    CHECK(e1 > 0.0);
}
