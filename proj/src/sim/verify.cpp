#include "dnurbs/verify.hpp"

#include <algorithm>
#include <cmath>

#include "dnurbs/assembly.hpp"
#include "dnurbs/bspline_basis.hpp"
#include "dnurbs/constraints.hpp"
#include "dnurbs/dynamics.hpp"
#include "dnurbs/simulation.hpp"

namespace dnurbs::sim {

KnotVector random_open_knot_vector(std::mt19937_64& rng, int order, int num_basis) {
    std::uniform_real_distribution<double> spread(0.2, 1.0);
    const int gaps = num_basis - order + 1;
    const double min_gap = std::min(0.02, 0.5 / gaps);
    std::vector<double> g(gaps);
    double total = 0.0;
    for (double& v : g) total += (v = spread(rng));
    std::vector<double> knots(order, 0.0);
    double u = 0.0;
    for (int i = 0; i + 1 < gaps; ++i) {
        u += min_gap + (1.0 - min_gap * gaps) * g[i] / total;
        knots.push_back(u);
    }
    knots.insert(knots.end(), order, 1.0);
    return KnotVector(std::move(knots), order);
}

GeneralizedState random_state(std::mt19937_64& rng, int num_controls, double w_lo, double w_hi, double scale,
                              bool planar) {
    std::uniform_real_distribution<double> coord(-scale, scale);
    std::uniform_real_distribution<double> weight(w_lo, w_hi);
    Eigen::VectorXd p(4 * num_controls);
    for (int i = 0; i < num_controls; ++i) {
        p[4 * i] = coord(rng);
        p[4 * i + 1] = coord(rng);
        p[4 * i + 2] = planar ? 0.0 : coord(rng);
        p[4 * i + 3] = weight(rng);
    }
    return GeneralizedState(p);
}

namespace {

CheckResult check(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, value <= threshold};
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> order_dist(2, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<CheckResult> out;

    // Basis: partition of unity and nonnegativity.
    {
        double pou = 0.0, neg = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int k = order_dist(rng);
            const KnotVector kv = random_open_knot_vector(rng, k, k + 1 + static_cast<int>(unit(rng) * 20));
            for (int s = 0; s < 1000; ++s) {
                const BasisEval b = eval_bspline_basis(kv, unit(rng));
                double sum = 0.0;
                for (double v : b.values) {
                    sum += v;
                    neg = std::max(neg, -v);
                }
                pou = std::max(pou, std::abs(sum - 1.0));
            }
        }
        out.push_back(check("basis partition of unity", pou, 1e-12));
        out.push_back(check("basis nonnegativity", neg, 1e-15));
    }

    // Jacobian identities.
    {
        IdentityReport worst;
        for (int trial = 0; trial < 20; ++trial) {
            const int k = order_dist(rng);
            const int m = k + static_cast<int>(unit(rng) * 5);
            const KnotVector kv = random_open_knot_vector(rng, k, m);
            const GeneralizedState s = random_state(rng, m);
            std::vector<double> us(5);
            for (double& u : us) u = unit(rng);
            const IdentityReport r = verify_jacobian_identities(s, random_vector(rng, s.num_dofs()), kv, us);
            worst.weight_columns = std::max(worst.weight_columns, r.weight_columns);
            worst.jp_curve = std::max(worst.jp_curve, r.jp_curve);
            worst.bpb_curve = std::max(worst.bpb_curve, r.bpb_curve);
            worst.jdot_p = std::max(worst.jdot_p, r.jdot_p);
            worst.partial_j_p = std::max(worst.partial_j_p, r.partial_j_p);
        }
        out.push_back(check("W p_w = 0", worst.weight_columns, 1e-12));
        out.push_back(check("J p = c(u)", worst.jp_curve, 1e-12));
        out.push_back(check("B p_b = c(u)", worst.bpb_curve, 1e-12));
        out.push_back(check("(dJ/dt) p = 0 (FD)", worst.jdot_p, 1e-6));
        out.push_back(check("(dJ/dp_i) p = 0 (FD)", worst.partial_j_p, 1e-6));
    }

    // Assembly structure.
    {
        double sym = 0.0, prop = 0.0, psd = 0.0;
        PhysicsParams params{2.0, 3.0, 1.5, 0.5, 9.8};
        const QuadratureRule quad = QuadratureRule::gauss_legendre(10);
        for (int trial = 0; trial < 10; ++trial) {
            const int k = order_dist(rng);
            const int m = k + 1 + static_cast<int>(unit(rng) * 4);
            const KnotVector kv = random_open_knot_vector(rng, k, m);
            const GeneralizedState s = random_state(rng, m);
            const SystemMatrices mats = assemble_matrices(s, kv, params, quad);
            for (const BandedMatrix* b : {&mats.M, &mats.D, &mats.K}) {
                if (!b->is_symmetric()) sym = 1.0;
            }
            const Eigen::MatrixXd M = mats.M.to_dense();
            const Eigen::MatrixXd D = mats.D.to_dense();
            prop = std::max(prop, (D - (params.gamma / params.mu) * M).cwiseAbs().maxCoeff() / M.cwiseAbs().maxCoeff());
            const double norm = M.norm();
            for (int v = 0; v < 10; ++v) {
                const Eigen::VectorXd x = random_vector(rng, s.num_dofs());
                psd = std::max(psd, -(x.dot(M * x) / x.squaredNorm()) / norm);
            }
        }
        out.push_back(check("M, D, K structurally symmetric", sym, 0.0));
        out.push_back(check("D = (gamma/mu) M", prop, 1e-12));
        out.push_back(check("M positive semidefinite (Rayleigh)", psd, 1e-10));
    }

    // Vanishing stiffness gradient term: p^T (dK/dp_i) p = 0.
    {
        double worst = 0.0;
        PhysicsParams params{1.0, 0.0, 2.0, 0.7, 0.0};
        const QuadratureRule quad = QuadratureRule::gauss_legendre(8);
        const KnotVector kv = random_open_knot_vector(rng, 3, 5);
        const GeneralizedState s = random_state(rng, 5);
        const double h = 1e-6;
        double scale = 0.0;
        for (int i = 0; i < s.num_dofs(); ++i) {
            Eigen::VectorXd pp = s.p(), pm = s.p();
            pp[i] += h;
            pm[i] -= h;
            const double kp = s.p().dot(assemble_matrices(GeneralizedState(pp), kv, params, quad).K.multiply(s.p()));
            const double km = s.p().dot(assemble_matrices(GeneralizedState(pm), kv, params, quad).K.multiply(s.p()));
            worst = std::max(worst, std::abs(0.5 * (kp - km) / (2.0 * h)));
        }
        scale = s.p().dot(assemble_matrices(s, kv, params, quad).K.multiply(s.p()));
        out.push_back(check("1/2 p^T (dK/dp) p = 0 (FD, relative)", worst / std::max(scale, 1.0), 1e-6));
    }

    // Reduction residual on random full-rank constraints.
    {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            ConstraintSpec spec(16);
            for (int r = 0; r < 5; ++r) spec.add_row(random_vector(rng, 16), random_vector(rng, 1)[0]);
            const ReductionMap map = build_reduction(spec);
            const Eigen::VectorXd p = map.reconstruct(random_vector(rng, map.reduced_size()));
            worst = std::max(worst, (spec.A() * p + spec.d()).cwiseAbs().maxCoeff());
        }
        out.push_back(check("A (G q + d0) + d = 0", worst, 1e-10));
    }

    // CG on random banded SPD systems.
    {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 10 + static_cast<int>(unit(rng) * 190);
            const int hb = 1 + static_cast<int>(unit(rng) * 6);
            BandedMatrix A(n, hb);
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j <= std::min(n - 1, i + hb); ++j) {
                    const double v = unit(rng) - 0.5;
                    A.add(i, j, v);
                    A.add(j, i, v);
                }
                A.add(i, i, 2.0 * hb + unit(rng));
            }
            const Eigen::VectorXd b = random_vector(rng, n);
            const CgResult r = solve_cg(A, b, SolverConfig{});
            worst = std::max(worst, (b - A.multiply(r.x)).norm() / b.norm());
        }
        out.push_back(check("CG relative residual", worst, 1e-10));
    }

    // Constrained wire run.
    {
        SimConfig wire = SimConfig::wire_preset();
        wire.steps = 100;
        const SimulationResult r = run_simulation(wire);
        out.push_back(check("wire constraint residual |Ap + d|", r.max_constraint_residual, 1e-9));
    }
    return out;
}

}  // namespace dnurbs::sim
