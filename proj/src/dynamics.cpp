#include "dnurbs/dynamics.hpp"

#include <cmath>
#include <string>

#include "dnurbs/errors.hpp"

namespace dnurbs {

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (max_iter < 0) throw ConfigError("solver iteration cap must be nonnegative");
}

CgResult solve_cg(const LinearOperator& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                  const std::optional<Eigen::VectorXd>& x0) {
    cfg.validate();
    const auto n = b.size();
    CgResult out;
    out.x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
    if (out.x.size() != n) throw ContractError("cg: initial guess has wrong size");
    const double bnorm = b.norm();
    if (n == 0 || bnorm == 0.0) {
        out.x.setZero();
        return out;
    }
    const int cap = cfg.max_iter > 0 ? cfg.max_iter : static_cast<int>(10 * n);

    Eigen::VectorXd r = b - A(out.x);
    double rr = r.squaredNorm();
    if (std::sqrt(rr) <= cfg.tol * bnorm) {
        out.residual = std::sqrt(rr) / bnorm;
        return out;
    }
    Eigen::VectorXd p = r;
    while (out.iterations < cap) {
        const Eigen::VectorXd Ap = A(p);
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) {
            throw SolverDivergence("cg: operator is not positive definite (p^T A p = " + std::to_string(pAp) + ")",
                                   std::sqrt(rr) / bnorm, out.iterations);
        }
        const double step = rr / pAp;
        out.x += step * p;
        r -= step * Ap;
        ++out.iterations;
        double rr_new = r.squaredNorm();
        if (std::sqrt(rr_new) <= cfg.tol * bnorm) {
            // Confirm against the true residual before accepting.
            r = b - A(out.x);
            rr_new = r.squaredNorm();
            if (std::sqrt(rr_new) <= cfg.tol * bnorm) {
                out.residual = std::sqrt(rr_new) / bnorm;
                return out;
            }
            rr = rr_new;
            p = r;
            continue;
        }
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    const double res = (b - A(out.x)).norm() / bnorm;
    throw SolverDivergence("cg: no convergence in " + std::to_string(cap) + " iterations (residual " +
                               std::to_string(res) + ")",
                           res, out.iterations);
}

CgResult solve_cg(const BandedMatrix& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                  const std::optional<Eigen::VectorXd>& x0) {
    return solve_cg([&A](const Eigen::VectorXd& v) { return A.multiply(v); }, b, cfg, x0);
}

std::string_view to_string(WeightPolicy p) {
    switch (p) {
        case WeightPolicy::free: return "free";
        case WeightPolicy::reset_to_initial: return "reset";
        case WeightPolicy::pinned: return "pinned";
    }
    return "?";
}

WeightPolicy parse_weight_policy(std::string_view name) {
    if (name == "free") return WeightPolicy::free;
    if (name == "reset" || name == "reset_to_initial") return WeightPolicy::reset_to_initial;
    if (name == "pinned") return WeightPolicy::pinned;
    throw ConfigError("unknown weight policy '" + std::string(name) + "' (expected free, reset or pinned)");
}

SimState initialize(const GeneralizedState& state0, const Eigen::VectorXd& v0, double dt) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (v0.size() != state0.num_dofs()) throw ContractError("initial velocity has wrong size");
    return SimState{state0.p(), state0.p() - dt * v0, 0.0, 0};
}

Eigen::VectorXd apply_weight_policy(const Eigen::VectorXd& p, WeightPolicy policy,
                                    const Eigen::VectorXd& initial_weights) {
    if (policy != WeightPolicy::reset_to_initial) return p;
    if (4 * initial_weights.size() != p.size()) throw ContractError("initial weights do not match state");
    Eigen::VectorXd out = p;
    for (Eigen::Index i = 0; i < initial_weights.size(); ++i) out[4 * i + 3] = initial_weights[i];
    return out;
}

void pin_weights(ConstraintSpec& spec, const GeneralizedState& state) {
    for (int i = 0; i < state.num_controls(); ++i) spec.pin(i, Coord::w, state.weight(i));
}

StepOutcome step(const SimState& sim, const StepContext& ctx, const ReductionMap& reduction,
                 const SolverConfig& solver) {
    const double dt = ctx.dt;
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (reduction.full_size() != sim.p_curr.size()) throw ContractError("reduction map does not match state");

    const GeneralizedState curr(sim.p_curr);
    const GeneralizedState prev(sim.p_prev);

    StepOutcome out;
    Eigen::VectorXd p_next;
    if (reduction.reduced_size() == 0) {
        p_next = reduction.d0;
    } else {
        const SystemMatrices mats = assemble_matrices(curr, ctx.kv, ctx.params, ctx.quad);
        const Eigen::VectorXd f = assemble_force_vector(curr, ctx.kv, ctx.quad, ctx.force);
        const Eigen::VectorXd cross = assemble_cross_term(curr, prev, ctx.kv, ctx.params, ctx.quad);

        BandedMatrix A0 = mats.M;
        A0.scale(4.0).add_scaled(mats.D, 2.0 * dt).add_scaled(mats.K, 4.0 * dt * dt);

        const Eigen::VectorXd A1 = 4.0 * dt * dt * f + 8.0 * mats.M.multiply(sim.p_curr) -
                                   3.0 * mats.M.multiply(sim.p_prev) + 2.0 * dt * mats.D.multiply(sim.p_prev) -
                                   cross;

        const auto& G = reduction.G;
        const Eigen::VectorXd rhs = G.transpose() * (A1 - A0.multiply(reduction.d0));
        const LinearOperator reduced = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
            return G.transpose() * A0.multiply(G * q);
        };
        const CgResult cg = solve_cg(reduced, rhs, solver, reduction.restrict(sim.p_curr));
        out.cg_iterations = cg.iterations;
        out.residual = cg.residual;
        p_next = reduction.reconstruct(cg.x);
    }

    p_next = apply_weight_policy(p_next, ctx.policy, ctx.initial_weights);
    // Validates the weights of the new state.
    GeneralizedState checked(p_next);

    out.state.p_prev = sim.p_curr;
    out.state.p_curr = checked.p();
    out.state.t = sim.t + dt;
    out.state.step = sim.step + 1;
    return out;
}

}  // namespace dnurbs
