#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "dnurbs/assembly.hpp"
#include "dnurbs/constraints.hpp"
#include "dnurbs/knot_vector.hpp"
#include "dnurbs/nurbs_curve.hpp"
#include "dnurbs/quadrature.hpp"

namespace dnurbs {

struct SolverConfig {
    double tol = 1e-10;  ///< relative residual |Ax - b| / |b|
    int max_iter = 0;    ///< 0 selects 10 * dimension

    /// Throws ConfigError unless tol > 0 and max_iter >= 0.
    void validate() const;
};

struct CgResult {
    Eigen::VectorXd x;
    int iterations = 0;
    /// True relative residual |b - A x| / |b|, recomputed after the last iterate.
    double residual = 0.0;
};

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Conjugate gradient for a symmetric positive definite operator. Throws
/// SolverDivergence when the cap is reached or p^T A p <= 0 is encountered.
CgResult solve_cg(const LinearOperator& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                  const std::optional<Eigen::VectorXd>& x0 = std::nullopt);
CgResult solve_cg(const BandedMatrix& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                  const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

enum class WeightPolicy { free, reset_to_initial, pinned };

std::string_view to_string(WeightPolicy p);
/// Throws ConfigError on an unknown name.
WeightPolicy parse_weight_policy(std::string_view name);

/// p at t and t - dt.
struct SimState {
    Eigen::VectorXd p_curr;
    Eigen::VectorXd p_prev;
    double t = 0.0;
    int step = 0;
};

/// p_prev = p0 - dt v0. Throws ConfigError for dt <= 0.
SimState initialize(const GeneralizedState& state0, const Eigen::VectorXd& v0, double dt);

/// Free: unchanged. Reset: weights restored to `initial_weights`. Pinned:
/// unchanged, the constraints already hold the weights.
Eigen::VectorXd apply_weight_policy(const Eigen::VectorXd& p, WeightPolicy policy,
                                    const Eigen::VectorXd& initial_weights);

/// Pin every weight at its value in `state`.
void pin_weights(ConstraintSpec& spec, const GeneralizedState& state);

/// Fixed inputs of the time stepper.
struct StepContext {
    KnotVector kv;
    PhysicsParams params;
    QuadratureRule quad;
    ForceDensity force;
    double dt = 0.008;
    WeightPolicy policy = WeightPolicy::reset_to_initial;
    Eigen::VectorXd initial_weights;
};

struct StepOutcome {
    SimState state;
    int cg_iterations = 0;
    double residual = 0.0;
};

/// Advance one step of
///   (4M + 2 dt D + 4 dt^2 K) p+ = 4 dt^2 f + 8 M p - (3M - 2 dt D) p- - int mu J^T c(p-)
/// with M, D, K, f and J assembled at the current state. The system is solved
/// for the free coordinates q of p+ = G q + d0 by CG on G^T A0 G.
StepOutcome step(const SimState& sim, const StepContext& ctx, const ReductionMap& reduction,
                 const SolverConfig& solver);

}  // namespace dnurbs
