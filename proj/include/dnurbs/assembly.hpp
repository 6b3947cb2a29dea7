#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dnurbs/banded_matrix.hpp"
#include "dnurbs/knot_vector.hpp"
#include "dnurbs/nurbs_curve.hpp"
#include "dnurbs/quadrature.hpp"

namespace dnurbs {

/// Material densities of the curve.
struct PhysicsParams {
    double mu = 30.0;     ///< mass density, kg/m
    double gamma = 0.0;   ///< damping density, kg/(m s)
    double alpha = 35.0;  ///< elasticity (tension), N
    double beta = 10.0;   ///< rigidity (bending), N m^2
    double g = 9.8;       ///< gravitational acceleration, m/s^2

    /// Throws ConfigError unless mu > 0 and gamma, alpha, beta >= 0.
    void validate() const;
};

/// One nonzero knot span [a, b] and the k consecutive controls active on it.
struct Element {
    double a = 0.0;
    double b = 0.0;
    int span = 0;
    int first_control = 0;
};

struct ElementPartition {
    int order = 0;
    std::vector<Element> elements;

    int size() const noexcept { return static_cast<int>(elements.size()); }
};

/// Split an open knot vector into its nonzero spans. Throws
/// UnsupportedKnotVector if the vector is not open.
ElementPartition partition_elements(const KnotVector& kv);

/// Global operators, each 4m x 4m in banded storage with half-bandwidth 4k.
/// M, D and K are symmetric; I (inertial coupling) is not.
struct SystemMatrices {
    BandedMatrix M;
    BandedMatrix D;
    BandedMatrix K;
    BandedMatrix I;
};

/// Two states bracketing the assembly state in time. The Jacobian rate is
/// approximated as (J(after) - J(before)) / interval.
struct JacobianRate {
    const GeneralizedState& before;
    const GeneralizedState& after;
    double interval;
};

/// Element-by-element Gauss quadrature of
///   M = int mu J^T J,  D = int gamma J^T J,
///   K = int alpha J_u^T J_u + beta J_uu^T J_uu,
///   I = int mu J^T Jdot    (zero when `rate` is empty).
SystemMatrices assemble_matrices(const GeneralizedState& state, const KnotVector& kv, const PhysicsParams& params,
                                 const QuadratureRule& quad, const std::optional<JacobianRate>& rate = std::nullopt);

/// Force per unit parameter length as a function of curve position.
using ForceDensity = std::function<Vec3(const Vec3&)>;

/// Uniform gravity field -mu g e_y.
ForceDensity gravity_density(const PhysicsParams& params);

/// Generalized force f_p = int J^T f(c(u)) du.
Eigen::VectorXd assemble_force_vector(const GeneralizedState& state, const KnotVector& kv,
                                      const QuadratureRule& quad, const ForceDensity& force);

/// int mu J(state_new)^T c(state_old; u) du.
Eigen::VectorXd assemble_cross_term(const GeneralizedState& state_new, const GeneralizedState& state_old,
                                    const KnotVector& kv, const PhysicsParams& params, const QuadratureRule& quad);

}  // namespace dnurbs
