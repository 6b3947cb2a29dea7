#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dnurbs/knot_vector.hpp"

namespace dnurbs {

using Vec3 = Eigen::Vector3d;

/// Smallest admissible NURBS weight.
inline constexpr double kMinWeight = 1e-6;

/// Generalized coordinates of a NURBS curve: m control points and m weights,
/// stored interleaved as p = (x_0, y_0, z_0, w_0, x_1, ...).
class GeneralizedState {
public:
    static constexpr int kDofPerControl = 4;

    /// Takes ownership of an interleaved coordinate vector. Throws
    /// ContractError if the size is not a positive multiple of 4 and
    /// DegenerateWeights if any weight is below kMinWeight.
    explicit GeneralizedState(Eigen::VectorXd p);
    GeneralizedState(std::span<const Vec3> points, std::span<const double> weights);

    int num_controls() const noexcept { return static_cast<int>(p_.size()) / kDofPerControl; }
    int num_dofs() const noexcept { return static_cast<int>(p_.size()); }

    Vec3 point(int i) const { return p_.segment<3>(kDofPerControl * i); }
    double weight(int i) const { return p_[kDofPerControl * i + 3]; }

    const Eigen::VectorXd& p() const noexcept { return p_; }
    /// Control point block (3m).
    Eigen::VectorXd p_b() const;
    /// Weight block (m).
    Eigen::VectorXd p_w() const;

    static int weight_dof(int i) noexcept { return kDofPerControl * i + 3; }

private:
    Eigen::VectorXd p_;
};

/// Nonzero part of the 3 x 4m Jacobian of c(u, p) with respect to p, or of
/// one of its u-derivatives. Control `first + c` contributes the 3x4 block
/// [rational[c] * I_3 | weight_cols[c]].
struct JacobianEval {
    using Row = std::array<double, KnotVector::kMaxOrder>;
    using ColRow = std::array<Vec3, KnotVector::kMaxOrder>;

    double u = 0.0;
    int first = 0;
    int count = 0;
    Row rational{};
    ColRow weight_cols{};

    /// Apply to a full coordinate vector (3-vector J p).
    Vec3 apply(const Eigen::VectorXd& p) const;
    /// Dense 3 x 4m form.
    Eigen::MatrixXd dense(int num_controls) const;
};

/// J, J_u, J_uu at one parameter plus the curve point and its derivatives.
struct JacobianDerivatives {
    JacobianEval value;
    JacobianEval du;
    JacobianEval duu;
    Vec3 c = Vec3::Zero();
    Vec3 c_u = Vec3::Zero();
    Vec3 c_uu = Vec3::Zero();
};

Vec3 eval_curve(const GeneralizedState& state, const KnotVector& kv, double u);

JacobianEval eval_jacobian(const GeneralizedState& state, const KnotVector& kv, double u);

/// u-derivatives of the Jacobian up to `order` (0, 1 or 2). Derivatives above
/// `order` are left zero.
JacobianDerivatives eval_jacobian_u_derivatives(const GeneralizedState& state, const KnotVector& kv,
                                                double u, int order = 2);

/// Maximum residuals of the algebraic Jacobian identities over sampled
/// parameters. All entries should vanish up to round-off (or FD truncation for
/// the last two).
struct IdentityReport {
    double weight_columns = 0.0;    ///< |sum_i w_i dc/dw_i|
    double jp_curve = 0.0;          ///< |J p - c(u)|
    double bpb_curve = 0.0;         ///< |B p_b - c(u)|
    double jdot_p = 0.0;            ///< |(dJ/dt) p| along the given velocity
    double partial_j_p = 0.0;       ///< max_i |(dJ/dp_i) p|
    int samples = 0;
};

IdentityReport verify_jacobian_identities(const GeneralizedState& state, const Eigen::VectorXd& velocity,
                                          const KnotVector& kv, std::span<const double> params,
                                          double fd_step = 1e-6);

}  // namespace dnurbs
