#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "dnurbs/assembly.hpp"
#include "dnurbs/nurbs_curve.hpp"

namespace dnurbs {

enum class Coord { x = 0, y = 1, z = 2, w = 3 };

/// Linear holonomic constraints A p + d = 0 on the 4m generalized coordinates.
class ConstraintSpec {
public:
    explicit ConstraintSpec(int num_dofs) : num_dofs_(num_dofs) {}

    int num_dofs() const noexcept { return num_dofs_; }
    int num_constraints() const noexcept { return static_cast<int>(rows_.size()); }

    /// Fix one coordinate of one control: p_(4i+coord) = value.
    void pin(int control, Coord coord, double value);
    /// Fix all four coordinates of a control at its value in `state`.
    void pin_control(const GeneralizedState& state, int control);
    /// Arbitrary row a . p + d = 0.
    void add_row(const Eigen::VectorXd& a, double d);

    Eigen::MatrixXd A() const;
    Eigen::VectorXd d() const;

private:
    int num_dofs_;
    std::vector<Eigen::VectorXd> rows_;
    std::vector<double> offsets_;
};

/// Parameterization p = G q + d0 of the constraint manifold. Rows of G are in
/// the original coordinate order; `dependent` and `free` list the coordinate
/// indices eliminated by the constraints and kept as q, respectively.
struct ReductionMap {
    std::vector<int> dependent;
    std::vector<int> free;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd d0;

    int full_size() const noexcept { return static_cast<int>(d0.size()); }
    int reduced_size() const noexcept { return static_cast<int>(free.size()); }

    /// Column ordering with dependent coordinates first.
    std::vector<int> permutation() const;
    /// G with rows reordered by permutation(): [-G1^{-1} G2; I].
    Eigen::MatrixXd permuted_G() const;

    Eigen::VectorXd reconstruct(const Eigen::VectorXd& q) const;
    /// Free coordinates of a full vector (exact inverse of reconstruct on the manifold).
    Eigen::VectorXd restrict(const Eigen::VectorXd& p) const;

    /// Identity map for an unconstrained system.
    static ReductionMap identity(int num_dofs);
};

/// Gauss-Jordan elimination of A with complete pivoting (threshold
/// 1e-10 * max|A|) chooses an invertible dependent block G1. Throws
/// InfeasibleConstraints if A is rank deficient.
ReductionMap build_reduction(const ConstraintSpec& spec);

/// Reduced (congruence) form of the governing equation in q.
struct ReducedSystem {
    Eigen::MatrixXd M, D, K, I;
    Eigen::VectorXd force;      ///< G^T f_p
    Eigen::VectorXd cross;      ///< G^T (cross term)
    Eigen::VectorXd stiffness_offset;  ///< -G^T K d0
};

/// Throws ContractError on dimension mismatch.
ReducedSystem reduce_system(const SystemMatrices& matrices, const Eigen::VectorXd& f_p, const Eigen::VectorXd& cross,
                            const ReductionMap& map);

/// G^T B G as a dense matrix, built from banded matvecs.
Eigen::MatrixXd congruence(const BandedMatrix& B, const ReductionMap& map);

}  // namespace dnurbs
