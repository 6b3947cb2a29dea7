#include "dnurbs/constraints.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dnurbs/errors.hpp"

namespace dnurbs {

void ConstraintSpec::pin(int control, Coord coord, double value) {
    const int idx = 4 * control + static_cast<int>(coord);
    if (control < 0 || idx >= num_dofs_) throw ContractError("pinned control index out of range");
    Eigen::VectorXd a = Eigen::VectorXd::Zero(num_dofs_);
    a[idx] = 1.0;
    add_row(a, -value);
}

void ConstraintSpec::pin_control(const GeneralizedState& state, int control) {
    if (state.num_dofs() != num_dofs_) throw ContractError("state size does not match constraint space");
    for (int c = 0; c < 4; ++c) pin(control, static_cast<Coord>(c), state.p()[4 * control + c]);
}

void ConstraintSpec::add_row(const Eigen::VectorXd& a, double d) {
    if (a.size() != num_dofs_) throw ContractError("constraint row has wrong length");
    rows_.push_back(a);
    offsets_.push_back(d);
}

Eigen::MatrixXd ConstraintSpec::A() const {
    Eigen::MatrixXd out(num_constraints(), num_dofs_);
    for (int r = 0; r < num_constraints(); ++r) out.row(r) = rows_[r].transpose();
    return out;
}

Eigen::VectorXd ConstraintSpec::d() const {
    return Eigen::Map<const Eigen::VectorXd>(offsets_.data(), static_cast<Eigen::Index>(offsets_.size()));
}

std::vector<int> ReductionMap::permutation() const {
    std::vector<int> perm(dependent);
    perm.insert(perm.end(), free.begin(), free.end());
    return perm;
}

Eigen::MatrixXd ReductionMap::permuted_G() const {
    const Eigen::MatrixXd dense = G;
    const std::vector<int> perm = permutation();
    Eigen::MatrixXd out(dense.rows(), dense.cols());
    for (std::size_t r = 0; r < perm.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = dense.row(perm[r]);
    return out;
}

Eigen::VectorXd ReductionMap::reconstruct(const Eigen::VectorXd& q) const {
    if (q.size() != reduced_size()) throw ContractError("reduced vector has wrong size");
    return G * q + d0;
}

Eigen::VectorXd ReductionMap::restrict(const Eigen::VectorXd& p) const {
    if (p.size() != full_size()) throw ContractError("full vector has wrong size");
    Eigen::VectorXd q(reduced_size());
    for (int j = 0; j < reduced_size(); ++j) q[j] = p[free[j]];
    return q;
}

ReductionMap ReductionMap::identity(int num_dofs) {
    ReductionMap map;
    map.free.resize(num_dofs);
    std::iota(map.free.begin(), map.free.end(), 0);
    map.G.resize(num_dofs, num_dofs);
    map.G.setIdentity();
    map.d0 = Eigen::VectorXd::Zero(num_dofs);
    return map;
}

ReductionMap build_reduction(const ConstraintSpec& spec) {
    const int n = spec.num_dofs();
    const int rows = spec.num_constraints();
    if (rows == 0) return ReductionMap::identity(n);
    if (rows > n) throw InfeasibleConstraints("more constraints than coordinates");

    Eigen::MatrixXd a = spec.A();
    Eigen::VectorXd d = spec.d();
    const double threshold = 1e-10 * a.cwiseAbs().maxCoeff();
    if (!(threshold > 0.0)) throw InfeasibleConstraints("constraint matrix is zero");

    std::vector<bool> used(n, false);
    std::vector<int> pivot_col(rows, -1);
    std::vector<bool> row_done(rows, false);
    for (int step = 0; step < rows; ++step) {
        int pr = -1, pc = -1;
        double best = 0.0;
        for (int r = 0; r < rows; ++r) {
            if (row_done[r]) continue;
            for (int c = 0; c < n; ++c) {
                if (used[c]) continue;
                if (std::abs(a(r, c)) > best) {
                    best = std::abs(a(r, c));
                    pr = r;
                    pc = c;
                }
            }
        }
        if (best <= threshold) {
            throw InfeasibleConstraints("constraint rows are rank deficient (rank " + std::to_string(step) + " of " +
                                        std::to_string(rows) + ")");
        }
        const double inv = 1.0 / a(pr, pc);
        a.row(pr) *= inv;
        d[pr] *= inv;
        a(pr, pc) = 1.0;
        for (int r = 0; r < rows; ++r) {
            if (r == pr || a(r, pc) == 0.0) continue;
            const double f = a(r, pc);
            a.row(r) -= f * a.row(pr);
            d[r] -= f * d[pr];
            a(r, pc) = 0.0;
        }
        used[pc] = true;
        row_done[pr] = true;
        pivot_col[pr] = pc;
    }

    ReductionMap map;
    map.dependent = pivot_col;
    std::vector<int> free_pos(n, -1);
    for (int c = 0; c < n; ++c) {
        if (!used[c]) {
            free_pos[c] = static_cast<int>(map.free.size());
            map.free.push_back(c);
        }
    }

    // Reduced rows: p_dep = -d' - sum_free a'_j p_j.
    std::vector<Eigen::Triplet<double>> trip;
    map.d0 = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < rows; ++r) {
        const int dep = pivot_col[r];
        map.d0[dep] = -d[r];
        for (int c : map.free) {
            if (a(r, c) != 0.0) trip.emplace_back(dep, free_pos[c], -a(r, c));
        }
    }
    for (int c : map.free) trip.emplace_back(c, free_pos[c], 1.0);
    map.G.resize(n, static_cast<Eigen::Index>(map.free.size()));
    map.G.setFromTriplets(trip.begin(), trip.end());
    return map;
}

Eigen::MatrixXd congruence(const BandedMatrix& B, const ReductionMap& map) {
    if (B.rows() != map.full_size()) throw ContractError("congruence: matrix and map sizes differ");
    const int r = map.reduced_size();
    Eigen::MatrixXd BG(map.full_size(), r);
    for (int j = 0; j < r; ++j) BG.col(j) = B.multiply(Eigen::VectorXd(map.G.col(j)));
    return map.G.transpose() * BG;
}

ReducedSystem reduce_system(const SystemMatrices& matrices, const Eigen::VectorXd& f_p, const Eigen::VectorXd& cross,
                            const ReductionMap& map) {
    const int n = map.full_size();
    if (matrices.M.rows() != n || matrices.D.rows() != n || matrices.K.rows() != n || matrices.I.rows() != n ||
        f_p.size() != n || cross.size() != n) {
        throw ContractError("reduce_system: dimension mismatch with reduction map");
    }
    ReducedSystem out;
    out.M = congruence(matrices.M, map);
    out.D = congruence(matrices.D, map);
    out.K = congruence(matrices.K, map);
    out.I = congruence(matrices.I, map);
    out.force = map.G.transpose() * f_p;
    out.cross = map.G.transpose() * cross;
    out.stiffness_offset = -(map.G.transpose() * matrices.K.multiply(map.d0));
    return out;
}

}  // namespace dnurbs
