#pragma once

#include <array>
#include <vector>

#include "dnurbs/knot_vector.hpp"

namespace dnurbs {

/// Basis functions of one knot span: the k functions first..first+k-1 that
/// can be nonzero on [u_s, u_{s+1}). Entries whose index falls outside
/// [0, m) are stored as zero, which happens only for non-open knot vectors.
struct LocalBasis {
    using Row = std::array<double, KnotVector::kMaxOrder>;

    int span = 0;
    int first = 0;  ///< span - k + 1; may be negative
    int order = 0;
    Row values{};
    Row d1{};
    Row d2{};
};

/// Dense evaluation over all m basis functions.
struct BasisEval {
    int span_index = 0;
    std::vector<double> values;
    std::vector<double> d1;
    std::vector<double> d2;
};

/// Cox-de Boor recursion restricted to the span of u, with derivatives up to
/// `max_order` (0, 1 or 2) obtained by differentiating the recursion. Any term
/// whose knot difference vanishes contributes zero.
LocalBasis eval_local_basis(const KnotVector& kv, double u, int max_order = 2);

BasisEval eval_bspline_basis(const KnotVector& kv, double u);

/// Same as eval_bspline_basis but only fills derivatives up to `max_order`;
/// higher ones are left zero. Throws ContractError if max_order is not in [0, 2].
BasisEval eval_bspline_derivatives(const KnotVector& kv, double u, int max_order);

}  // namespace dnurbs
