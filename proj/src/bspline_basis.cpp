#include "dnurbs/bspline_basis.hpp"

#include "dnurbs/errors.hpp"

namespace dnurbs {

namespace {

constexpr int K = KnotVector::kMaxOrder;

// x / d with the 0/0 = 0 convention of the recursion.
inline double safe_ratio(double x, double d) { return d > 0.0 ? x / d : 0.0; }

}  // namespace

LocalBasis eval_local_basis(const KnotVector& kv, double u, int max_order) {
    if (max_order < 0 || max_order > 2) throw ContractError("basis derivative order must be 0, 1 or 2");
    const auto& t = kv.knots();
    const int k = kv.order();
    const int n = kv.last_index();
    const int s = kv.find_span(u);
    const int lo = s - k + 1;

    // table[j][c] holds B_{lo+c, j}(u) for orders j = 1..k.
    std::array<std::array<double, K>, K + 1> table{};
    table[1][k - 1] = 1.0;
    for (int j = 2; j <= k; ++j) {
        for (int c = k - j; c < k; ++c) {
            const int i = lo + c;
            if (i < 0 || i + j > n) continue;
            double v = 0.0;
            if (c > k - j) v += safe_ratio(u - t[i], t[i + j - 1] - t[i]) * table[j - 1][c];
            if (c + 1 < k) v += safe_ratio(t[i + j] - u, t[i + j] - t[i + 1]) * table[j - 1][c + 1];
            table[j][c] = v;
        }
    }

    // d/du B_{i,j} = (j-1) [ B_{i,j-1}/(u_{i+j-1}-u_i) - B_{i+1,j-1}/(u_{i+j}-u_{i+1}) ]
    auto differentiate = [&](const std::array<double, K>& lower, int j, std::array<double, K>& out) {
        out.fill(0.0);
        for (int c = 0; c < k; ++c) {
            const int i = lo + c;
            if (i < 0 || i + j > n) continue;
            double v = safe_ratio(lower[c], t[i + j - 1] - t[i]);
            if (c + 1 < k) v -= safe_ratio(lower[c + 1], t[i + j] - t[i + 1]);
            out[c] = (j - 1) * v;
        }
    };

    LocalBasis out;
    out.span = s;
    out.first = lo;
    out.order = k;
    out.values = table[k];
    if (max_order >= 1 && k >= 2) differentiate(table[k - 1], k, out.d1);
    if (max_order >= 2 && k >= 3) {
        std::array<double, K> lower_d1{};
        differentiate(table[k - 2], k - 1, lower_d1);
        differentiate(lower_d1, k, out.d2);
    }
    return out;
}

BasisEval eval_bspline_derivatives(const KnotVector& kv, double u, int max_order) {
    const LocalBasis local = eval_local_basis(kv, u, max_order);
    const int m = kv.num_basis();
    BasisEval out;
    out.span_index = local.span;
    out.values.assign(m, 0.0);
    out.d1.assign(m, 0.0);
    out.d2.assign(m, 0.0);
    for (int c = 0; c < local.order; ++c) {
        const int i = local.first + c;
        if (i < 0 || i >= m) continue;
        out.values[i] = local.values[c];
        out.d1[i] = local.d1[c];
        out.d2[i] = local.d2[c];
    }
    return out;
}

BasisEval eval_bspline_basis(const KnotVector& kv, double u) { return eval_bspline_derivatives(kv, u, 2); }

}  // namespace dnurbs
