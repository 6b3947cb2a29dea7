#include "dnurbs/nurbs_curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dnurbs/bspline_basis.hpp"
#include "dnurbs/errors.hpp"

namespace dnurbs {

GeneralizedState::GeneralizedState(Eigen::VectorXd p) : p_(std::move(p)) {
    if (p_.size() == 0 || p_.size() % kDofPerControl != 0) {
        throw ContractError("generalized coordinate vector size must be a positive multiple of 4, got " +
                            std::to_string(p_.size()));
    }
    for (int i = 0; i < num_controls(); ++i) {
        if (!(weight(i) >= kMinWeight)) {
            throw DegenerateWeights("weight " + std::to_string(i) + " = " + std::to_string(weight(i)) +
                                    " below minimum " + std::to_string(kMinWeight));
        }
    }
}

namespace {

Eigen::VectorXd interleave(std::span<const Vec3> points, std::span<const double> weights) {
    if (points.size() != weights.size()) throw ContractError("points and weights differ in length");
    Eigen::VectorXd p(4 * static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        p.segment<3>(4 * i) = points[i];
        p[4 * i + 3] = weights[i];
    }
    return p;
}

void check_compatible(const GeneralizedState& state, const KnotVector& kv) {
    if (state.num_controls() != kv.num_basis()) {
        throw ContractError("state has " + std::to_string(state.num_controls()) +
                            " controls but knot vector spans " + std::to_string(kv.num_basis()));
    }
}

}  // namespace

GeneralizedState::GeneralizedState(std::span<const Vec3> points, std::span<const double> weights)
    : GeneralizedState(interleave(points, weights)) {}

Eigen::VectorXd GeneralizedState::p_b() const {
    Eigen::VectorXd out(3 * num_controls());
    for (int i = 0; i < num_controls(); ++i) out.segment<3>(3 * i) = point(i);
    return out;
}

Eigen::VectorXd GeneralizedState::p_w() const {
    Eigen::VectorXd out(num_controls());
    for (int i = 0; i < num_controls(); ++i) out[i] = weight(i);
    return out;
}

Vec3 JacobianEval::apply(const Eigen::VectorXd& p) const {
    Vec3 r = Vec3::Zero();
    for (int c = 0; c < count; ++c) {
        const int base = 4 * (first + c);
        r += rational[c] * p.segment<3>(base) + weight_cols[c] * p[base + 3];
    }
    return r;
}

Eigen::MatrixXd JacobianEval::dense(int num_controls) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 4 * num_controls);
    for (int c = 0; c < count; ++c) {
        const int base = 4 * (first + c);
        J.block<3, 3>(0, base).diagonal().setConstant(rational[c]);
        J.col(base + 3) = weight_cols[c];
    }
    return J;
}

JacobianDerivatives eval_jacobian_u_derivatives(const GeneralizedState& state, const KnotVector& kv, double u,
                                                int order) {
    check_compatible(state, kv);
    const LocalBasis b = eval_local_basis(kv, u, order);
    const int m = kv.num_basis();
    const int first = std::max(b.first, 0);
    const int last = std::min(b.first + b.order, m);  // exclusive
    const int count = last - first;
    const int off = first - b.first;

    // W = sum w B and its u-derivatives.
    double W = 0.0, W1 = 0.0, W2 = 0.0;
    for (int c = 0; c < count; ++c) {
        const double w = state.weight(first + c);
        W += w * b.values[off + c];
        W1 += w * b.d1[off + c];
        W2 += w * b.d2[off + c];
    }
    if (!(W > 0.0)) throw DegenerateWeights("rational denominator vanished at u = " + std::to_string(u));

    // R_i = B_i / W and its derivatives; N_i = w_i R_i.
    JacobianEval::Row R{}, R1{}, R2{};
    for (int c = 0; c < count; ++c) {
        const double B = b.values[off + c], B1 = b.d1[off + c], B2 = b.d2[off + c];
        R[c] = B / W;
        R1[c] = (B1 * W - B * W1) / (W * W);
        R2[c] = B2 / W - 2.0 * B1 * W1 / (W * W) - B * W2 / (W * W) + 2.0 * B * W1 * W1 / (W * W * W);
    }

    JacobianDerivatives out;
    for (JacobianEval* e : {&out.value, &out.du, &out.duu}) {
        e->u = u;
        e->first = first;
        e->count = count;
    }
    for (int c = 0; c < count; ++c) {
        const double w = state.weight(first + c);
        const Vec3 pt = state.point(first + c);
        out.value.rational[c] = w * R[c];
        out.du.rational[c] = w * R1[c];
        out.duu.rational[c] = w * R2[c];
        out.c += w * R[c] * pt;
        out.c_u += w * R1[c] * pt;
        out.c_uu += w * R2[c] * pt;
    }
    // dc/dw_i = R_i (p_i - c), differentiated in u.
    for (int c = 0; c < count; ++c) {
        const Vec3 rel = state.point(first + c) - out.c;
        out.value.weight_cols[c] = R[c] * rel;
        out.du.weight_cols[c] = R1[c] * rel - R[c] * out.c_u;
        out.duu.weight_cols[c] = R2[c] * rel - 2.0 * R1[c] * out.c_u - R[c] * out.c_uu;
    }
    return out;
}

JacobianEval eval_jacobian(const GeneralizedState& state, const KnotVector& kv, double u) {
    return eval_jacobian_u_derivatives(state, kv, u, 0).value;
}

Vec3 eval_curve(const GeneralizedState& state, const KnotVector& kv, double u) {
    return eval_jacobian_u_derivatives(state, kv, u, 0).c;
}

IdentityReport verify_jacobian_identities(const GeneralizedState& state, const Eigen::VectorXd& velocity,
                                          const KnotVector& kv, std::span<const double> params, double fd_step) {
    if (velocity.size() != state.num_dofs()) throw ContractError("velocity size does not match state");
    const Eigen::VectorXd& p = state.p();
    const int m = state.num_controls();
    const GeneralizedState fwd(p + fd_step * velocity);
    const GeneralizedState bwd(p - fd_step * velocity);

    std::vector<GeneralizedState> plus, minus;
    plus.reserve(p.size());
    minus.reserve(p.size());
    for (int i = 0; i < p.size(); ++i) {
        Eigen::VectorXd e = p;
        e[i] += fd_step;
        plus.emplace_back(e);
        e[i] -= 2.0 * fd_step;
        minus.emplace_back(std::move(e));
    }

    IdentityReport rep;
    for (double u : params) {
        const JacobianDerivatives d = eval_jacobian_u_derivatives(state, kv, u, 0);
        const JacobianEval& J = d.value;

        Vec3 wsum = Vec3::Zero();
        for (int c = 0; c < J.count; ++c) wsum += state.weight(J.first + c) * J.weight_cols[c];
        rep.weight_columns = std::max(rep.weight_columns, wsum.norm());

        rep.jp_curve = std::max(rep.jp_curve, (J.apply(p) - d.c).norm());

        // B p_b: rational columns only, evaluated independently of J.apply.
        const Eigen::MatrixXd Jd = J.dense(m);
        Vec3 bpb = Vec3::Zero();
        for (int i = 0; i < m; ++i) bpb += Jd.block<3, 3>(0, 4 * i) * state.point(i);
        rep.bpb_curve = std::max(rep.bpb_curve, (bpb - d.c).norm());

        const Vec3 jdot_p =
            (eval_jacobian(fwd, kv, u).apply(p) - eval_jacobian(bwd, kv, u).apply(p)) / (2.0 * fd_step);
        rep.jdot_p = std::max(rep.jdot_p, jdot_p.norm());

        for (int i = 0; i < p.size(); ++i) {
            const Vec3 r = (eval_jacobian(plus[i], kv, u).apply(p) - eval_jacobian(minus[i], kv, u).apply(p)) /
                           (2.0 * fd_step);
            rep.partial_j_p = std::max(rep.partial_j_p, r.norm());
        }
        ++rep.samples;
    }
    return rep;
}

}  // namespace dnurbs
