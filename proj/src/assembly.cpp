#include "dnurbs/assembly.hpp"

#include <string>

#include "dnurbs/errors.hpp"

namespace dnurbs {

namespace {

using LocalJ = Eigen::Matrix<double, 3, Eigen::Dynamic>;

// 3 x 4k block of the Jacobian restricted to the element's controls.
LocalJ local_block(const JacobianEval& J, int first_control, int k) {
    if (J.first != first_control || J.count != k) throw ContractError("jacobian support does not match element");
    LocalJ out = LocalJ::Zero(3, 4 * k);
    for (int c = 0; c < k; ++c) {
        out.block<3, 3>(0, 4 * c).diagonal().setConstant(J.rational[c]);
        out.col(4 * c + 3) = J.weight_cols[c];
    }
    return out;
}

double parameter_at(const Element& e, double xi) { return 0.5 * (e.a + e.b) + 0.5 * (e.b - e.a) * xi; }

void scatter(BandedMatrix& global, const Eigen::MatrixXd& local, int first_control) {
    const int base = 4 * first_control;
    for (int r = 0; r < local.rows(); ++r) {
        for (int c = 0; c < local.cols(); ++c) global.add(base + r, base + c, local(r, c));
    }
}

// Mirror the upper triangle so the scattered block is exactly symmetric.
void symmetrize(Eigen::MatrixXd& a) { a.triangularView<Eigen::StrictlyLower>() = a.transpose(); }

}  // namespace

void PhysicsParams::validate() const {
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
    if (!(beta >= 0.0)) throw ConfigError("beta must be nonnegative");
}

ElementPartition partition_elements(const KnotVector& kv) {
    if (!kv.is_open()) {
        throw UnsupportedKnotVector("element partition requires an open knot vector (" +
                                    std::string(to_string(kv.classification())) + " given)");
    }
    ElementPartition part;
    part.order = kv.order();
    const auto& t = kv.knots();
    const int k = kv.order();
    for (int s = k - 1; s < kv.num_basis(); ++s) {
        if (t[s] < t[s + 1]) part.elements.push_back({t[s], t[s + 1], s, s - k + 1});
    }
    return part;
}

SystemMatrices assemble_matrices(const GeneralizedState& state, const KnotVector& kv, const PhysicsParams& params,
                                 const QuadratureRule& quad, const std::optional<JacobianRate>& rate) {
    params.validate();
    if (quad.size() < 1) throw ConfigError("quadrature needs at least one point");
    const ElementPartition part = partition_elements(kv);
    const int k = kv.order();
    const int n = state.num_dofs();
    const int hb = 4 * k;

    SystemMatrices out{BandedMatrix(n, hb), BandedMatrix(n, hb), BandedMatrix(n, hb), BandedMatrix(n, hb)};

    Eigen::MatrixXd gram(4 * k, 4 * k), stiff(4 * k, 4 * k), inertial(4 * k, 4 * k);
    for (const Element& e : part.elements) {
        gram.setZero();
        stiff.setZero();
        inertial.setZero();
        const double scale = 0.5 * (e.b - e.a);
        for (int q = 0; q < quad.size(); ++q) {
            const double u = parameter_at(e, quad.nodes[q]);
            const double w = quad.weights[q] * scale;
            const JacobianDerivatives d = eval_jacobian_u_derivatives(state, kv, u, 2);
            const LocalJ J = local_block(d.value, e.first_control, k);
            const LocalJ Ju = local_block(d.du, e.first_control, k);
            const LocalJ Juu = local_block(d.duu, e.first_control, k);
            gram.triangularView<Eigen::Upper>() += w * (J.transpose() * J);
            stiff.triangularView<Eigen::Upper>() +=
                w * (params.alpha * (Ju.transpose() * Ju) + params.beta * (Juu.transpose() * Juu));
            if (rate) {
                const LocalJ Ja = local_block(eval_jacobian(rate->after, kv, u), e.first_control, k);
                const LocalJ Jb = local_block(eval_jacobian(rate->before, kv, u), e.first_control, k);
                inertial += (w * params.mu / rate->interval) * (J.transpose() * (Ja - Jb));
            }
        }
        symmetrize(gram);
        symmetrize(stiff);
        scatter(out.M, params.mu * gram, e.first_control);
        scatter(out.D, params.gamma * gram, e.first_control);
        scatter(out.K, stiff, e.first_control);
        if (rate) scatter(out.I, inertial, e.first_control);
    }
    return out;
}

ForceDensity gravity_density(const PhysicsParams& params) {
    const Vec3 f(0.0, -params.mu * params.g, 0.0);
    return [f](const Vec3&) { return f; };
}

Eigen::VectorXd assemble_force_vector(const GeneralizedState& state, const KnotVector& kv,
                                      const QuadratureRule& quad, const ForceDensity& force) {
    const ElementPartition part = partition_elements(kv);
    const int k = kv.order();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(state.num_dofs());
    for (const Element& e : part.elements) {
        const double scale = 0.5 * (e.b - e.a);
        for (int q = 0; q < quad.size(); ++q) {
            const double u = parameter_at(e, quad.nodes[q]);
            const JacobianDerivatives d = eval_jacobian_u_derivatives(state, kv, u, 0);
            const LocalJ J = local_block(d.value, e.first_control, k);
            f.segment(4 * e.first_control, 4 * k) += (quad.weights[q] * scale) * (J.transpose() * force(d.c));
        }
    }
    return f;
}

Eigen::VectorXd assemble_cross_term(const GeneralizedState& state_new, const GeneralizedState& state_old,
                                    const KnotVector& kv, const PhysicsParams& params, const QuadratureRule& quad) {
    if (state_new.num_dofs() != state_old.num_dofs()) throw ContractError("cross term: state sizes differ");
    const ElementPartition part = partition_elements(kv);
    const int k = kv.order();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(state_new.num_dofs());
    for (const Element& e : part.elements) {
        const double scale = 0.5 * (e.b - e.a);
        for (int q = 0; q < quad.size(); ++q) {
            const double u = parameter_at(e, quad.nodes[q]);
            const LocalJ J = local_block(eval_jacobian(state_new, kv, u), e.first_control, k);
            const Vec3 c_old = eval_curve(state_old, kv, u);
            r.segment(4 * e.first_control, 4 * k) += (quad.weights[q] * scale * params.mu) * (J.transpose() * c_old);
        }
    }
    return r;
}

}  // namespace dnurbs
