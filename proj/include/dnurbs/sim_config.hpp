#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dnurbs/assembly.hpp"
#include "dnurbs/constraints.hpp"
#include "dnurbs/dynamics.hpp"
#include "dnurbs/nurbs_curve.hpp"

namespace dnurbs::sim {

struct PinnedDof {
    int control = 0;
    Coord coord = Coord::x;
};

/// Raw constraint row a . p + d = 0.
struct ConstraintRow {
    std::vector<double> a;
    double d = 0.0;
};

/// Everything needed to run one simulation.
///
/// Text format: one `key = value` per line, `#` starts a comment. Lists are
/// whitespace or comma separated; `points` separates control points with `;`.
///
///   order        = 4
///   knots        = 0 0 0 0 0.25 0.5 0.75 1 1 1 1
///   points       = -5 5 0; -4.17 5 0; ...
///   weights      = 1 1 1 1 1 1 1
///   velocity     = <4m numbers>          (default zero)
///   alpha beta mu gamma g = <number>
///   dt           = 0.008
///   steps        = 1000
///   quadrature   = 10                    (Gauss points per element)
///   pin          = 0:xyzw 1:xyzw 2:xyzw  (control:coordinates, may repeat)
///   constraint   = a_0 ... a_{4m-1} | d  (may repeat)
///   weight_policy= reset | free | pinned
///   track_u      = 0.5
///   solver_tol   = 1e-10
///   solver_max_iter = 0                  (0: ten times the reduced size)
///   trace        = trace.csv
///   final_state  = final_state.txt
struct SimConfig {
    std::vector<double> knots;
    int order = 4;
    std::vector<Vec3> points;
    std::vector<double> weights;
    std::vector<double> velocity;
    PhysicsParams params;
    double dt = 0.008;
    int steps = 1000;
    int quadrature_points = 0;  ///< 0 selects order + 1
    std::vector<PinnedDof> pins;
    std::vector<ConstraintRow> rows;
    WeightPolicy policy = WeightPolicy::reset_to_initial;
    double track_u = 0.5;
    SolverConfig solver;
    std::string trace_path;
    std::string state_path;

    /// Throws ConfigError (or the knot/state errors) on inconsistent input.
    void validate() const;

    KnotVector knot_vector() const;
    GeneralizedState initial_state() const;
    Eigen::VectorXd initial_velocity() const;
    int quadrature_size() const { return quadrature_points > 0 ? quadrature_points : order + 1; }

    /// Pins and raw rows, plus every weight when the policy is `pinned`.
    ConstraintSpec constraint_spec() const;

    /// The elastic wire: cubic open knot vector, seven controls on y = 5,
    /// k - 1 controls fully pinned at each end, reset weights.
    static SimConfig wire_preset();
};

/// Apply the keys of a config stream on top of `base`. Throws ConfigError
/// naming the offending line.
SimConfig parse_config(std::istream& in, SimConfig base = {});
SimConfig load_config(const std::string& path, SimConfig base = {});

/// Greville abscissae of a knot vector, used to lay out straight curves.
std::vector<double> greville_abscissae(const KnotVector& kv);

/// Straight wire along x in [-half_length, half_length] at height `height`
/// with `num_controls` controls, open uniform knots and k - 1 pinned
/// controls at each end.
SimConfig straight_wire(int num_controls, int order, double half_length = 5.0, double height = 5.0);

}  // namespace dnurbs::sim
