#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dnurbs/knot_vector.hpp"
#include "dnurbs/nurbs_curve.hpp"

namespace dnurbs::sim {

/// Outcome of one numerical invariant: pass iff value <= threshold.
struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Open knot vector with `num_basis` functions on [0, 1] and random interior
/// knots (gaps of at least min(0.02, 0.5 / spans)).
KnotVector random_open_knot_vector(std::mt19937_64& rng, int order, int num_basis);

/// Random control points in [-scale, scale]^3 (z = 0 when planar) and weights
/// in [w_lo, w_hi].
GeneralizedState random_state(std::mt19937_64& rng, int num_controls, double w_lo = 0.5, double w_hi = 2.0,
                              double scale = 5.0, bool planar = false);

/// Library-level invariant checks on random configurations plus a short
/// constrained wire run.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed = 7);

}  // namespace dnurbs::sim
