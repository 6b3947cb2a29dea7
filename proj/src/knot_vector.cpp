#include "dnurbs/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dnurbs/errors.hpp"

namespace dnurbs {

namespace {

bool equal_spacing(std::span<const double> pts, double tol) {
    if (pts.size() < 2) return true;
    const double h = pts[1] - pts[0];
    if (h <= 0.0) return false;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        if (std::abs((pts[i + 1] - pts[i]) - h) > tol) return false;
    }
    return true;
}

}  // namespace

std::string_view to_string(KnotClass c) {
    switch (c) {
        case KnotClass::uniform: return "uniform";
        case KnotClass::open_uniform: return "open_uniform";
        case KnotClass::nonuniform: return "nonuniform";
    }
    return "?";
}

KnotClass classify_knot_vector(std::span<const double> knots, int order) {
    if (order < 1) throw InvalidKnotVector("order must be >= 1");
    if (knots.size() < 2) throw InvalidKnotVector("knot vector needs at least two knots");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i] <= knots[i + 1])) {
            throw InvalidKnotVector("knots must be nondecreasing (index " + std::to_string(i) + ")");
        }
    }
    const double range = knots.back() - knots.front();
    if (!(range > 0.0)) throw InvalidKnotVector("degenerate knot vector: all knots equal");
    const double tol = 1e-12 * range;

    if (equal_spacing(knots, tol)) return KnotClass::uniform;

    const auto k = static_cast<std::size_t>(order);
    const std::size_t n = knots.size();
    if (n < 2 * k) return KnotClass::nonuniform;
    auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
    for (std::size_t i = 1; i < k; ++i) {
        if (!near(knots[i], knots[0]) || !near(knots[n - 1 - i], knots[n - 1])) {
            return KnotClass::nonuniform;
        }
    }
    if (near(knots[k], knots[0]) || near(knots[n - 1 - k], knots[n - 1])) {
        return KnotClass::nonuniform;
    }
    // Interior breakpoints, end knots included once.
    if (!equal_spacing(knots.subspan(k - 1, n - 2 * (k - 1)), tol)) return KnotClass::nonuniform;
    return KnotClass::open_uniform;
}

KnotVector::KnotVector(std::vector<double> knots, int order)
    : knots_(std::move(knots)), order_(order), class_(classify_knot_vector(knots_, order)) {
    if (order_ > kMaxOrder) {
        throw InvalidKnotVector("order " + std::to_string(order_) + " exceeds supported maximum " +
                                std::to_string(kMaxOrder));
    }
    if (num_basis() < 1) {
        throw InvalidKnotVector("need at least order+1 knots for a nonempty spline space");
    }
}

KnotVector KnotVector::open_uniform(int num_basis, int order, double a, double b) {
    if (num_basis < order) throw InvalidKnotVector("open uniform vector needs num_basis >= order");
    const int interior = num_basis - order;  // knots strictly inside (a, b)
    std::vector<double> u;
    u.reserve(static_cast<std::size_t>(num_basis + order));
    for (int i = 0; i < order; ++i) u.push_back(a);
    for (int i = 1; i <= interior; ++i) u.push_back(a + (b - a) * i / (interior + 1));
    for (int i = 0; i < order; ++i) u.push_back(b);
    return KnotVector(std::move(u), order);
}

bool KnotVector::is_open() const noexcept {
    const int n = last_index();
    for (int i = 1; i < order_; ++i) {
        if (knots_[i] != knots_[0] || knots_[n - i] != knots_[n]) return false;
    }
    return true;
}

int KnotVector::find_span(double u) const {
    if (!(u >= knots_.front() && u <= knots_.back())) {
        throw DomainError("parameter " + std::to_string(u) + " outside knot range [" +
                          std::to_string(knots_.front()) + ", " + std::to_string(knots_.back()) + "]");
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
    int s = static_cast<int>(it - knots_.begin()) - 1;
    // u == last knot: step back to the last nonempty interval.
    while (s >= last_index() || knots_[s] == knots_[s + 1]) --s;
    return s;
}

}  // namespace dnurbs
