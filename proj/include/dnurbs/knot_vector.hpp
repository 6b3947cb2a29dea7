#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace dnurbs {

enum class KnotClass { uniform, open_uniform, nonuniform };

std::string_view to_string(KnotClass c);

/// Classify a knot sequence for splines of order `order`.
///
/// Uniform: equal positive spacing everywhere. Open uniform: the first and
/// last `order` knots coincide (and no more) with equal spacing between the
/// distinct interior breakpoints. Anything else is nonuniform.
/// Throws InvalidKnotVector for decreasing or fully degenerate sequences.
KnotClass classify_knot_vector(std::span<const double> knots, int order);

/// Nondecreasing knot sequence u_0..u_n together with the spline order k.
///
/// The spline space over it has m = n - k + 1 basis functions, indexed 0..m-1.
class KnotVector {
public:
    /// Largest order supported by the fixed-size local evaluation buffers.
    static constexpr int kMaxOrder = 10;

    KnotVector(std::vector<double> knots, int order);

    /// Open uniform vector with `num_basis` functions on [a, b].
    static KnotVector open_uniform(int num_basis, int order, double a = 0.0, double b = 1.0);

    const std::vector<double>& knots() const noexcept { return knots_; }
    double operator[](std::size_t i) const { return knots_[i]; }
    int order() const noexcept { return order_; }
    int degree() const noexcept { return order_ - 1; }
    /// Index of the last knot (n).
    int last_index() const noexcept { return static_cast<int>(knots_.size()) - 1; }
    int num_basis() const noexcept { return static_cast<int>(knots_.size()) - order_; }
    KnotClass classification() const noexcept { return class_; }
    bool is_open() const noexcept;

    double front() const noexcept { return knots_.front(); }
    double back() const noexcept { return knots_.back(); }
    /// Parameter interval on which the basis forms a partition of unity.
    double domain_begin() const noexcept { return knots_[order_ - 1]; }
    double domain_end() const noexcept { return knots_[num_basis()]; }

    /// Index s of the nonempty interval [u_s, u_{s+1}) containing u. The last
    /// knot maps to the last nonempty interval. Throws DomainError outside
    /// [front(), back()].
    int find_span(double u) const;

private:
    std::vector<double> knots_;
    int order_;
    KnotClass class_;
};

}  // namespace dnurbs
