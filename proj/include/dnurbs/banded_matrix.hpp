#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dnurbs {

/// Square matrix with entries confined to |i - j| <= half_bandwidth, stored
/// row by row over the full band so that nonsymmetric operators fit as well.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n, int half_bandwidth);

    int rows() const noexcept { return n_; }
    int half_bandwidth() const noexcept { return hb_; }

    /// Zero outside the band.
    double operator()(int i, int j) const;
    void add(int i, int j, double v);

    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd to_dense() const;

    /// this += s * other (same shape required).
    BandedMatrix& add_scaled(const BandedMatrix& other, double s);
    BandedMatrix& scale(double s);

    bool is_symmetric() const;
    double max_abs() const;

private:
    double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * width() + (j - i + hb_)]; }
    double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * width() + (j - i + hb_)]; }
    std::size_t width() const noexcept { return static_cast<std::size_t>(2 * hb_ + 1); }

    int n_ = 0;
    int hb_ = 0;
    std::vector<double> data_;
};

}  // namespace dnurbs
