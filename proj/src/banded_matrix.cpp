#include "dnurbs/banded_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "dnurbs/errors.hpp"

namespace dnurbs {

BandedMatrix::BandedMatrix(int n, int half_bandwidth)
    : n_(n), hb_(half_bandwidth), data_(static_cast<std::size_t>(n) * (2 * half_bandwidth + 1), 0.0) {
    if (n < 0 || half_bandwidth < 0) throw ContractError("banded matrix dimensions must be nonnegative");
}

double BandedMatrix::operator()(int i, int j) const {
    if (std::abs(i - j) > hb_) return 0.0;
    return at(i, j);
}

void BandedMatrix::add(int i, int j, double v) {
    if (std::abs(i - j) > hb_) throw ContractError("entry outside band");
    at(i, j) += v;
}

Eigen::VectorXd BandedMatrix::multiply(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw ContractError("banded matvec: size mismatch");
    Eigen::VectorXd y(n_);
    for (int i = 0; i < n_; ++i) {
        const int j0 = std::max(0, i - hb_);
        const int j1 = std::min(n_ - 1, i + hb_);
        double s = 0.0;
        for (int j = j0; j <= j1; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = std::max(0, i - hb_); j <= std::min(n_ - 1, i + hb_); ++j) A(i, j) = at(i, j);
    }
    return A;
}

BandedMatrix& BandedMatrix::add_scaled(const BandedMatrix& other, double s) {
    if (other.n_ != n_ || other.hb_ != hb_) throw ContractError("banded add: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
    return *this;
}

BandedMatrix& BandedMatrix::scale(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

bool BandedMatrix::is_symmetric() const {
    for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j <= std::min(n_ - 1, i + hb_); ++j) {
            if (at(i, j) != at(j, i)) return false;
        }
    }
    return true;
}

double BandedMatrix::max_abs() const {
    double r = 0.0;
    for (double v : data_) r = std::max(r, std::abs(v));
    return r;
}

}  // namespace dnurbs
