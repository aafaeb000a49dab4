#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "demandsplit/errors.hpp"

namespace demandsplit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Arithmetic mean of any dense Eigen expression.
template <typename Derived>
double mean(const Eigen::DenseBase<Derived>& v) {
    if (v.size() == 0)
        throw InsufficientDataError("mean: empty range");
    return v.derived().template cast<double>().mean();
}

/// Unbiased sample variance (n - 1 denominator).
template <typename Derived>
double sample_variance(const Eigen::DenseBase<Derived>& v) {
    const auto n = v.size();
    if (n < 2)
        throw InsufficientDataError("sample_variance: need at least 2 values");
    const Eigen::ArrayXd a = v.derived().template cast<double>().array();
    const double m = a.mean();
    return (a - m).square().sum() / double(n - 1);
}

template <typename Derived>
double sample_std(const Eigen::DenseBase<Derived>& v) {
    return std::sqrt(sample_variance(v));
}

/// k-th central moment with the 1/n normalisation used by the
/// classical Jarque-Bera statistic.
template <typename Derived>
double central_moment(const Eigen::DenseBase<Derived>& v, int k) {
    if (v.size() == 0)
        throw InsufficientDataError("central_moment: empty range");
    const Eigen::ArrayXd a = v.derived().template cast<double>().array();
    const double m = a.mean();
    return (a - m).pow(k).sum() / double(a.size());
}

} // namespace demandsplit
