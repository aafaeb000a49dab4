#include "demandsplit/distance.hpp"

#include <cmath>

namespace demandsplit {

double scaled_cityblock(double f_s, double f_t, double c_s, double c_t, double alpha) {
    return std::abs(f_s - f_t) + alpha * std::abs(c_s - c_t);
}

double scaled_cityblock(const Histogram& h, int s, int t) {
    if (s < 0 || t < 0 || s >= h.classes() || t >= h.classes())
        throw ParameterError("scaled_cityblock: class index out of range");
    return scaled_cityblock(h.frequencies[s], h.frequencies[t], h.centers[s], h.centers[t],
                            h.alpha);
}

Matrix chain_distance_matrix(const Vector& adjacent) {
    const Eigen::Index n = adjacent.size() + 1;
    Vector prefix(n);
    prefix[0] = 0.0;
    for (Eigen::Index k = 1; k < n; ++k)
        prefix[k] = prefix[k - 1] + adjacent[k - 1];
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index t = s + 1; t < n; ++t) {
            d(s, t) = prefix[t] - prefix[s];
            d(t, s) = d(s, t);
        }
    }
    return d;
}

Matrix series_distance_matrix(const Histogram& h, const Vector& class_weights) {
    const int n = h.classes();
    if (n < 2)
        throw ParameterError("series_distance_matrix: need at least 2 classes");
    if (class_weights.size() != 0 && class_weights.size() != n)
        throw ParameterError("series_distance_matrix: weight vector does not match classes");
    Vector adjacent(n - 1);
    for (int k = 0; k + 1 < n; ++k) {
        double d = std::abs(double(h.frequencies[k]) - double(h.frequencies[k + 1]))
                   + h.alpha * h.width;
        if (class_weights.size() != 0)
            d *= 0.5 * (class_weights[k] + class_weights[k + 1]);
        adjacent[k] = d;
    }
    return chain_distance_matrix(adjacent);
}

Matrix timeseries_distance_matrix(const TimeSeries& y) {
    const Eigen::Index n = y.demand.size();
    if (n < 2)
        throw InsufficientDataError("timeseries_distance_matrix: need at least 2 weeks");
    if ((y.demand.array() < 0).any())
        throw InputError("timeseries_distance_matrix: negative demand, filter back-orders first");
    const double alpha = y.demand.sum() / double(n - 1);
    Vector adjacent(n - 1);
    for (Eigen::Index k = 0; k + 1 < n; ++k)
        adjacent[k] = std::abs(y.demand[k] - y.demand[k + 1]) + alpha;
    return chain_distance_matrix(adjacent);
}

} // namespace demandsplit
