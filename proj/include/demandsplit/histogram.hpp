#pragma once

#include <vector>

#include "demandsplit/stats.hpp"

namespace demandsplit {

/// Equal-width frequency histogram. Class k covers
/// [min_value + k*width, min_value + (k+1)*width), except the last class
/// whose upper edge is closed so the maximum lands inside. Interior classes
/// with zero frequency are kept; they carry distance information.
///
/// alpha is the class scaling factor that makes one class-width step cost as
/// much as the average frequency gap: alpha = sum(f) / ((n - 1) * width).
struct Histogram {
    Vector centers;              // class midpoints, equidistant
    Eigen::VectorXi frequencies; // observation count per class
    double width = 0.0;
    double alpha = 0.0;
    double min_value = 0.0;
    std::vector<int> assignments; // class index per observation, input order

    int classes() const { return static_cast<int>(centers.size()); }
    double lower_edge(int k) const { return min_value + k * width; }
    double upper_edge(int k) const { return min_value + (k + 1) * width; }
    long total_frequency() const { return frequencies.sum(); }
};

/// Partitions [min, max] into num_classes equal bins and counts values.
/// Throws DegenerateDataError when all values are identical (no width) and
/// ParameterError for num_classes < 2.
Histogram build_histogram(const Vector& values, int num_classes = 20);

/// Histogram assembled from explicit classes, for feeding the distance layer
/// directly. Centers must be equidistant; alpha is derived from them.
Histogram histogram_from_classes(const Vector& centers,
                                 const Eigen::VectorXi& frequencies);

double class_scaling_factor(double total_frequency, int num_classes, double width);
double class_scaling_factor(const Histogram& h);

} // namespace demandsplit
