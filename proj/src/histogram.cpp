#include "demandsplit/histogram.hpp"

#include <cmath>

namespace demandsplit {

double class_scaling_factor(double total_frequency, int num_classes, double width) {
    if (num_classes < 2)
        throw ParameterError("class_scaling_factor: need at least 2 classes");
    if (width <= 0.0)
        throw ParameterError("class_scaling_factor: width must be positive");
    return total_frequency / ((num_classes - 1) * width);
}

double class_scaling_factor(const Histogram& h) {
    return class_scaling_factor(static_cast<double>(h.total_frequency()), h.classes(), h.width);
}

Histogram build_histogram(const Vector& values, int num_classes) {
    if (num_classes < 2)
        throw ParameterError("build_histogram: need at least 2 classes");
    if (values.size() == 0)
        throw InsufficientDataError("build_histogram: empty input");
    const double mn = values.minCoeff();
    const double mx = values.maxCoeff();
    if (mx == mn)
        throw DegenerateDataError("build_histogram: all values identical, classes have no width");

    Histogram h;
    h.width = (mx - mn) / num_classes;
    h.min_value = mn;
    h.centers = Vector(num_classes);
    for (int k = 0; k < num_classes; ++k)
        h.centers[k] = mn + (k + 0.5) * h.width;
    h.frequencies = Eigen::VectorXi::Zero(num_classes);
    h.assignments.resize(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        int k = static_cast<int>(std::floor((values[i] - mn) / h.width));
        if (k >= num_classes) // the maximum: last class is right-closed
            k = num_classes - 1;
        if (k < 0)
            k = 0;
        h.frequencies[k] += 1;
        h.assignments[static_cast<std::size_t>(i)] = k;
    }
    h.alpha = class_scaling_factor(static_cast<double>(h.total_frequency()), num_classes, h.width);
    return h;
}

Histogram histogram_from_classes(const Vector& centers, const Eigen::VectorXi& frequencies) {
    if (centers.size() != frequencies.size())
        throw ParameterError("histogram_from_classes: centers and frequencies differ in length");
    if (centers.size() < 2)
        throw ParameterError("histogram_from_classes: need at least 2 classes");
    const double width = centers[1] - centers[0];
    if (width <= 0.0)
        throw ParameterError("histogram_from_classes: centers must increase");
    for (Eigen::Index k = 1; k < centers.size(); ++k) {
        const double step = centers[k] - centers[k - 1];
        if (std::abs(step - width) > 1e-9 * std::max(1.0, std::abs(width)))
            throw ParameterError("histogram_from_classes: centers must be equidistant");
    }
    if ((frequencies.array() < 0).any())
        throw ParameterError("histogram_from_classes: negative frequency");

    Histogram h;
    h.centers = centers;
    h.frequencies = frequencies;
    h.width = width;
    h.min_value = centers[0] - width / 2.0;
    h.alpha = class_scaling_factor(static_cast<double>(h.total_frequency()),
                                   static_cast<int>(centers.size()), width);
    return h;
}

} // namespace demandsplit
