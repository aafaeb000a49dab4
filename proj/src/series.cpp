#include "demandsplit/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace demandsplit {

void validate_series(const TimeSeries& y, bool require_consecutive) {
    if (static_cast<Eigen::Index>(y.weeks.size()) != y.demand.size())
        throw InputError("series " + y.product_id + ": week and demand lengths differ");
    for (std::size_t i = 1; i < y.weeks.size(); ++i) {
        if (y.weeks[i] <= y.weeks[i - 1])
            throw InputError("series " + y.product_id + ": weeks not strictly increasing at week "
                             + std::to_string(y.weeks[i]));
        if (require_consecutive && y.weeks[i] != y.weeks[i - 1] + 1)
            throw InputError("series " + y.product_id + ": missing week "
                             + std::to_string(y.weeks[i - 1] + 1));
    }
}

TimeSeries slice_from_week(const TimeSeries& y, int first_week) {
    TimeSeries out;
    out.product_id = y.product_id;
    std::vector<double> vals;
    for (std::size_t i = 0; i < y.weeks.size(); ++i) {
        if (y.weeks[i] >= first_week) {
            out.weeks.push_back(y.weeks[i]);
            vals.push_back(y.demand[static_cast<Eigen::Index>(i)]);
        }
    }
    if (vals.empty())
        throw InsufficientDataError("slice_from_week: no weeks at or after "
                                    + std::to_string(first_week));
    out.demand = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return out;
}

namespace {

DetrendedSeries ols_detrend(const Vector& x, const Vector& y) {
    const auto n = y.size();
    if (n < 2)
        throw InsufficientDataError("remove_linear_trend: need at least 2 observations");
    const double xm = x.mean();
    const double ym = y.mean();
    const Vector xc = x.array() - xm;
    const Vector yc = y.array() - ym;
    const double sxx = xc.squaredNorm();
    // equidistant integer weeks, sxx == 0 only for n == 1 which is excluded
    const double slope = xc.dot(yc) / sxx;
    const double intercept = ym - slope * xm;
    DetrendedSeries out;
    out.slope = slope;
    out.intercept = intercept;
    out.values = y.array() - (intercept + slope * x.array()) + ym;
    return out;
}

} // namespace

DetrendedSeries remove_linear_trend(const TimeSeries& y) {
    Vector x(y.demand.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x[i] = static_cast<double>(y.weeks[static_cast<std::size_t>(i)]);
    return ols_detrend(x, y.demand);
}

DetrendedSeries remove_linear_trend(const Vector& values) {
    Vector x = Vector::LinSpaced(values.size(), 1.0, static_cast<double>(values.size()));
    return ols_detrend(x, values);
}

double coefficient_of_variation(const Vector& values) {
    if (values.size() < 2)
        throw InsufficientDataError("coefficient_of_variation: need at least 2 values");
    const double m = values.mean();
    if (m == 0.0)
        throw DegenerateDataError("coefficient_of_variation: zero mean");
    return sample_std(values) / m;
}

ZScoreOutliers zscore_outlier_weeks(const Vector& values, const std::vector<int>& weeks,
                                    double threshold) {
    if (static_cast<Eigen::Index>(weeks.size()) != values.size())
        throw ParameterError("zscore_outlier_weeks: week axis does not match values");
    if (values.size() < 2)
        throw InsufficientDataError("zscore_outlier_weeks: need at least 2 values");
    ZScoreOutliers out;
    const double s = sample_std(values);
    if (s == 0.0) {
        out.degenerate = true;
        return out;
    }
    const double m = values.mean();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if ((values[i] - m) / s > threshold)
            out.weeks.insert(weeks[static_cast<std::size_t>(i)]);
    }
    return out;
}

Vector moving_average(const Vector& values, int window) {
    if (window < 1)
        throw ParameterError("moving_average: window must be positive");
    if (values.size() < window)
        throw InsufficientDataError("moving_average: window exceeds series length");
    const Eigen::Index m = values.size() - window + 1;
    Vector out(m);
    double acc = values.head(window).sum();
    out[0] = acc / window;
    for (Eigen::Index i = 1; i < m; ++i) {
        acc += values[i + window - 1] - values[i - 1];
        out[i] = acc / window;
    }
    return out;
}

BackorderFilter filter_backorders(const TimeSeries& y, double bo_threshold) {
    if (bo_threshold < 0)
        throw ParameterError("filter_backorders: negative threshold");
    validate_series(y);
    double neg = 0.0, pos = 0.0;
    for (Eigen::Index i = 0; i < y.demand.size(); ++i) {
        if (y.demand[i] < 0)
            neg += -y.demand[i];
        else
            pos += y.demand[i];
    }
    BackorderFilter out;
    if (neg == 0.0)
        out.bo_fraction = 0.0;
    else
        out.bo_fraction = pos > 0.0 ? neg / pos : std::numeric_limits<double>::infinity();

    out.series.product_id = y.product_id;
    const bool remove = out.bo_fraction > bo_threshold;
    std::vector<double> vals;
    for (Eigen::Index i = 0; i < y.demand.size(); ++i) {
        const int week = y.weeks[static_cast<std::size_t>(i)];
        double v = y.demand[i];
        if (v < 0) {
            if (remove) {
                out.removed_weeks.insert(week);
                continue;
            }
            out.clamped_weeks.insert(week);
            v = 0.0;
        }
        out.series.weeks.push_back(week);
        vals.push_back(v);
    }
    out.series.demand =
        Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return out;
}

double jarque_bera(const Vector& values) {
    const auto n = values.size();
    if (n < 4)
        throw InsufficientDataError("jarque_bera: need at least 4 values");
    const double m2 = central_moment(values, 2);
    if (m2 == 0.0)
        throw DegenerateDataError("jarque_bera: zero variance");
    const double m3 = central_moment(values, 3);
    const double m4 = central_moment(values, 4);
    const double skew = m3 / std::pow(m2, 1.5);
    const double exkurt = m4 / (m2 * m2) - 3.0;
    return static_cast<double>(n) / 6.0 * (skew * skew + exkurt * exkurt / 4.0);
}

SeriesStats compute_series_stats(const TimeSeries& y, double z_threshold) {
    SeriesStats st;
    double neg = 0.0, pos = 0.0;
    for (Eigen::Index i = 0; i < y.demand.size(); ++i)
        (y.demand[i] < 0 ? neg : pos) += std::abs(y.demand[i]);
    st.bo_fraction = neg == 0.0 ? 0.0
                   : pos > 0.0  ? neg / pos
                                : std::numeric_limits<double>::infinity();

    const DetrendedSeries det = remove_linear_trend(y);
    st.mean = det.values.mean();
    st.sample_std = sample_std(det.values);
    if (st.mean == 0.0)
        throw DegenerateDataError("series " + y.product_id + ": zero mean, CoV undefined");
    st.cov = st.sample_std / st.mean;

    const ZScoreOutliers z = zscore_outlier_weeks(det.values, y.weeks, z_threshold);
    st.zscore_outlier_weeks = z.weeks;
    st.zscore_degenerate = z.degenerate;

    if (y.demand.size() >= 4 && st.sample_std > 0.0)
        st.jb_statistic = jarque_bera(det.values);
    return st;
}

} // namespace demandsplit
