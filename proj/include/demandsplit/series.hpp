#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "demandsplit/stats.hpp"

namespace demandsplit {

/// One product's weekly demand history. Weeks are strictly increasing;
/// freshly loaded series have consecutive weeks, a series that went through
/// back-order filtering may have gaps where negative weeks were dropped.
/// Demand values are integral units per week and may be negative on input
/// (negative entries are back-orders).
struct TimeSeries {
    std::string product_id;
    std::vector<int> weeks;
    Vector demand;

    Eigen::Index size() const { return demand.size(); }
    double total() const { return demand.sum(); }
};

/// Throws InputError when the week axis is not strictly increasing (or not
/// consecutive, if required) or when sizes disagree.
void validate_series(const TimeSeries& y, bool require_consecutive = false);

/// Sub-series with weeks >= first_week. Used to continue the analysis after
/// a structural break.
TimeSeries slice_from_week(const TimeSeries& y, int first_week);

/// Least-squares detrend that keeps the original mean: values are the OLS
/// residuals plus mean(demand), so the result is trend-free but lives on the
/// same level as the input.
struct DetrendedSeries {
    Vector values;
    double slope = 0.0;     // fitted demand change per week
    double intercept = 0.0; // fitted demand at week 0
};

DetrendedSeries remove_linear_trend(const TimeSeries& y);

/// Same fit against week indices 1..n, for derived vectors that carry no
/// explicit week axis.
DetrendedSeries remove_linear_trend(const Vector& values);

/// Sample standard deviation over mean. Throws DegenerateDataError when the
/// mean is zero and InsufficientDataError for fewer than two values.
double coefficient_of_variation(const Vector& values);

/// Weeks whose value sits more than `threshold` sample standard deviations
/// above the mean. A zero-variance input cannot produce z-scores; it yields
/// an empty set with `degenerate` set instead.
struct ZScoreOutliers {
    std::set<int> weeks;
    bool degenerate = false;
};

ZScoreOutliers zscore_outlier_weeks(const Vector& values,
                                    const std::vector<int>& weeks,
                                    double threshold = 3.1);

/// Trailing moving average; output has size() - window + 1 entries, the
/// first one covering the first `window` values.
Vector moving_average(const Vector& values, int window = 4);

/// Back-order handling. The fraction is |sum of negative demand| divided by
/// the sum of positive demand. Above the threshold the negative weeks are
/// removed from the series and reported; at or below it they are clamped
/// to zero and kept.
struct BackorderFilter {
    TimeSeries series;
    double bo_fraction = 0.0;
    std::set<int> removed_weeks;
    std::set<int> clamped_weeks;
};

BackorderFilter filter_backorders(const TimeSeries& y, double bo_threshold = 0.003);

/// Jarque-Bera normality statistic n/6 * (skew^2 + excess_kurtosis^2 / 4).
/// Compare against 5.99 (chi-squared, 2 dof, 5%). Needs n >= 4 and nonzero
/// variance.
double jarque_bera(const Vector& values);

/// Descriptive statistics of one analyzed series. mean, sample_std and cov
/// describe the detrended values; bo_fraction refers to the raw input. The
/// Jarque-Bera statistic is absent when undefined (short or constant data).
struct SeriesStats {
    double mean = 0.0;
    double sample_std = 0.0;
    double cov = 0.0;
    double bo_fraction = 0.0;
    std::optional<double> jb_statistic;
    std::set<int> zscore_outlier_weeks;
    bool zscore_degenerate = false;
};

SeriesStats compute_series_stats(const TimeSeries& y, double z_threshold = 3.1);

} // namespace demandsplit
