#pragma once

#include <optional>
#include <set>

#include "demandsplit/cluster.hpp"
#include "demandsplit/config.hpp"
#include "demandsplit/distance.hpp"
#include "demandsplit/histogram.hpp"
#include "demandsplit/series.hpp"

namespace demandsplit {

enum class Category { mts, grey, mto };
enum class TrafficLight { green, orange, red };

/// How a product left the pipeline.
///   hybrid:   the demand was split into stock and order components
///   pure_mto: every week ended up make-to-order, nothing to hold stock for
///   uniform:  constant demand, a histogram has no width, no split happens
///   red:      variation too high for any reliable split
enum class Outcome { hybrid, pure_mto, uniform, red };

const char* to_string(Category c);
const char* to_string(TrafficLight t);
const char* to_string(Outcome o);

/// Demand thresholds derived from the three-way class clustering: classes
/// at or below M hold make-to-stock weeks, classes from m upward hold
/// make-to-order weeks, anything strictly between is the grey zone.
struct CategoryThresholds {
    double mts_upper = 0.0; // M: upper edge of the last make-to-stock class
    double mto_lower = 0.0; // m: lower edge of the first make-to-order class
    std::vector<Category> class_category; // per histogram class
};

/// Week numbers by category; the three sets partition the analyzed weeks.
struct WeekPartition {
    std::set<int> mts;
    std::set<int> grey;
    std::set<int> mto;
};

/// Candidate structural break: the first week of the later segment found by
/// the two-way time clustering, with the segment means and the shift ratio
/// |later - earlier| / pooled std that decides whether it is major.
struct Breakpoint {
    int week = 0;
    double earlier_mean = 0.0;
    double later_mean = 0.0;
    double shift_ratio = 0.0;
};

/// Boundary candidate without the significance gate (for reporting).
Breakpoint innovation_candidate(const TimeSeries& y, Linkage linkage = Linkage::wpgma);

/// Candidate filtered by the gate: present only when the mean shift exceeds
/// shift_tolerance times the pooled within-segment standard deviation.
std::optional<Breakpoint> detect_innovation(const TimeSeries& y,
                                            double shift_tolerance = 1.0,
                                            Linkage linkage = Linkage::wpgma);

/// Detrend, histogram, cluster the classes three ways, derive thresholds
/// and assign every week a category. Throws DegenerateDataError when the
/// demand has no spread (single-class histogram).
struct ClassificationResult {
    DetrendedSeries detrended;
    Histogram histogram;
    ClusterTree tree;
    CategoryThresholds thresholds;
    WeekPartition partition;
};

ClassificationResult classify_weeks(const TimeSeries& y, const RunConfig& cfg = {});

/// Recursive grey-zone absorption: a grey week directly next to a
/// make-to-order week (by week number) becomes make-to-order too, and can
/// pull in its own grey neighbours. Grey weeks that stay unreached fall back
/// to make-to-stock.
struct NeighborExpansion {
    std::set<int> final_mto; // original make-to-order weeks plus absorbed ones
    std::set<int> added;     // just the absorbed ones
};

NeighborExpansion expand_mto_neighbors(const WeekPartition& partition);

/// Demand split y = y_s + y_o. Make-to-stock weeks keep their demand in y_s;
/// make-to-order weeks contribute the mean make-to-stock demand to y_s and
/// the excess to y_o. A make-to-order week whose demand does not exceed that
/// mean is folded back into the stock side and the mean is recomputed, so
/// every surviving order week has strictly positive y_o.
struct SplitResult {
    std::set<int> final_mto_weeks;
    std::set<int> final_mts_weeks;
    std::set<int> candidates_added; // grey weeks absorbed before the split
    double mts_mean_demand = 0.0;   // mean demand over the final stock weeks
    Vector mts_series;              // y_s
    Vector mto_series;              // y_o
};

SplitResult split_series(const TimeSeries& y, std::set<int> final_mto,
                         std::set<int> candidates_added = {});

/// Stockholding volume moved out of the forecast-driven stream, as a
/// percentage of total demand: 100 * sum(y_o) / sum(y).
double compute_savings(const SplitResult& split);

/// Threshold shortcut on frequency drops for spreadsheet use: M is the upper
/// edge of the class with the largest frequency drop to its successor, m the
/// upper edge of the class with the largest drop past it. When no positive
/// drop exists past M the grey zone is empty and m equals M.
CategoryThresholds practitioner_thresholds(const Histogram& h);

TrafficLight classify_traffic_light(double cov, bool structural_break,
                                    double red_threshold);

/// Red threshold derived from a portfolio: mean of the product CoVs plus one
/// sample standard deviation. Used instead of the configured default when
/// five or more products are analyzed together.
double portfolio_red_threshold(const std::vector<double>& covs);

/// Everything the reports need about one product.
struct CategoryVolumes {
    double mts = 0.0, grey = 0.0, mto = 0.0;            // raw demand sums
    double mts_pct = 0.0, grey_pct = 0.0, mto_pct = 0.0; // of total demand
    int mts_weeks = 0, grey_weeks = 0, mto_weeks = 0;
};

struct ProductReport {
    std::string product_id;
    TrafficLight traffic_light = TrafficLight::green;
    Outcome outcome = Outcome::hybrid;
    int weeks_total = 0;
    int weeks_analyzed = 0;
    std::optional<int> breakpoint_week;
    double bo_fraction = 0.0;
    std::set<int> removed_bo_weeks;
    SeriesStats stats; // of the analyzed (possibly truncated) detrended series
    double cov = 0.0;
    std::optional<double> cov_s;
    std::optional<double> cov_o;
    std::optional<double> savings_pct;
    std::optional<double> mts_upper; // M
    std::optional<double> mto_lower; // m
    std::optional<CategoryVolumes> volumes;
    std::optional<double> fmts, fmto, fmts_pct, fmto_pct;
    std::optional<double> m_mts; // mean weekly stock-side volume
    int z_count = 0;
    bool cov_reduction_violated = false; // stock CoV failed to drop below the input CoV
};

struct ProductAnalysis {
    ProductReport report;
    TimeSeries original;
    TimeSeries analyzed;
    std::optional<DetrendedSeries> detrended;
    std::optional<Histogram> histogram;
    std::optional<ClusterTree> tree;
    std::optional<CategoryThresholds> thresholds;
    std::optional<WeekPartition> partition;
    std::optional<SplitResult> split;
};

/// Full pipeline for one product: back-order filter, red check, break
/// detection and truncation, week classification, grey-zone absorption,
/// split, savings. red_override replaces the configured red threshold (used
/// by portfolio runs). Errors from inner stages are re-thrown with the stage
/// and product named.
ProductAnalysis analyze_product(const TimeSeries& y, const RunConfig& cfg = {},
                                std::optional<double> red_override = {});

/// Two passes over a portfolio: first every product's detrended CoV (which
/// fixes the red threshold when there are at least five products), then the
/// per-product analysis, products in parallel, results in input order.
std::vector<ProductAnalysis> analyze_portfolio(const std::vector<TimeSeries>& products,
                                               const RunConfig& cfg = {});

} // namespace demandsplit
