#include "demandsplit/splitter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace demandsplit {

const char* to_string(Category c) {
    switch (c) {
    case Category::mts: return "MTS";
    case Category::grey: return "GREY";
    case Category::mto: return "MTO";
    }
    return "?";
}

const char* to_string(TrafficLight t) {
    switch (t) {
    case TrafficLight::green: return "GREEN";
    case TrafficLight::orange: return "ORANGE";
    case TrafficLight::red: return "RED";
    }
    return "?";
}

const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::hybrid: return "hybrid";
    case Outcome::pure_mto: return "pure-mto";
    case Outcome::uniform: return "uniform";
    case Outcome::red: return "red";
    }
    return "?";
}

void validate_config(const RunConfig& cfg) {
    if (cfg.bins < 2)
        throw ParameterError("config: bins must be at least 2");
    if (cfg.z_threshold <= 0)
        throw ParameterError("config: z threshold must be positive");
    if (cfg.bo_threshold < 0)
        throw ParameterError("config: back-order threshold must not be negative");
    if (cfg.red_cov_threshold <= 0)
        throw ParameterError("config: red CoV threshold must be positive");
    if (cfg.shift_tolerance < 0)
        throw ParameterError("config: shift tolerance must not be negative");
}

Breakpoint innovation_candidate(const TimeSeries& y, Linkage linkage) {
    const Eigen::Index n = y.demand.size();
    if (n < 4)
        throw InsufficientDataError("innovation: need at least 4 weeks");

    const Matrix d = timeseries_distance_matrix(y);
    const ClusterTree tree = agglomerative_tree(d, linkage);
    const ClusterCut cut = cut_tree(tree, 2);

    // Chain additivity keeps both clusters contiguous in time, so the
    // boundary is simply where the second cluster starts.
    for (const auto& cluster : cut) {
        for (std::size_t i = 1; i < cluster.size(); ++i)
            if (cluster[i] != cluster[i - 1] + 1)
                throw InternalError("innovation: time clusters not contiguous");
    }
    const Eigen::Index p = cut[1].front();

    Breakpoint bp;
    bp.week = y.weeks[static_cast<std::size_t>(p)];
    const auto earlier = y.demand.head(p);
    const auto later = y.demand.tail(n - p);
    bp.earlier_mean = earlier.mean();
    bp.later_mean = later.mean();

    const double va = p >= 2 ? sample_variance(earlier) : 0.0;
    const double vb = n - p >= 2 ? sample_variance(later) : 0.0;
    const double pooled = std::sqrt(((p - 1) * va + (n - p - 1) * vb) / double(n - 2));
    const double shift = std::abs(bp.later_mean - bp.earlier_mean);
    bp.shift_ratio = pooled > 0.0 ? shift / pooled
                     : shift > 0.0 ? std::numeric_limits<double>::infinity()
                                   : 0.0;
    return bp;
}

std::optional<Breakpoint> detect_innovation(const TimeSeries& y, double shift_tolerance,
                                            Linkage linkage) {
    const Breakpoint bp = innovation_candidate(y, linkage);
    if (bp.shift_ratio > shift_tolerance)
        return bp;
    return std::nullopt;
}

ClassificationResult classify_weeks(const TimeSeries& y, const RunConfig& cfg) {
    validate_config(cfg);
    ClassificationResult r;
    r.detrended = remove_linear_trend(y);

    // Demand cannot be negative; residuals that dip below zero are clamped
    // before histogramming.
    const Vector clamped = r.detrended.values.cwiseMax(0.0);
    r.histogram = build_histogram(clamped, cfg.bins);

    const Matrix d = series_distance_matrix(r.histogram);
    r.tree = agglomerative_tree(d, cfg.linkage_for_classes);
    const ClusterCut cut = cut_tree(r.tree, 3);

    for (const auto& cluster : cut) {
        for (std::size_t i = 1; i < cluster.size(); ++i)
            if (cluster[i] != cluster[i - 1] + 1)
                throw InternalError("classify_weeks: class clusters not contiguous");
    }

    // cut_tree orders clusters by smallest class, which on contiguous
    // clusters is demand order: low cluster holds stock weeks, high cluster
    // order weeks.
    r.thresholds.class_category.assign(static_cast<std::size_t>(r.histogram.classes()),
                                       Category::grey);
    for (int k : cut[0])
        r.thresholds.class_category[static_cast<std::size_t>(k)] = Category::mts;
    for (int k : cut[2])
        r.thresholds.class_category[static_cast<std::size_t>(k)] = Category::mto;
    r.thresholds.mts_upper = r.histogram.upper_edge(cut[0].back());
    r.thresholds.mto_lower = r.histogram.lower_edge(cut[2].front());

    for (std::size_t i = 0; i < r.histogram.assignments.size(); ++i) {
        const int week = y.weeks[i];
        switch (r.thresholds.class_category[static_cast<std::size_t>(
            r.histogram.assignments[i])]) {
        case Category::mts: r.partition.mts.insert(week); break;
        case Category::grey: r.partition.grey.insert(week); break;
        case Category::mto: r.partition.mto.insert(week); break;
        }
    }
    return r;
}

NeighborExpansion expand_mto_neighbors(const WeekPartition& partition) {
    NeighborExpansion out;
    out.final_mto = partition.mto;
    std::set<int> grey = partition.grey;
    std::vector<int> frontier(partition.mto.begin(), partition.mto.end());
    while (!frontier.empty()) {
        const int w = frontier.back();
        frontier.pop_back();
        for (int neighbor : {w - 1, w + 1}) {
            const auto it = grey.find(neighbor);
            if (it != grey.end()) {
                grey.erase(it);
                out.final_mto.insert(neighbor);
                out.added.insert(neighbor);
                frontier.push_back(neighbor);
            }
        }
    }
    return out;
}

SplitResult split_series(const TimeSeries& y, std::set<int> final_mto,
                         std::set<int> candidates_added) {
    const Eigen::Index n = y.demand.size();
    if (n == 0)
        throw InsufficientDataError("split_series: empty series");
    std::vector<Eigen::Index> index_of_week;
    {
        std::set<int> all(y.weeks.begin(), y.weeks.end());
        for (int w : final_mto)
            if (!all.count(w))
                throw ParameterError("split_series: make-to-order week "
                                     + std::to_string(w) + " not in the series");
    }
    if (static_cast<Eigen::Index>(final_mto.size()) == n)
        throw DegenerateDataError("split_series: every week is make-to-order, "
                                  "no stock level can be derived");

    SplitResult r;
    r.final_mto_weeks = std::move(final_mto);
    r.candidates_added = std::move(candidates_added);

    // The stock mean must exceed the demand of every order week it is
    // subtracted from; weeks that fail move back to the stock side and the
    // mean is recomputed. Each round shrinks the order set, so this ends.
    double mean_s = 0.0;
    for (bool changed = true; changed;) {
        changed = false;
        double sum = 0.0;
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!r.final_mto_weeks.count(y.weeks[static_cast<std::size_t>(i)])) {
                sum += y.demand[i];
                ++count;
            }
        }
        mean_s = sum / double(count);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int w = y.weeks[static_cast<std::size_t>(i)];
            if (r.final_mto_weeks.count(w) && y.demand[i] <= mean_s) {
                r.final_mto_weeks.erase(w);
                r.candidates_added.erase(w);
                changed = true;
            }
        }
    }

    r.mts_mean_demand = mean_s;
    r.mts_series = Vector(n);
    r.mto_series = Vector(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int w = y.weeks[static_cast<std::size_t>(i)];
        if (r.final_mto_weeks.count(w)) {
            r.mts_series[i] = mean_s;
            r.mto_series[i] = y.demand[i] - mean_s;
        } else {
            r.mts_series[i] = y.demand[i];
            r.mto_series[i] = 0.0;
            r.final_mts_weeks.insert(w);
        }
    }
    return r;
}

double compute_savings(const SplitResult& split) {
    const double total = split.mts_series.sum() + split.mto_series.sum();
    if (total <= 0.0)
        throw DegenerateDataError("compute_savings: non-positive total demand");
    return 100.0 * split.mto_series.sum() / total;
}

CategoryThresholds practitioner_thresholds(const Histogram& h) {
    const int n = h.classes();
    if (n < 3)
        throw InsufficientDataError("practitioner_thresholds: need at least 3 classes");
    bool uniform = true;
    for (int k = 1; k < n; ++k)
        if (h.frequencies[k] != h.frequencies[0])
            uniform = false;
    if (uniform)
        throw DegenerateDataError("practitioner_thresholds: uniform frequencies, "
                                  "no threshold exists");

    std::vector<long> delta(static_cast<std::size_t>(n - 1));
    for (int k = 0; k + 1 < n; ++k)
        delta[static_cast<std::size_t>(k)] = long(h.frequencies[k]) - long(h.frequencies[k + 1]);

    int k_m = 0;
    for (int k = 1; k + 1 < n; ++k)
        if (delta[static_cast<std::size_t>(k)] > delta[static_cast<std::size_t>(k_m)])
            k_m = k;

    int k_o = -1;
    for (int k = k_m + 1; k + 1 < n; ++k) {
        if (delta[static_cast<std::size_t>(k)] <= 0)
            continue;
        if (k_o < 0 || delta[static_cast<std::size_t>(k)] > delta[static_cast<std::size_t>(k_o)])
            k_o = k;
    }

    CategoryThresholds t;
    t.mts_upper = h.upper_edge(k_m);
    t.mto_lower = k_o >= 0 ? h.upper_edge(k_o) : t.mts_upper; // no grey zone
    const int first_mto = (k_o >= 0 ? k_o : k_m) + 1;
    t.class_category.assign(static_cast<std::size_t>(n), Category::grey);
    for (int k = 0; k < n; ++k) {
        if (k <= k_m)
            t.class_category[static_cast<std::size_t>(k)] = Category::mts;
        else if (k >= first_mto)
            t.class_category[static_cast<std::size_t>(k)] = Category::mto;
    }
    return t;
}

TrafficLight classify_traffic_light(double cov, bool structural_break, double red_threshold) {
    if (cov > red_threshold)
        return TrafficLight::red;
    if (structural_break)
        return TrafficLight::orange;
    return TrafficLight::green;
}

double portfolio_red_threshold(const std::vector<double>& covs) {
    if (covs.size() < 2)
        throw InsufficientDataError("portfolio_red_threshold: need at least 2 products");
    const Eigen::Map<const Vector> v(covs.data(), static_cast<Eigen::Index>(covs.size()));
    return v.mean() + sample_std(v);
}

namespace {

template <typename F>
auto stage(const char* name, const std::string& product, F&& f) -> decltype(f()) {
    const auto tag = [&](const char* what) {
        return product + ": " + name + ": " + what;
    };
    try {
        return f();
    } catch (const InputError& e) {
        throw InputError(tag(e.what()));
    } catch (const InsufficientDataError& e) {
        throw InsufficientDataError(tag(e.what()));
    } catch (const DegenerateDataError& e) {
        throw DegenerateDataError(tag(e.what()));
    } catch (const ParameterError& e) {
        throw ParameterError(tag(e.what()));
    } catch (const InternalError& e) {
        throw InternalError(tag(e.what()));
    }
}

std::optional<double> safe_cov(const Vector& v) {
    try {
        return coefficient_of_variation(v);
    } catch (const Error&) {
        return std::nullopt;
    }
}

CategoryVolumes tally_volumes(const TimeSeries& y, const WeekPartition& p) {
    CategoryVolumes v;
    for (Eigen::Index i = 0; i < y.demand.size(); ++i) {
        const int w = y.weeks[static_cast<std::size_t>(i)];
        if (p.mts.count(w)) {
            v.mts += y.demand[i];
            ++v.mts_weeks;
        } else if (p.grey.count(w)) {
            v.grey += y.demand[i];
            ++v.grey_weeks;
        } else {
            v.mto += y.demand[i];
            ++v.mto_weeks;
        }
    }
    const double total = v.mts + v.grey + v.mto;
    if (total > 0.0) {
        v.mts_pct = 100.0 * v.mts / total;
        v.grey_pct = 100.0 * v.grey / total;
        v.mto_pct = 100.0 * v.mto / total;
    }
    return v;
}

} // namespace

ProductAnalysis analyze_product(const TimeSeries& y, const RunConfig& cfg,
                                std::optional<double> red_override) {
    validate_config(cfg);
    stage("input", y.product_id, [&] { validate_series(y); });

    ProductAnalysis a;
    a.original = y;
    a.report.product_id = y.product_id;
    a.report.weeks_total = static_cast<int>(y.size());

    const BackorderFilter bo = stage("backorder-filter", y.product_id, [&] {
        return filter_backorders(y, cfg.bo_threshold);
    });
    a.report.bo_fraction = bo.bo_fraction;
    a.report.removed_bo_weeks = bo.removed_weeks;
    if (bo.series.size() < 2)
        throw InsufficientDataError(y.product_id
                                    + ": backorder-filter: too few weeks remain");

    const double cov_full = stage("cov", y.product_id, [&] {
        return coefficient_of_variation(remove_linear_trend(bo.series).values);
    });
    const double red_threshold = red_override.value_or(cfg.red_cov_threshold);

    std::optional<Breakpoint> breakpoint;
    if (cov_full <= red_threshold && bo.series.size() >= 4) {
        breakpoint = stage("innovation", y.product_id, [&] {
            return detect_innovation(bo.series, cfg.shift_tolerance,
                                     cfg.linkage_for_innovation);
        });
    }

    a.report.traffic_light =
        classify_traffic_light(cov_full, breakpoint.has_value(), red_threshold);

    if (a.report.traffic_light == TrafficLight::red) {
        a.analyzed = bo.series;
        a.detrended = remove_linear_trend(a.analyzed);
        a.report.weeks_analyzed = static_cast<int>(a.analyzed.size());
        a.report.outcome = Outcome::red;
        a.report.stats = stage("stats", y.product_id, [&] {
            return compute_series_stats(a.analyzed, cfg.z_threshold);
        });
        a.report.stats.bo_fraction = bo.bo_fraction;
        a.report.cov = a.report.stats.cov;
        a.report.cov_o = a.report.cov; // the whole series is the order stream
        a.report.fmto = a.analyzed.total();
        a.report.fmto_pct = 100.0;
        a.report.z_count = static_cast<int>(a.report.stats.zscore_outlier_weeks.size());
        return a;
    }

    if (breakpoint) {
        a.report.breakpoint_week = breakpoint->week;
        a.analyzed = slice_from_week(bo.series, breakpoint->week);
    } else {
        a.analyzed = bo.series;
    }
    a.report.weeks_analyzed = static_cast<int>(a.analyzed.size());
    if (a.analyzed.size() < 2)
        throw InsufficientDataError(y.product_id + ": innovation: too few weeks after the break");

    a.report.stats = stage("stats", y.product_id, [&] {
        return compute_series_stats(a.analyzed, cfg.z_threshold);
    });
    a.report.stats.bo_fraction = bo.bo_fraction;
    a.report.cov = a.report.stats.cov;
    a.report.z_count = static_cast<int>(a.report.stats.zscore_outlier_weeks.size());

    ClassificationResult cls;
    try {
        cls = stage("classify", y.product_id, [&] { return classify_weeks(a.analyzed, cfg); });
    } catch (const DegenerateDataError&) {
        // Constant demand: one class of full frequency, nothing to split.
        // Keep the volume on the stock side; the outcome marks it.
        a.detrended = remove_linear_trend(a.analyzed);
        a.report.outcome = Outcome::uniform;
        CategoryVolumes v;
        v.mts = a.analyzed.total();
        v.mts_pct = 100.0;
        v.mts_weeks = static_cast<int>(a.analyzed.size());
        a.report.volumes = v;
        a.report.fmts = a.analyzed.total();
        a.report.fmts_pct = 100.0;
        a.report.m_mts = a.analyzed.total() / double(a.analyzed.size());
        return a;
    }
    a.detrended = cls.detrended;
    a.histogram = cls.histogram;
    a.tree = cls.tree;
    a.thresholds = cls.thresholds;
    a.partition = cls.partition;
    a.report.mts_upper = cls.thresholds.mts_upper;
    a.report.mto_lower = cls.thresholds.mto_lower;
    a.report.volumes = tally_volumes(a.analyzed, cls.partition);

    const NeighborExpansion expansion = expand_mto_neighbors(cls.partition);

    SplitResult split;
    try {
        split = stage("split", y.product_id, [&] {
            return split_series(a.analyzed, expansion.final_mto, expansion.added);
        });
    } catch (const DegenerateDataError&) {
        // Every week ended up make-to-order: orders dominate completely and
        // no stock level exists to save against.
        a.report.outcome = Outcome::pure_mto;
        a.report.fmto = a.analyzed.total();
        a.report.fmto_pct = 100.0;
        a.report.cov_o = a.report.cov;
        return a;
    }
    a.split = split;

    a.report.outcome = Outcome::hybrid;
    a.report.savings_pct = compute_savings(split);
    a.report.fmts = split.mts_series.sum();
    a.report.fmto = split.mto_series.sum();
    const double total = *a.report.fmts + *a.report.fmto;
    a.report.fmts_pct = 100.0 * *a.report.fmts / total;
    a.report.fmto_pct = 100.0 * *a.report.fmto / total;
    a.report.m_mts = *a.report.fmts / double(a.analyzed.size());
    a.report.cov_s = safe_cov(split.mts_series);
    a.report.cov_o = safe_cov(split.mto_series);
    a.report.cov_reduction_violated =
        a.report.cov_s.has_value() && *a.report.cov_s > a.report.cov;
    return a;
}

namespace {

template <typename F>
void parallel_for(int n, F&& f) {
    const int workers =
        std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace

std::vector<ProductAnalysis> analyze_portfolio(const std::vector<TimeSeries>& products,
                                               const RunConfig& cfg) {
    validate_config(cfg);
    if (products.empty())
        throw InputError("analyze_portfolio: no products");

    // First pass: every product's detrended CoV. With five or more products
    // the red threshold becomes portfolio-relative (mean CoV plus one
    // standard deviation) instead of the configured default.
    std::vector<double> covs(products.size(), 0.0);
    parallel_for(static_cast<int>(products.size()), [&](int i) {
        const auto& y = products[static_cast<std::size_t>(i)];
        covs[static_cast<std::size_t>(i)] = stage("cov", y.product_id, [&] {
            const BackorderFilter bo = filter_backorders(y, cfg.bo_threshold);
            return coefficient_of_variation(remove_linear_trend(bo.series).values);
        });
    });
    const double red = products.size() >= 5 ? portfolio_red_threshold(covs)
                                            : cfg.red_cov_threshold;

    std::vector<ProductAnalysis> out(products.size());
    parallel_for(static_cast<int>(products.size()), [&](int i) {
        out[static_cast<std::size_t>(i)] =
            analyze_product(products[static_cast<std::size_t>(i)], cfg, red);
    });
    return out;
}

} // namespace demandsplit
