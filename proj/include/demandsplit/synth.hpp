#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>

#include "demandsplit/cluster.hpp"
#include "demandsplit/series.hpp"

namespace demandsplit {

/// Recipe for a synthetic weekly demand series: a lognormal-shaped base
/// process with a chosen mean and coefficient of variation, an optional
/// linear trend, spike weeks whose demand is multiplied up, and an optional
/// level change at a breakpoint. Identical specs (same seed) reproduce the
/// identical series.
struct SynthSpec {
    std::string product_id = "SYN01";
    int n_weeks = 104;
    double base_mean = 1000.0;
    double base_cov = 0.5;
    double trend_slope = 0.0;
    int spike_count = 0;                    // sampled weeks, ignored when spike_weeks set
    std::optional<std::set<int>> spike_weeks;
    double spike_multiplier = 8.0;
    std::optional<std::pair<int, double>> breakpoint; // week, new mean
    std::uint64_t seed = 1;
};

/// Generated series plus the ground truth the tests score against.
struct SynthResult {
    TimeSeries series;
    std::set<int> mto_weeks;   // the spiked weeks
    Vector base_values;        // the series before spiking
    double injected_fraction = 0.0; // spike excess volume / total volume
};

SynthResult generate_hybrid(const SynthSpec& spec);

/// Reference linkage that recomputes every cross-cluster distance from
/// scratch at each step (pair means over the original matrix for upgma, the
/// recursive half-and-half average over explicit subtrees for wpgma).
/// Deliberately independent of the incremental implementation; capped at 16
/// leaves because it exists only to check small cases.
ClusterTree oracle_linkage_tree(const Matrix& distances, Linkage linkage);
ClusterCut oracle_linkage(const Matrix& distances, Linkage linkage, int k);

/// Exhaustive two-segment scan: the boundary (first week of the second
/// segment) minimizing the total within-segment sum of squares, plus the
/// mean-shift-to-pooled-std ratio at that boundary. degenerate marks inputs
/// where every boundary scores the same (constant series).
struct BreakpointScan {
    int week = 0;
    bool degenerate = false;
    double shift_ratio = 0.0;
};

BreakpointScan oracle_breakpoint(const TimeSeries& y);

} // namespace demandsplit
