#include "demandsplit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

namespace demandsplit {

namespace {

void validate_spec(const SynthSpec& spec) {
    if (spec.n_weeks < 2)
        throw ParameterError("generate_hybrid: need at least 2 weeks");
    if (spec.base_mean <= 0.0)
        throw ParameterError("generate_hybrid: base mean must be positive");
    if (spec.base_cov < 0.0)
        throw ParameterError("generate_hybrid: negative coefficient of variation is infeasible");
    const bool has_spikes =
        spec.spike_weeks ? !spec.spike_weeks->empty() : spec.spike_count > 0;
    if (has_spikes && spec.spike_multiplier <= 1.0)
        throw ParameterError("generate_hybrid: spike multiplier must exceed 1");
    if (spec.spike_count < 0 || spec.spike_count > spec.n_weeks)
        throw ParameterError("generate_hybrid: spike count out of range");
    if (spec.spike_weeks) {
        for (int w : *spec.spike_weeks)
            if (w < 1 || w > spec.n_weeks)
                throw ParameterError("generate_hybrid: spike week out of range");
    }
    if (spec.breakpoint) {
        if (spec.breakpoint->first < 2 || spec.breakpoint->first > spec.n_weeks)
            throw ParameterError("generate_hybrid: breakpoint week out of range");
        if (spec.breakpoint->second <= 0.0)
            throw ParameterError("generate_hybrid: breakpoint mean must be positive");
    }
}

// Lognormal with exact target mean and cov: sigma^2 = ln(1 + cov^2),
// mu = ln(mean) - sigma^2/2. cov 0 degenerates to the constant mean.
double lognormal_draw(std::mt19937_64& rng, double mean, double cov) {
    if (cov == 0.0)
        return mean;
    const double s2 = std::log1p(cov * cov);
    const double mu = std::log(mean) - 0.5 * s2;
    std::normal_distribution<double> normal(0.0, 1.0);
    return std::exp(mu + std::sqrt(s2) * normal(rng));
}

} // namespace

SynthResult generate_hybrid(const SynthSpec& spec) {
    validate_spec(spec);
    std::mt19937_64 rng(spec.seed);

    SynthResult out;
    out.series.product_id = spec.product_id;
    out.series.weeks.resize(static_cast<std::size_t>(spec.n_weeks));
    out.series.demand = Vector(spec.n_weeks);
    out.base_values = Vector(spec.n_weeks);

    std::set<int> spikes;
    if (spec.spike_weeks) {
        spikes = *spec.spike_weeks;
    } else if (spec.spike_count > 0) {
        std::uniform_int_distribution<int> pick(1, spec.n_weeks);
        while (static_cast<int>(spikes.size()) < spec.spike_count)
            spikes.insert(pick(rng));
    }

    for (int w = 1; w <= spec.n_weeks; ++w) {
        const std::size_t i = static_cast<std::size_t>(w - 1);
        const double level_mean =
            (spec.breakpoint && w >= spec.breakpoint->first) ? spec.breakpoint->second
                                                             : spec.base_mean;
        const double trend = spec.trend_slope * (w - 1);
        double v = lognormal_draw(rng, level_mean, spec.base_cov) + trend;
        v = std::max(0.0, std::round(v));
        out.base_values[static_cast<Eigen::Index>(i)] = v;
        if (spikes.count(w)) {
            // Spikes are a fixed multiple of the local base level so a seed's
            // order weeks share one magnitude band and cluster together.
            v = std::round(spec.spike_multiplier * (level_mean + trend));
        }
        out.series.weeks[i] = w;
        out.series.demand[static_cast<Eigen::Index>(i)] = v;
    }
    out.mto_weeks = spikes;

    const double total = out.series.demand.sum();
    double injected = 0.0;
    for (int w : spikes) {
        const Eigen::Index i = w - 1;
        injected += out.series.demand[i] - out.base_values[i];
    }
    out.injected_fraction = total > 0.0 ? injected / total : 0.0;
    return out;
}

namespace {

// Explicit merge structure for the reference wpgma distance: half the
// distance comes from each child, recursively down to the leaves.
struct RefNode {
    int leaf = -1;
    std::unique_ptr<RefNode> left, right;
};

double ref_distance(const Matrix& d, const RefNode& a, const RefNode& b) {
    if (a.leaf >= 0 && b.leaf >= 0)
        return d(a.leaf, b.leaf);
    if (a.leaf < 0)
        return 0.5 * (ref_distance(d, *a.left, b) + ref_distance(d, *a.right, b));
    return 0.5 * (ref_distance(d, a, *b.left) + ref_distance(d, a, *b.right));
}

} // namespace

ClusterTree oracle_linkage_tree(const Matrix& distances, Linkage linkage) {
    if (distances.rows() != distances.cols())
        throw ParameterError("oracle_linkage_tree: matrix not square");
    const int n = static_cast<int>(distances.rows());
    if (n < 2)
        throw InsufficientDataError("oracle_linkage_tree: need at least 2 leaves");
    if (n > 16)
        throw ParameterError("oracle_linkage_tree: reference capped at 16 leaves");

    struct Cluster {
        int node;
        std::vector<int> members; // leaf ids
        std::unique_ptr<RefNode> ref;
    };
    std::vector<Cluster> clusters;
    for (int i = 0; i < n; ++i) {
        auto leaf = std::make_unique<RefNode>();
        leaf->leaf = i;
        clusters.push_back({i, {i}, std::move(leaf)});
    }

    ClusterTree tree;
    tree.n_leaves = n;
    tree.linkage = linkage;

    auto pair_distance = [&](const Cluster& a, const Cluster& b) {
        if (linkage == Linkage::upgma) {
            double sum = 0.0;
            for (int s : a.members)
                for (int t : b.members)
                    sum += distances(s, t);
            return sum / (double(a.members.size()) * double(b.members.size()));
        }
        return ref_distance(distances, *a.ref, *b.ref);
    };

    for (int step = 0; step < n - 1; ++step) {
        std::size_t best_i = 0, best_j = 1;
        double best_d = std::numeric_limits<double>::infinity();
        int best_lo = 0, best_hi = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double dist = pair_distance(clusters[i], clusters[j]);
                const int la = clusters[i].members.front();
                const int lb = clusters[j].members.front();
                const int lo = std::min(la, lb);
                const int hi = std::max(la, lb);
                if (dist < best_d
                    || (dist == best_d && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best_d = dist;
                    best_i = i;
                    best_j = j;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }

        Cluster& a = clusters[best_i];
        Cluster& b = clusters[best_j];
        const bool a_first = std::min(a.members.front(), b.members.front()) == a.members.front();
        Cluster& first = a_first ? a : b;
        Cluster& second = a_first ? b : a;
        tree.merges.push_back({first.node, second.node, best_d});

        Cluster merged;
        merged.node = n + step;
        merged.members = first.members;
        merged.members.insert(merged.members.end(), second.members.begin(),
                              second.members.end());
        std::sort(merged.members.begin(), merged.members.end());
        auto parent = std::make_unique<RefNode>();
        parent->left = std::move(first.ref);
        parent->right = std::move(second.ref);
        merged.ref = std::move(parent);

        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_j));
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_i));
        clusters.push_back(std::move(merged));
    }
    return tree;
}

ClusterCut oracle_linkage(const Matrix& distances, Linkage linkage, int k) {
    return cut_tree(oracle_linkage_tree(distances, linkage), k);
}

BreakpointScan oracle_breakpoint(const TimeSeries& y) {
    const Eigen::Index n = y.demand.size();
    if (n < 4)
        throw InsufficientDataError("oracle_breakpoint: need at least 4 weeks");

    auto segment_sse = [&](Eigen::Index from, Eigen::Index len) {
        const auto seg = y.demand.segment(from, len);
        const double m = seg.mean();
        return (seg.array() - m).square().sum();
    };

    BreakpointScan out;
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index best_cut = 1;
    bool all_equal = true;
    double first_score = 0.0;
    for (Eigen::Index cut = 1; cut < n; ++cut) { // second segment starts at index cut
        const double score = segment_sse(0, cut) + segment_sse(cut, n - cut);
        if (cut == 1)
            first_score = score;
        else if (std::abs(score - first_score) > 1e-9 * std::max(1.0, first_score))
            all_equal = false;
        if (score < best) {
            best = score;
            best_cut = cut;
        }
    }
    out.degenerate = all_equal && sample_variance(y.demand) == 0.0;
    out.week = y.weeks[static_cast<std::size_t>(best_cut)];

    const auto a = y.demand.head(best_cut);
    const auto b = y.demand.tail(n - best_cut);
    const double shift = std::abs(b.mean() - a.mean());
    const double va = best_cut >= 2 ? sample_variance(a) : 0.0;
    const double vb = n - best_cut >= 2 ? sample_variance(b) : 0.0;
    const double pooled = std::sqrt(((best_cut - 1) * va + (n - best_cut - 1) * vb)
                                    / double(n - 2));
    out.shift_ratio = pooled > 0.0 ? shift / pooled
                      : shift > 0.0 ? std::numeric_limits<double>::infinity()
                                    : 0.0;
    return out;
}

} // namespace demandsplit
