#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "demandsplit/stats.hpp"

namespace demandsplit {

enum class Linkage {
    upgma, // unweighted: cross-cluster mean over all leaf pairs
    wpgma  // weighted: d(A+B, C) = (d(A,C) + d(B,C)) / 2
};

/// One agglomeration step. Node ids follow the usual linkage convention:
/// 0..n-1 are leaves, n+i is the cluster created by merge i.
struct Merge {
    int left = 0;
    int right = 0;
    double height = 0.0;
};

/// Full agglomeration history: exactly n_leaves - 1 merges with
/// non-decreasing heights (both linkages are monotone).
struct ClusterTree {
    int n_leaves = 0;
    Linkage linkage = Linkage::upgma;
    std::vector<Merge> merges;

    int root() const { return n_leaves + static_cast<int>(merges.size()) - 1; }
};

/// Agglomerative clustering of a symmetric distance matrix. Ties are broken
/// deterministically toward the pair whose clusters contain the smallest
/// leaf indices, so equal inputs always produce equal trees.
ClusterTree agglomerative_tree(const Matrix& distances, Linkage linkage);

/// Clusters as sorted leaf-index lists, ordered by their smallest leaf.
using ClusterCut = std::vector<std::vector<int>>;

/// Undoes the last k-1 merges and returns the k remaining clusters.
ClusterCut cut_tree(const ClusterTree& tree, int k);

/// Sorted leaf indices under a node.
std::vector<int> cluster_leaves(const ClusterTree& tree, int node);

/// Newick text with branch lengths derived from merge heights.
std::string to_newick(const ClusterTree& tree, const std::vector<std::string>& leaf_labels);

/// CSV rows merge_index,left,right,height (header included).
void write_dendrogram_csv(std::ostream& out, const ClusterTree& tree);

} // namespace demandsplit
