#include "demandsplit/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace demandsplit {

namespace {

void check_square_symmetric(const Matrix& d) {
    if (d.rows() != d.cols())
        throw ParameterError("agglomerative_tree: matrix not square");
    if (d.rows() < 2)
        throw InsufficientDataError("agglomerative_tree: need at least 2 leaves");
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0)
            throw ParameterError("agglomerative_tree: nonzero diagonal");
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
            const double scale = std::max({1.0, std::abs(d(i, j)), std::abs(d(j, i))});
            if (std::abs(d(i, j) - d(j, i)) > 1e-12 * scale)
                throw ParameterError("agglomerative_tree: matrix not symmetric");
            if (d(i, j) < 0.0)
                throw ParameterError("agglomerative_tree: negative distance");
        }
    }
}

} // namespace

ClusterTree agglomerative_tree(const Matrix& distances, Linkage linkage) {
    check_square_symmetric(distances);
    const int n = static_cast<int>(distances.rows());

    // Working copy indexed by node id; rows for merged-away nodes go stale
    // and are skipped via the active list.
    Matrix d = distances;
    d.conservativeResize(2 * n - 1, 2 * n - 1);
    std::vector<int> active;          // node ids, kept sorted by creation
    std::vector<int> size(2 * n - 1, 1);
    std::vector<int> min_leaf(2 * n - 1, 0);
    for (int i = 0; i < n; ++i) {
        active.push_back(i);
        min_leaf[i] = i;
    }

    ClusterTree tree;
    tree.n_leaves = n;
    tree.linkage = linkage;
    tree.merges.reserve(n - 1);

    double last_height = -std::numeric_limits<double>::infinity();
    for (int step = 0; step < n - 1; ++step) {
        // Pick the closest pair; ties go to the pair holding the smallest
        // leaf indices so equal inputs always merge identically.
        int best_a = -1, best_b = -1;
        double best_d = std::numeric_limits<double>::infinity();
        int best_lo = 0, best_hi = 0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                const int a = active[i], b = active[j];
                const double dist = d(a, b);
                const int lo = std::min(min_leaf[a], min_leaf[b]);
                const int hi = std::max(min_leaf[a], min_leaf[b]);
                if (dist < best_d
                    || (dist == best_d && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best_d = dist;
                    best_a = a;
                    best_b = b;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }

        const double tol = 1e-9 * std::max(1.0, std::abs(best_d));
        if (best_d < last_height - tol)
            throw InternalError("agglomerative_tree: merge heights decreased");
        last_height = std::max(last_height, best_d);

        const int node = n + step;
        const int left = min_leaf[best_a] <= min_leaf[best_b] ? best_a : best_b;
        const int right = left == best_a ? best_b : best_a;
        tree.merges.push_back({left, right, best_d});
        min_leaf[node] = std::min(min_leaf[best_a], min_leaf[best_b]);
        size[node] = size[best_a] + size[best_b];

        for (int c : active) {
            if (c == best_a || c == best_b)
                continue;
            double nd;
            if (linkage == Linkage::upgma) {
                nd = (size[best_a] * d(best_a, c) + size[best_b] * d(best_b, c))
                     / double(size[best_a] + size[best_b]);
            } else {
                nd = 0.5 * (d(best_a, c) + d(best_b, c));
            }
            d(node, c) = nd;
            d(c, node) = nd;
        }

        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](int x) { return x == best_a || x == best_b; }),
                     active.end());
        active.push_back(node);
    }
    return tree;
}

std::vector<int> cluster_leaves(const ClusterTree& tree, int node) {
    if (node < 0 || node > tree.root())
        throw ParameterError("cluster_leaves: node out of range");
    std::vector<int> leaves;
    std::vector<int> stack{node};
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        if (x < tree.n_leaves) {
            leaves.push_back(x);
        } else {
            const Merge& m = tree.merges[static_cast<std::size_t>(x - tree.n_leaves)];
            stack.push_back(m.left);
            stack.push_back(m.right);
        }
    }
    std::sort(leaves.begin(), leaves.end());
    return leaves;
}

ClusterCut cut_tree(const ClusterTree& tree, int k) {
    if (k < 1 || k > tree.n_leaves)
        throw ParameterError("cut_tree: k must be between 1 and the leaf count");
    // Undo the last k-1 merges: the roots that remain are the k clusters.
    std::vector<int> nodes{tree.root()};
    for (int undo = 0; undo < k - 1; ++undo) {
        const auto it = std::max_element(nodes.begin(), nodes.end());
        const int top = *it;
        nodes.erase(it);
        const Merge& m = tree.merges[static_cast<std::size_t>(top - tree.n_leaves)];
        nodes.push_back(m.left);
        nodes.push_back(m.right);
    }
    ClusterCut cut;
    cut.reserve(nodes.size());
    for (int nd : nodes)
        cut.push_back(cluster_leaves(tree, nd));
    std::sort(cut.begin(), cut.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });
    return cut;
}

namespace {

void newick_node(std::ostringstream& os, const ClusterTree& tree, int node, double parent_height,
                 const std::vector<std::string>& labels) {
    double height = 0.0;
    if (node < tree.n_leaves) {
        os << labels[static_cast<std::size_t>(node)];
    } else {
        const Merge& m = tree.merges[static_cast<std::size_t>(node - tree.n_leaves)];
        height = m.height;
        os << '(';
        newick_node(os, tree, m.left, height, labels);
        os << ',';
        newick_node(os, tree, m.right, height, labels);
        os << ')';
    }
    os << ':' << parent_height - height;
}

} // namespace

std::string to_newick(const ClusterTree& tree, const std::vector<std::string>& leaf_labels) {
    if (static_cast<int>(leaf_labels.size()) != tree.n_leaves)
        throw ParameterError("to_newick: label count does not match leaves");
    std::ostringstream os;
    const int root = tree.root();
    if (root < tree.n_leaves) {
        os << leaf_labels[static_cast<std::size_t>(root)];
    } else {
        const Merge& m = tree.merges[static_cast<std::size_t>(root - tree.n_leaves)];
        os << '(';
        newick_node(os, tree, m.left, m.height, leaf_labels);
        os << ',';
        newick_node(os, tree, m.right, m.height, leaf_labels);
        os << ')';
    }
    os << ';';
    return os.str();
}

void write_dendrogram_csv(std::ostream& out, const ClusterTree& tree) {
    out << "merge_index,left,right,height\n";
    for (std::size_t i = 0; i < tree.merges.size(); ++i) {
        const Merge& m = tree.merges[i];
        out << i << ',' << m.left << ',' << m.right << ',' << m.height << '\n';
    }
}

} // namespace demandsplit
