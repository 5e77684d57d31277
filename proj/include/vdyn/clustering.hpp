#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vdyn/common.hpp"

namespace vdyn {

struct DistanceMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> d;

    void validate() const {
        const std::size_t n = labels.size();
        require(d.size() == n, "distance matrix shape mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            require(d[i].size() == n, "distance matrix shape mismatch");
            require(d[i][i] == 0.0, "distance matrix diagonal must be zero");
            for (std::size_t j = 0; j < n; ++j) {
                require(d[i][j] >= 0.0, "distances must be nonnegative");
                require(d[i][j] == d[j][i], "distance matrix must be symmetric");
            }
        }
    }
};

// One agglomeration step. a and b are cluster ids: 0..n-1 are leaves in
// leaf_labels order, and the cluster formed by merge t gets id n + t.
struct Merge {
    int a = 0;
    int b = 0;
    double height = 0.0;  // twice the within-cluster sum-of-squares increase
    int size = 0;         // leaves in the merged cluster
};

struct Dendrogram {
    std::vector<std::string> leaf_labels;
    std::vector<Merge> merges;
};

inline DistanceMatrix squared_euclidean_distances(const std::vector<std::string>& labels,
                                                  const std::vector<Series>& points) {
    require(labels.size() == points.size(), "one label per point required");
    const std::size_t n = labels.size();
    DistanceMatrix m;
    m.labels = labels;
    m.d.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        require(points[i].size() == points.front().size(), "points differ in dimension");
        for (std::size_t j = i + 1; j < n; ++j) {
            double ss = 0.0;
            for (std::size_t k = 0; k < points[i].size(); ++k) {
                const double dv = points[i][k] - points[j][k];
                ss += dv * dv;
            }
            m.d[i][j] = m.d[j][i] = ss;
        }
    }
    return m;
}

// Agglomerative clustering with Ward's criterion via the Lance-Williams
// update on squared Euclidean distances. Labels are sorted before anything
// else so the result does not depend on input order; ties between candidate
// pairs go to the lowest (a, b) cluster-id pair.
inline Dendrogram ward_linkage(const std::vector<std::string>& labels,
                               const std::vector<Series>& points) {
    require(labels.size() == points.size(), "ward_linkage: one label per point required");
    require(labels.size() >= 2, "ward_linkage: need at least 2 points");
    {
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                "ward_linkage: duplicate labels");
    }

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });

    Dendrogram tree;
    std::vector<Series> pts;
    for (std::size_t idx : order) {
        tree.leaf_labels.push_back(labels[idx]);
        pts.push_back(points[idx]);
    }
    const std::size_t n = pts.size();
    for (const auto& p : pts)
        require(p.size() == pts.front().size() && all_finite(p),
                "ward_linkage: points must share a finite dimension");

    auto dist = squared_euclidean_distances(tree.leaf_labels, pts).d;
    struct Active {
        int id;
        int size;
    };
    std::vector<Active> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = {static_cast<int>(i), 1};

    for (std::size_t t = 0; t + 1 < n; ++t) {
        const auto canon = [&](std::size_t i, std::size_t j) {
            return std::make_pair(std::min(active[i].id, active[j].id),
                                  std::max(active[i].id, active[j].id));
        };
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < active.size(); ++i) {
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                if (dist[i][j] < best ||
                    (dist[i][j] == best && canon(i, j) < canon(bi, bj))) {
                    best = dist[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }

        const int ni = active[bi].size, nj = active[bj].size;
        Merge mg{std::min(active[bi].id, active[bj].id), std::max(active[bi].id, active[bj].id),
                 best, ni + nj};
        tree.merges.push_back(mg);

        // Lance-Williams Ward update of every other cluster's distance to the merger.
        std::vector<double> merged_row(active.size(), 0.0);
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (k == bi || k == bj) continue;
            const double nk = active[k].size;
            merged_row[k] = ((ni + nk) * dist[bi][k] + (nj + nk) * dist[bj][k] - nk * best) /
                            (ni + nj + nk);
        }

        active[bi] = {static_cast<int>(n + t), ni + nj};
        for (std::size_t k = 0; k < active.size(); ++k) {
            dist[bi][k] = dist[k][bi] = merged_row[k];
        }
        dist[bi][bi] = 0.0;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
        dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(bj));
        for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return tree;
}

// Removes the k-1 last (highest) merges; remaining components are numbered
// by the order their first leaf appears in leaf_labels order.
inline std::map<std::string, int> cut_tree(const Dendrogram& tree, int k) {
    const std::size_t n = tree.leaf_labels.size();
    require(n >= 1, "cut_tree: empty dendrogram");
    require(tree.merges.size() == n - 1, "cut_tree: malformed dendrogram");
    require(k >= 1 && static_cast<std::size_t>(k) <= n, "cut_tree: k out of range");

    std::vector<int> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    const std::size_t keep = n - static_cast<std::size_t>(k);
    for (std::size_t t = 0; t < keep; ++t) {
        const auto& m = tree.merges[t];
        const int merged = static_cast<int>(n + t);
        parent[static_cast<std::size_t>(find(m.a))] = merged;
        parent[static_cast<std::size_t>(find(m.b))] = merged;
    }

    std::map<std::string, int> assignment;
    std::map<int, int> root_to_id;
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int root = find(static_cast<int>(i));
        auto it = root_to_id.find(root);
        if (it == root_to_id.end()) it = root_to_id.emplace(root, next++).first;
        assignment[tree.leaf_labels[i]] = it->second;
    }
    return assignment;
}

}  // namespace vdyn
