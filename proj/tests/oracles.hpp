// Independent reference implementations used only to check production
// code. Straight-line, no sharing with the library internals.
#ifndef PIF_TESTS_ORACLES_HPP
#define PIF_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pif/baselines.hpp"
#include "pif/forest.hpp"

namespace pif::oracles {

// Walks a stored PI-Tree with an explicit nearest-seed search over the
// dense seed table.
inline double brute_path_length(const PiForest& forest, const PiTree& tree,
                                std::span<const double> p) {
    std::int32_t node_id = 0;
    double e = 0.0;
    for (;;) {
        const auto& node = tree.nodes[std::size_t(node_id)];
        if (node.external()) {
            int n = node.size;
            double c;
            if (n <= 1)
                c = 0.0;
            else if (n == 2)
                c = 1.0;
            else
                c = 2.0 * (std::log(double(n - 1)) + 0.57721566490153286060) -
                    2.0 * double(n - 1) / double(n);
            return e + c;
        }
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < forest.params.b; ++i) {
            auto seed =
                forest.seed_table.row(std::size_t(tree.seed_slots[std::size_t(node.seeds_begin + i)]));
            double d = metric_distance(forest.params.metric, p, seed);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        node_id = tree.child_ids[std::size_t(node.children_begin + best)];
        e += 1.0;
    }
}

// All-pairs AUC with half credit for ties.
inline double brute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 0) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / double(pairs);
}

// Textbook LOF from a pairwise distance matrix.
inline std::vector<double> brute_lof(const Matrix& dist, int k) {
    const std::size_t n = dist.rows;
    std::vector<std::vector<std::size_t>> nbrs(n);
    std::vector<double> kdist(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> ds;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) ds.push_back(dist.at(i, j));
        std::sort(ds.begin(), ds.end());
        kdist[i] = ds[std::size_t(k - 1)];
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && dist.at(i, j) <= kdist[i]) nbrs[i].push_back(j);
    }
    auto lrd = [&](std::size_t i) {
        double sum = 0.0;
        for (std::size_t o : nbrs[i]) sum += std::max(kdist[o], dist.at(i, o));
        if (sum == 0.0) return std::numeric_limits<double>::infinity();
        return double(nbrs[i].size()) / sum;
    };
    std::vector<double> lof(n);
    for (std::size_t i = 0; i < n; ++i) {
        double li = lrd(i);
        double sum = 0.0;
        for (std::size_t o : nbrs[i]) {
            double lo = lrd(o);
            if (std::isinf(lo) && std::isinf(li))
                sum += 1.0;
            else if (std::isinf(li))
                sum += 0.0;
            else
                sum += lo / li;
        }
        lof[i] = sum / double(nbrs[i].size());
    }
    return lof;
}

}  // namespace pif::oracles

#endif
