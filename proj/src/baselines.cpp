#include "pif/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pif {

namespace {

struct IsoBuilder {
    const Matrix& data;
    int height_limit;
    Rng rng;
    IsoTree tree;

    // Uniform over attributes with nonzero range in the node: rejection
    // sampling with a full-scan fallback when draws keep hitting
    // constant columns. Returns {attr, min, max} or attr = -1.
    std::tuple<std::int32_t, double, double> pick_attribute(
        const std::vector<std::uint32_t>& pts) {
        auto range_of = [&](std::size_t a) {
            double lo = data.at(pts[0], a), hi = lo;
            for (std::uint32_t p : pts) {
                double v = data.at(p, a);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            return std::pair<double, double>(lo, hi);
        };
        for (int tries = 0; tries < 32; ++tries) {
            std::size_t a = std::size_t(rng.next_below(data.cols));
            auto [lo, hi] = range_of(a);
            if (hi > lo) return {std::int32_t(a), lo, hi};
        }
        std::vector<std::size_t> candidates;
        for (std::size_t a = 0; a < data.cols; ++a) {
            auto [lo, hi] = range_of(a);
            if (hi > lo) candidates.push_back(a);
        }
        if (candidates.empty()) return {-1, 0.0, 0.0};
        std::size_t a = candidates[rng.next_below(candidates.size())];
        auto [lo, hi] = range_of(a);
        return {std::int32_t(a), lo, hi};
    }

    std::int32_t build(std::vector<std::uint32_t>& pts, int e) {
        std::int32_t id = std::int32_t(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[id].size = std::int32_t(pts.size());
        if (e >= height_limit || pts.size() < 2) return id;

        auto [attr, lo, hi] = pick_attribute(pts);
        if (attr < 0) return id;  // all-constant node

        double r = rng.next_double();
        while (r == 0.0) r = rng.next_double();
        double split = lo + r * (hi - lo);

        std::vector<std::uint32_t> left, right;
        for (std::uint32_t p : pts)
            (data.at(p, std::size_t(attr)) < split ? left : right).push_back(p);
        pts.clear();
        pts.shrink_to_fit();

        tree.nodes[id].attr = attr;
        tree.nodes[id].split = split;
        std::int32_t l = build(left, e + 1);
        std::int32_t rch = build(right, e + 1);
        tree.nodes[id].left = l;
        tree.nodes[id].right = rch;
        return id;
    }
};

double iso_path_length(const IsoTree& tree, std::span<const double> p) {
    std::int32_t id = 0;
    int e = 0;
    for (;;) {
        const auto& node = tree.nodes[std::size_t(id)];
        if (node.external()) return double(e) + adjustment_c(node.size);
        id = p[std::size_t(node.attr)] < node.split ? node.left : node.right;
        ++e;
    }
}

}  // namespace

IsoForest ifor_fit(const Matrix& data, const IForParams& params) {
    if (params.t < 1) throw ConfigError("ifor: t must be >= 1");
    if (params.psi < 2) throw ConfigError("ifor: psi must be >= 2");
    if (data.rows < 2) throw ConfigError("ifor: need at least 2 points");

    IsoForest forest;
    forest.params = params;
    forest.psi_effective = int(std::min<std::size_t>(std::size_t(params.psi), data.rows));
    forest.height_limit = params.height_limit > 0
                              ? params.height_limit
                              : default_height_limit(forest.psi_effective, 2);
    forest.dim = data.cols;
    forest.trees.resize(std::size_t(params.t));

    const int t = params.t;
#pragma omp parallel for schedule(dynamic)
    for (int ti = 0; ti < t; ++ti) {
        Rng rng(mix_seed(params.rng_seed, std::uint64_t(ti)));
        auto sub = rng.sample_indices(data.rows, std::size_t(forest.psi_effective));
        std::vector<std::uint32_t> pts(sub.begin(), sub.end());
        IsoBuilder builder{data, forest.height_limit, rng, {}};
        builder.build(pts, 0);
        forest.trees[std::size_t(ti)] = std::move(builder.tree);
    }
    return forest;
}

std::vector<double> ifor_score(const IsoForest& forest, const Matrix& data) {
    if (data.cols != forest.dim)
        throw DimensionMismatch("ifor_score: dimension differs from the forest's");
    std::vector<double> scores(data.rows);
    double c = adjustment_c(forest.psi_effective);
    const std::int64_t n = std::int64_t(data.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const auto& tree : forest.trees) sum += iso_path_length(tree, data.row(std::size_t(i)));
        double mean_h = sum / double(forest.trees.size());
        scores[std::size_t(i)] = c <= 0.0 ? (mean_h == 0.0 ? 1.0 : std::pow(2.0, -mean_h))
                                          : std::pow(2.0, -mean_h / c);
    }
    return scores;
}

std::vector<double> ifor_fit_score(const Matrix& data, const IForParams& params) {
    return ifor_score(ifor_fit(data, params), data);
}

Matrix pairwise_distances(const Matrix& data, Metric metric) {
    const std::size_t n = data.rows;
    Matrix dist(n, n);
    if (metric == Metric::Euclidean) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < std::int64_t(n); ++i)
            for (std::size_t j = 0; j < n; ++j)
                dist.at(std::size_t(i), j) = euclidean(data.row(std::size_t(i)), data.row(j));
    } else {
        std::vector<SparseVec> sparse;
        sparse.reserve(n);
        for (std::size_t i = 0; i < n; ++i) sparse.push_back(SparseVec::from(data.row(i)));
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < std::int64_t(n); ++i)
            for (std::size_t j = 0; j < n; ++j)
                dist.at(std::size_t(i), j) = tanimoto(sparse[std::size_t(i)], sparse[j]);
    }
    return dist;
}

std::vector<double> lof_score_from_distances(const Matrix& dist, int k) {
    const std::size_t n = dist.rows;
    if (k < 1 || std::size_t(k) >= n) throw KTooLarge("lof: require 1 <= k < n");
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> k_dist(n);
    std::vector<std::vector<std::uint32_t>> nbrs(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < std::int64_t(n); ++ii) {
        std::size_t i = std::size_t(ii);
        std::vector<double> buf(dist.row(i).begin(), dist.row(i).end());
        buf.erase(buf.begin() + std::ptrdiff_t(i));  // exclude self
        std::nth_element(buf.begin(), buf.begin() + (k - 1), buf.end());
        double kd = buf[std::size_t(k - 1)];
        k_dist[i] = kd;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && dist.at(i, j) <= kd) nbrs[i].push_back(std::uint32_t(j));
    }

    std::vector<double> lrd(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < std::int64_t(n); ++ii) {
        std::size_t i = std::size_t(ii);
        double sum = 0.0;
        for (std::uint32_t o : nbrs[i]) sum += std::max(k_dist[o], dist.at(i, o));
        lrd[i] = sum == 0.0 ? inf : double(nbrs[i].size()) / sum;
    }

    std::vector<double> lof(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < std::int64_t(n); ++ii) {
        std::size_t i = std::size_t(ii);
        double sum = 0.0;
        for (std::uint32_t o : nbrs[i]) {
            if (std::isinf(lrd[o]) && std::isinf(lrd[i]))
                sum += 1.0;  // duplicate within a duplicate cluster
            else if (std::isinf(lrd[i]))
                sum += 0.0;
            else
                sum += lrd[o] / lrd[i];
        }
        lof[i] = sum / double(nbrs[i].size());
    }
    return lof;
}

std::vector<double> lof_score(const Matrix& data, const LofParams& params) {
    if (params.k < 1 || std::size_t(params.k) >= data.rows)
        throw KTooLarge("lof: require 1 <= k < n");
    Matrix dist = pairwise_distances(data, params.metric);
    return lof_score_from_distances(dist, params.k);
}

}  // namespace pif
