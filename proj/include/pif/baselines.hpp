#ifndef PIF_BASELINES_HPP
#define PIF_BASELINES_HPP

#include <cstdint>
#include <vector>

#include "pif/common.hpp"
#include "pif/forest.hpp"

namespace pif {

struct IForParams {
    int t = 100;
    int psi = 256;
    int height_limit = -1;  // -1: ceil(log2 of effective sample size)
    std::uint64_t rng_seed = 0;
};

// Classic axis-aligned isolation forest: random attribute with nonzero
// range, split value uniform in (min, max) of the node.
struct IsoTree {
    struct Node {
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::int32_t attr = -1;
        double split = 0.0;
        std::int32_t size = 0;

        bool external() const { return left < 0; }
    };
    std::vector<Node> nodes;
};

struct IsoForest {
    IForParams params;
    int psi_effective = 0;
    int height_limit = 0;
    std::size_t dim = 0;
    std::vector<IsoTree> trees;
};

IsoForest ifor_fit(const Matrix& data, const IForParams& params);
std::vector<double> ifor_score(const IsoForest& forest, const Matrix& data);
std::vector<double> ifor_fit_score(const Matrix& data, const IForParams& params);

struct LofParams {
    int k = 10;
    Metric metric = Metric::Euclidean;
};

// Standard LOF over a pairwise distance matrix; the k-distance
// neighborhood includes every point tied at the k-th distance.
std::vector<double> lof_score(const Matrix& data, const LofParams& params);
std::vector<double> lof_score_from_distances(const Matrix& dist, int k);

// Full pairwise distance matrix under the metric (parallel over rows).
Matrix pairwise_distances(const Matrix& data, Metric metric);

}  // namespace pif

#endif
