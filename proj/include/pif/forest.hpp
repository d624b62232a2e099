#ifndef PIF_FOREST_HPP
#define PIF_FOREST_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pif/common.hpp"
#include "pif/preference.hpp"

namespace pif {

enum class Metric { Tanimoto, Jaccard, Euclidean };

double metric_distance(Metric metric, std::span<const double> p, std::span<const double> q);

struct PifParams {
    int t = 100;
    int psi = 256;
    int b = 2;
    int height_limit = -1;  // -1: ceil(log_b of the effective sample size)
    Metric metric = Metric::Tanimoto;
    std::uint64_t rng_seed = 0;
};

// smallest l >= 1 with b^l >= psi
int default_height_limit(int psi, int b);

// Nodes live in an arena. An internal node references b child node ids
// at child_ids[children_begin..+b) and b seed slots (rows of the
// forest-level seed table) at seed_slots[seeds_begin..+b).
struct PiTree {
    struct Node {
        std::int32_t children_begin = -1;  // -1: external
        std::int32_t seeds_begin = -1;
        std::int32_t size = 0;

        bool external() const { return children_begin < 0; }
    };
    std::vector<Node> nodes;  // nodes[0] is the root
    std::vector<std::int32_t> child_ids;
    std::vector<std::int32_t> seed_slots;
};

struct PiForest {
    PifParams params;
    int psi_effective = 0;   // min(psi, n) at build time
    int height_limit = 0;
    std::size_t dim = 0;
    Matrix seed_table;       // deduplicated seed vectors, one per row
    std::vector<PiTree> trees;
};

// Expected unsuccessful-search path length in a binary tree of n points,
// H(i) approximated by ln(i) + Euler's gamma. c(0) = c(1) = 0, c(2) = 1.
double adjustment_c(int n);

// Assigns each point to its nearest seed under the metric; ties go to the
// lowest seed index. Returns one index list per seed.
std::vector<std::vector<std::size_t>> voronoi_partition(
    const std::vector<std::vector<double>>& points,
    const std::vector<std::vector<double>>& seeds, Metric metric);

PiForest build_forest(const PreferenceMatrix& prefs, const PifParams& params);
PiForest build_forest_serial(const PreferenceMatrix& prefs, const PifParams& params);

double path_length(std::span<const double> p, const PiTree& tree, const PiForest& forest,
                   int e = 0);

// Anomaly score alpha = 2^(-mean(h)/c(psi_effective)), in (0, 1].
double score(std::span<const double> p, const PiForest& forest);
std::vector<double> score_all(const PreferenceMatrix& prefs, const PiForest& forest);
std::vector<double> score_all_serial(const PreferenceMatrix& prefs, const PiForest& forest);

}  // namespace pif

#endif
