#include "pif/forest.hpp"

#include <cmath>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pif {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060;

void validate(const PifParams& p) {
    if (p.t < 1) throw ConfigError("pif: t must be >= 1");
    if (p.b < 2) throw ConfigError("pif: b must be >= 2");
    if (p.psi < p.b) throw ConfigError("pif: psi must be >= b");
}

// Distance used inside tree build/locate. Tanimoto over the sparse
// support is bit-identical to the dense formula; on binary input it is
// also exactly the Jaccard distance, so both metrics share the path.
struct RowDist {
    Metric metric;
    const Matrix* dense = nullptr;
    const std::vector<SparseVec>* sparse = nullptr;

    double operator()(std::size_t a, std::size_t b) const {
        if (metric == Metric::Euclidean) return euclidean(dense->row(a), dense->row(b));
        return tanimoto((*sparse)[a], (*sparse)[b]);
    }
};

struct TreeBuilder {
    const Matrix& rows;                  // subsample rows, local indexing
    RowDist dist;
    int b;
    int height_limit;
    Rng rng;
    std::vector<std::uint32_t> global_rows;  // local -> training-set row
    PiTree tree;
    std::vector<std::uint32_t> seed_global;  // per seed slot, training-set row

    std::int32_t build(std::vector<std::uint32_t>& pts, int e) {
        std::int32_t id = std::int32_t(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[id].size = std::int32_t(pts.size());
        if (e >= height_limit || pts.size() < std::size_t(b)) return id;

        auto pick = rng.sample_indices(pts.size(), std::size_t(b));
        std::vector<std::uint32_t> seeds(b);
        for (int i = 0; i < b; ++i) seeds[i] = pts[pick[i]];

        std::vector<std::vector<std::uint32_t>> parts(b);
        for (std::uint32_t p : pts) {
            int best = 0;
            double best_d = dist(p, seeds[0]);
            for (int i = 1; i < b; ++i) {
                double d = dist(p, seeds[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            parts[best].push_back(p);
        }
        pts.clear();
        pts.shrink_to_fit();

        tree.nodes[id].seeds_begin = std::int32_t(tree.seed_slots.size());
        for (int i = 0; i < b; ++i) {
            tree.seed_slots.push_back(std::int32_t(seed_global.size()));
            seed_global.push_back(global_rows[seeds[i]]);
        }
        tree.nodes[id].children_begin = std::int32_t(tree.child_ids.size());
        for (int i = 0; i < b; ++i) tree.child_ids.push_back(-1);
        for (int i = 0; i < b; ++i) {
            std::int32_t child = build(parts[i], e + 1);
            tree.child_ids[tree.nodes[id].children_begin + i] = child;
        }
        return id;
    }
};

PiForest build_forest_impl(const PreferenceMatrix& prefs, const PifParams& params,
                           bool parallel) {
    validate(params);
    if (prefs.points() == 0) throw ConfigError("pif: empty training set");
    const std::size_t n = prefs.points();

    PiForest forest;
    forest.params = params;
    forest.psi_effective = int(std::min<std::size_t>(std::size_t(params.psi), n));
    forest.height_limit = params.height_limit > 0
                              ? params.height_limit
                              : default_height_limit(forest.psi_effective, params.b);
    forest.dim = prefs.pool_size();
    forest.trees.resize(std::size_t(params.t));

    // Interim per-tree seed identities as training-set rows; deduplicated
    // into the forest seed table afterwards, in tree order, so the result
    // is independent of build parallelism.
    std::vector<std::vector<std::uint32_t>> tree_seed_rows(std::size_t(params.t));

    auto build_one = [&](int ti) {
        Rng rng(mix_seed(params.rng_seed, std::uint64_t(ti)));
        auto sub = rng.sample_indices(n, std::size_t(forest.psi_effective));

        Matrix rows(sub.size(), prefs.pool_size());
        std::vector<std::uint32_t> global(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i) {
            global[i] = std::uint32_t(sub[i]);
            auto src = prefs.row(sub[i]);
            std::copy(src.begin(), src.end(), rows.row(i).begin());
        }
        std::vector<SparseVec> sparse;
        if (params.metric != Metric::Euclidean) {
            sparse.reserve(sub.size());
            for (std::size_t i = 0; i < sub.size(); ++i)
                sparse.push_back(SparseVec::from(rows.row(i)));
        }
        TreeBuilder builder{rows,
                            RowDist{params.metric, &rows, &sparse},
                            params.b,
                            forest.height_limit,
                            rng,
                            std::move(global),
                            {},
                            {}};
        std::vector<std::uint32_t> all(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i) all[i] = std::uint32_t(i);
        builder.build(all, 0);
        forest.trees[std::size_t(ti)] = std::move(builder.tree);
        tree_seed_rows[std::size_t(ti)] = std::move(builder.seed_global);
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int ti = 0; ti < params.t; ++ti) build_one(ti);
    } else {
        for (int ti = 0; ti < params.t; ++ti) build_one(ti);
    }

    // Deduplicate seed rows across trees (first-appearance order).
    std::unordered_map<std::uint32_t, std::int32_t> slot_of_row;
    std::vector<std::uint32_t> table_rows;
    for (int ti = 0; ti < params.t; ++ti) {
        auto& tree = forest.trees[std::size_t(ti)];
        const auto& rows = tree_seed_rows[std::size_t(ti)];
        for (auto& slot : tree.seed_slots) {
            std::uint32_t row = rows[std::size_t(slot)];
            auto [it, inserted] = slot_of_row.try_emplace(row, std::int32_t(table_rows.size()));
            if (inserted) table_rows.push_back(row);
            slot = it->second;
        }
    }
    forest.seed_table = Matrix(table_rows.size(), prefs.pool_size());
    for (std::size_t i = 0; i < table_rows.size(); ++i) {
        auto src = prefs.row(table_rows[i]);
        std::copy(src.begin(), src.end(), forest.seed_table.row(i).begin());
    }
    return forest;
}

// Query-side distance: sparse query against cached sparse seeds for
// Tanimoto/Jaccard, dense rows for Euclidean.
struct QueryCtx {
    Metric metric;
    const Matrix* seeds_dense;
    const std::vector<SparseVec>* seeds_sparse;
    std::span<const double> q_dense;
    const SparseVec* q_sparse;

    double to_seed(std::int32_t slot) const {
        if (metric == Metric::Euclidean)
            return euclidean(q_dense, seeds_dense->row(std::size_t(slot)));
        return tanimoto(*q_sparse, (*seeds_sparse)[std::size_t(slot)]);
    }
};

double path_length_ctx(const QueryCtx& ctx, const PiTree& tree, int b, std::int32_t node_id,
                       int e) {
    const auto& node = tree.nodes[std::size_t(node_id)];
    if (node.external()) return double(e) + adjustment_c(node.size);
    int best = 0;
    double best_d = ctx.to_seed(tree.seed_slots[std::size_t(node.seeds_begin)]);
    for (int i = 1; i < b; ++i) {
        double d = ctx.to_seed(tree.seed_slots[std::size_t(node.seeds_begin + i)]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return path_length_ctx(ctx, tree, b, tree.child_ids[std::size_t(node.children_begin + best)],
                           e + 1);
}

std::vector<SparseVec> sparse_seed_cache(const PiForest& forest) {
    std::vector<SparseVec> cache;
    if (forest.params.metric == Metric::Euclidean) return cache;
    cache.reserve(forest.seed_table.rows);
    for (std::size_t i = 0; i < forest.seed_table.rows; ++i)
        cache.push_back(SparseVec::from(forest.seed_table.row(i)));
    return cache;
}

double score_from_mean_path(double mean_h, int psi_effective) {
    double c = adjustment_c(psi_effective);
    if (c <= 0.0) return mean_h == 0.0 ? 1.0 : std::pow(2.0, -mean_h);
    return std::pow(2.0, -mean_h / c);
}

double score_one(const PiForest& forest, const std::vector<SparseVec>& seed_cache,
                 std::span<const double> p, const SparseVec* sp) {
    QueryCtx ctx{forest.params.metric, &forest.seed_table, &seed_cache, p, sp};
    double sum = 0.0;
    for (const auto& tree : forest.trees)
        sum += path_length_ctx(ctx, tree, forest.params.b, 0, 0);
    return score_from_mean_path(sum / double(forest.trees.size()), forest.psi_effective);
}

std::vector<double> score_all_impl(const PreferenceMatrix& prefs, const PiForest& forest,
                                   bool parallel) {
    if (prefs.pool_size() != forest.dim)
        throw DimensionMismatch("score: dimension differs from the forest's");
    auto seed_cache = sparse_seed_cache(forest);
    std::vector<double> scores(prefs.points());
    const std::int64_t n = std::int64_t(prefs.points());
    bool sparse = forest.params.metric != Metric::Euclidean;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < n; ++i) {
        SparseVec sp;
        if (sparse) sp = SparseVec::from(prefs.row(std::size_t(i)));
        scores[std::size_t(i)] =
            score_one(forest, seed_cache, prefs.row(std::size_t(i)), sparse ? &sp : nullptr);
    }
    return scores;
}

}  // namespace

double metric_distance(Metric metric, std::span<const double> p, std::span<const double> q) {
    switch (metric) {
        case Metric::Tanimoto: return tanimoto(p, q);
        case Metric::Jaccard: return jaccard(p, q);
        case Metric::Euclidean: return euclidean(p, q);
    }
    throw ConfigError("unknown metric");
}

int default_height_limit(int psi, int b) {
    int l = 1;
    std::int64_t cap = b;
    while (cap < psi) {
        cap *= b;
        ++l;
    }
    return l;
}

double adjustment_c(int n) {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    double h = std::log(double(n - 1)) + kEulerGamma;
    return 2.0 * h - 2.0 * double(n - 1) / double(n);
}

std::vector<std::vector<std::size_t>> voronoi_partition(
    const std::vector<std::vector<double>>& points,
    const std::vector<std::vector<double>>& seeds, Metric metric) {
    std::vector<std::vector<std::size_t>> parts(seeds.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::size_t best = 0;
        double best_d = metric_distance(metric, points[p], seeds[0]);
        for (std::size_t i = 1; i < seeds.size(); ++i) {
            double d = metric_distance(metric, points[p], seeds[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        parts[best].push_back(p);
    }
    return parts;
}

PiForest build_forest(const PreferenceMatrix& prefs, const PifParams& params) {
    return build_forest_impl(prefs, params, true);
}

PiForest build_forest_serial(const PreferenceMatrix& prefs, const PifParams& params) {
    return build_forest_impl(prefs, params, false);
}

double path_length(std::span<const double> p, const PiTree& tree, const PiForest& forest,
                   int e) {
    if (p.size() != forest.dim)
        throw DimensionMismatch("path_length: dimension differs from the forest's");
    auto seed_cache = sparse_seed_cache(forest);
    SparseVec sp;
    bool sparse = forest.params.metric != Metric::Euclidean;
    if (sparse) sp = SparseVec::from(p);
    QueryCtx ctx{forest.params.metric, &forest.seed_table, &seed_cache, p,
                 sparse ? &sp : nullptr};
    return path_length_ctx(ctx, tree, forest.params.b, 0, e);
}

double score(std::span<const double> p, const PiForest& forest) {
    if (p.size() != forest.dim)
        throw DimensionMismatch("score: dimension differs from the forest's");
    auto seed_cache = sparse_seed_cache(forest);
    SparseVec sp;
    bool sparse = forest.params.metric != Metric::Euclidean;
    if (sparse) sp = SparseVec::from(p);
    return score_one(forest, seed_cache, p, sparse ? &sp : nullptr);
}

std::vector<double> score_all(const PreferenceMatrix& prefs, const PiForest& forest) {
    return score_all_impl(prefs, forest, true);
}

std::vector<double> score_all_serial(const PreferenceMatrix& prefs, const PiForest& forest) {
    return score_all_impl(prefs, forest, false);
}

}  // namespace pif
