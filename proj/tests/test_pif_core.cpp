#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "pif/forest.hpp"

using namespace pif;

namespace {

PreferenceMatrix pm_from(const std::vector<std::vector<double>>& rows, bool binary = false) {
    PreferenceMatrix prefs;
    prefs.m = Matrix(rows.size(), rows[0].size());
    prefs.binary = binary;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[0].size(); ++j) prefs.m.at(i, j) = rows[i][j];
    return prefs;
}

int tree_max_depth(const PiTree& tree, std::int32_t id, int b, int depth) {
    const auto& node = tree.nodes[std::size_t(id)];
    if (node.external()) return depth;
    int d = depth;
    for (int i = 0; i < b; ++i)
        d = std::max(d, tree_max_depth(tree, tree.child_ids[std::size_t(node.children_begin + i)],
                                       b, depth + 1));
    return d;
}

void collect_external(const PiTree& tree, std::int32_t id, int b,
                      std::vector<std::int32_t>& out) {
    const auto& node = tree.nodes[std::size_t(id)];
    if (node.external()) {
        out.push_back(id);
        return;
    }
    for (int i = 0; i < b; ++i)
        collect_external(tree, tree.child_ids[std::size_t(node.children_begin + i)], b, out);
}

// accumulated training sizes per subtree must equal the node's size
int check_partition_completeness(const PiTree& tree, std::int32_t id, int b) {
    const auto& node = tree.nodes[std::size_t(id)];
    if (node.external()) return node.size;
    int total = 0;
    for (int i = 0; i < b; ++i)
        total += check_partition_completeness(
            tree, tree.child_ids[std::size_t(node.children_begin + i)], b);
    CHECK(total == node.size);
    return total;
}

std::int32_t locate_leaf(const PiForest& forest, const PiTree& tree, std::span<const double> p) {
    std::int32_t id = 0;
    for (;;) {
        const auto& node = tree.nodes[std::size_t(id)];
        if (node.external()) return id;
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < forest.params.b; ++i) {
            auto seed = forest.seed_table.row(
                std::size_t(tree.seed_slots[std::size_t(node.seeds_begin + i)]));
            double d = metric_distance(forest.params.metric, p, seed);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        id = tree.child_ids[std::size_t(node.children_begin + best)];
    }
}

}  // namespace

TEST_CASE("adjustment factor") {
    CHECK(adjustment_c(0) == 0.0);
    CHECK(adjustment_c(1) == 0.0);
    CHECK(adjustment_c(2) == 1.0);
    // frozen from an independent evaluation of 2(ln 255 + gamma) - 2*255/256
    CHECK(adjustment_c(256) == doctest::Approx(10.244770920119917).epsilon(1e-12));
    CHECK(adjustment_c(3) == doctest::Approx(1.207392357589623).epsilon(1e-12));
    for (int n = 3; n < 100; ++n) CHECK(adjustment_c(n + 1) > adjustment_c(n));
}

TEST_CASE("default height limit") {
    CHECK(default_height_limit(256, 2) == 8);
    CHECK(default_height_limit(100, 2) == 7);
    CHECK(default_height_limit(27, 3) == 3);
    CHECK(default_height_limit(1, 2) == 1);
}

TEST_CASE("voronoi partition") {
    std::vector<std::vector<double>> pts = {{1, 0}, {0, 1}};
    auto parts = voronoi_partition(pts, pts, Metric::Tanimoto);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == std::vector<std::size_t>{0});
    CHECK(parts[1] == std::vector<std::size_t>{1});

    // tie goes to seed index 0
    std::vector<std::vector<double>> tie = {{1, 1}};
    auto tie_parts = voronoi_partition(tie, pts, Metric::Tanimoto);
    CHECK(tie_parts[0].size() == 1);
    CHECK(tie_parts[1].empty());

    // brute-force nearest-seed oracle on 5 random points
    Rng rng(17);
    std::vector<std::vector<double>> cloud(5, std::vector<double>(4));
    for (auto& row : cloud)
        for (auto& v : row) v = rng.next_double();
    std::vector<std::vector<double>> seeds = {cloud[1], cloud[3]};
    auto got = voronoi_partition(cloud, seeds, Metric::Euclidean);
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        for (std::size_t p : got[s]) {
            ++assigned;
            double mine = euclidean(cloud[p], seeds[s]);
            for (std::size_t o = 0; o < seeds.size(); ++o) {
                double other = euclidean(cloud[p], seeds[o]);
                CHECK(mine <= other);
                if (other == mine) CHECK(s <= o);  // tie-break
            }
        }
    }
    CHECK(assigned == cloud.size());
}

TEST_CASE("tree stop rules") {
    // single point: |P| < b at the root
    auto one = pm_from({{0.5, 0.5}});
    PifParams params;
    params.t = 1;
    params.psi = 2;
    params.metric = Metric::Euclidean;
    auto forest = build_forest(one, params);
    REQUIRE(forest.trees.size() == 1);
    CHECK(forest.trees[0].nodes.size() == 1);
    CHECK(forest.trees[0].nodes[0].external());
    CHECK(forest.trees[0].nodes[0].size == 1);

    // psi=256, b=2 -> leaf height at most 8
    Rng rng(3);
    std::vector<std::vector<double>> rows(400, std::vector<double>(3));
    for (auto& r : rows)
        for (auto& v : r) v = rng.next_double();
    auto prefs = pm_from(rows);
    PifParams big;
    big.t = 10;
    big.psi = 256;
    big.metric = Metric::Euclidean;
    big.rng_seed = 5;
    auto f = build_forest(prefs, big);
    CHECK(f.height_limit == 8);
    for (const auto& tree : f.trees) CHECK(tree_max_depth(tree, 0, 2, 0) <= 8);
}

TEST_CASE("4 well-separated points, limit 3: every leaf holds at most 2") {
    auto prefs = pm_from({{0, 0}, {10, 0}, {0, 10}, {10, 10}});
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        PifParams params;
        params.t = 1;
        params.psi = 4;
        params.height_limit = 3;
        params.metric = Metric::Euclidean;
        params.rng_seed = seed;
        auto forest = build_forest(prefs, params);
        std::vector<std::int32_t> leaves;
        collect_external(forest.trees[0], 0, 2, leaves);
        for (auto id : leaves) CHECK(forest.trees[0].nodes[std::size_t(id)].size <= 2);
    }
}

TEST_CASE("forest construction contract") {
    Rng rng(8);
    std::vector<std::vector<double>> rows(100, std::vector<double>(5));
    for (auto& r : rows)
        for (auto& v : r) v = rng.next_double();
    auto prefs = pm_from(rows);

    PifParams params;
    params.t = 100;
    params.psi = 256;
    params.metric = Metric::Euclidean;
    params.rng_seed = 21;
    auto forest = build_forest(prefs, params);
    CHECK(forest.trees.size() == 100);
    CHECK(forest.psi_effective == 100);  // capped at n
    for (const auto& tree : forest.trees) {
        CHECK(tree.nodes[0].size == 100);
        check_partition_completeness(tree, 0, params.b);
    }

    auto again = build_forest(prefs, params);
    REQUIRE(again.trees.size() == forest.trees.size());
    CHECK(again.seed_table.data == forest.seed_table.data);
    for (std::size_t i = 0; i < forest.trees.size(); ++i) {
        CHECK(again.trees[i].child_ids == forest.trees[i].child_ids);
        CHECK(again.trees[i].seed_slots == forest.trees[i].seed_slots);
        REQUIRE(again.trees[i].nodes.size() == forest.trees[i].nodes.size());
        for (std::size_t j = 0; j < forest.trees[i].nodes.size(); ++j) {
            CHECK(again.trees[i].nodes[j].size == forest.trees[i].nodes[j].size);
            CHECK(again.trees[i].nodes[j].children_begin ==
                  forest.trees[i].nodes[j].children_begin);
        }
    }
}

TEST_CASE("training points re-walk to leaves matching stored sizes") {
    for (Metric metric : {Metric::Tanimoto, Metric::Euclidean}) {
        Rng rng(55);
        std::vector<std::vector<double>> rows(64, std::vector<double>(6));
        for (auto& r : rows)
            for (auto& v : r) v = rng.next_double() < 0.4 ? 0.0 : rng.next_double();
        auto prefs = pm_from(rows);
        PifParams params;
        params.t = 1;
        params.psi = 64;
        params.metric = metric;
        params.rng_seed = 77;
        auto forest = build_forest(prefs, params);
        const auto& tree = forest.trees[0];

        std::vector<int> counts(tree.nodes.size(), 0);
        for (std::size_t i = 0; i < prefs.points(); ++i)
            counts[std::size_t(locate_leaf(forest, tree, prefs.row(i)))]++;
        for (std::size_t id = 0; id < tree.nodes.size(); ++id)
            if (tree.nodes[id].external()) CHECK(counts[id] == tree.nodes[id].size);
    }
}

TEST_CASE("path length on hand-built external nodes") {
    PiForest forest;
    forest.params.metric = Metric::Euclidean;
    forest.params.b = 2;
    forest.dim = 1;
    forest.psi_effective = 4;
    PiTree tree;
    tree.nodes.push_back({});  // external by default
    tree.nodes[0].size = 1;
    std::vector<double> p = {0.0};
    CHECK(path_length(p, tree, forest, 0) == 0.0);
    tree.nodes[0].size = 2;
    CHECK(path_length(p, tree, forest, 3) == 4.0);
    tree.nodes[0].size = 3;
    CHECK(path_length(p, tree, forest, 0) ==
          doctest::Approx(1.207392357589623).epsilon(1e-12));
}

TEST_CASE("score matches independent walk and formula on a small fixture") {
    auto prefs = pm_from({{0, 0}, {8, 0}, {0, 8}, {8, 8}});
    PifParams params;
    params.t = 1;
    params.psi = 4;
    params.metric = Metric::Euclidean;
    params.rng_seed = 13;
    auto forest = build_forest(prefs, params);

    auto scores = score_all(prefs, forest);
    for (std::size_t i = 0; i < prefs.points(); ++i) {
        double h = oracles::brute_path_length(forest, forest.trees[0], prefs.row(i));
        double expected = std::pow(2.0, -h / adjustment_c(forest.psi_effective));
        CHECK(scores[i] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(scores[i] > 0.0);
        CHECK(scores[i] <= 1.0);
    }
    CHECK(score(prefs.row(0), forest) == scores[0]);
    CHECK_THROWS_AS(score(std::vector<double>{1.0}, forest), DimensionMismatch);
}

TEST_CASE("tree oracle on random small datasets") {
    Rng meta(2024);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 4 + meta.next_below(9);  // 4..12
        std::vector<std::vector<double>> rows(n, std::vector<double>(5));
        for (auto& r : rows)
            for (auto& v : r) v = meta.next_double() < 0.3 ? 0.0 : meta.next_double();
        auto prefs = pm_from(rows);
        PifParams params;
        params.t = 1;
        params.psi = int(n);
        params.metric = Metric::Tanimoto;
        params.rng_seed = meta.next_u64();
        auto forest = build_forest(prefs, params);
        for (std::size_t i = 0; i < n; ++i) {
            double got = path_length(prefs.row(i), forest.trees[0], forest, 0);
            double want = oracles::brute_path_length(forest, forest.trees[0], prefs.row(i));
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("score is strictly decreasing in mean path length") {
    // two single-node trees with different external sizes give different
    // mean path lengths for the same query
    auto prefs = pm_from({{0, 0}, {1, 0}, {0, 1}, {4, 4}, {5, 4}, {4, 5}, {9, 9}, {0, 9}});
    PifParams params;
    params.t = 50;
    params.psi = 8;
    params.metric = Metric::Euclidean;
    params.rng_seed = 3;
    auto forest = build_forest(prefs, params);
    auto scores = score_all(prefs, forest);
    // recompute mean path lengths and check monotone relation pairwise
    std::vector<double> mean_h(prefs.points(), 0.0);
    for (std::size_t i = 0; i < prefs.points(); ++i) {
        for (const auto& tree : forest.trees)
            mean_h[i] += oracles::brute_path_length(forest, tree, prefs.row(i));
        mean_h[i] /= double(forest.trees.size());
    }
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (std::size_t j = 0; j < scores.size(); ++j)
            if (mean_h[i] < mean_h[j] - 1e-9) CHECK(scores[i] > scores[j]);
}

TEST_CASE("build cost grows quasi-linearly in the subsample size") {
    // Doubling psi at fixed t and b should raise build time by roughly
    // psi log psi, i.e. ~2.3x. Wall-clock on a shared box is noisy, so a
    // miss is only reported as a warning, with a loose hard bound.
    Rng rng(91);
    std::vector<std::vector<double>> rows(512, std::vector<double>(24));
    for (auto& r : rows)
        for (auto& v : r) v = rng.next_double() < 0.5 ? 0.0 : rng.next_double();
    auto prefs = pm_from(rows);

    auto timed_build = [&](int psi) {
        PifParams params;
        params.t = 30;
        params.psi = psi;
        params.rng_seed = 1;
        double best = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < 3; ++rep) {
            auto start = std::chrono::steady_clock::now();
            auto forest = build_forest(prefs, params);
            double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            best = std::min(best, secs);
            CHECK(forest.psi_effective == psi);
        }
        return best;
    };

    double t128 = timed_build(128);
    double t256 = timed_build(256);
    double ratio = t256 / t128;
    WARN_MESSAGE(ratio <= 2.3, "psi doubling cost ratio ", ratio, " above the ~2.3 model");
    CHECK(ratio < 6.0);  // hard bound: far from quadratic blow-up
}

TEST_CASE("parameter validation") {
    auto prefs = pm_from({{0, 0}, {1, 1}});
    PifParams bad;
    bad.t = 0;
    CHECK_THROWS_AS(build_forest(prefs, bad), ConfigError);
    bad = {};
    bad.b = 1;
    CHECK_THROWS_AS(build_forest(prefs, bad), ConfigError);
    bad = {};
    bad.psi = 1;
    bad.b = 2;
    CHECK_THROWS_AS(build_forest(prefs, bad), ConfigError);
}
