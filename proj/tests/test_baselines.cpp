#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pif/baselines.hpp"
#include "pif/datasets.hpp"
#include "pif/preference.hpp"

using namespace pif;

namespace {

Matrix matrix_from(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[0].size(); ++j) m.at(i, j) = rows[i][j];
    return m;
}

int iso_max_depth(const IsoTree& tree, std::int32_t id, int depth) {
    const auto& node = tree.nodes[std::size_t(id)];
    if (node.external()) return depth;
    return std::max(iso_max_depth(tree, node.left, depth + 1),
                    iso_max_depth(tree, node.right, depth + 1));
}

}  // namespace

TEST_CASE("isolation forest flags an obvious outlier") {
    // tight cluster near the origin plus one far point
    Rng rng(42);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 60; ++i)
        rows.push_back({rng.next_normal() * 0.05, rng.next_normal() * 0.05});
    rows.push_back({50.0, 50.0});
    auto data = matrix_from(rows);

    IForParams params;
    params.t = 100;
    params.psi = 32;
    params.rng_seed = 7;
    auto scores = ifor_fit_score(data, params);
    std::size_t top = std::size_t(std::max_element(scores.begin(), scores.end()) -
                                  scores.begin());
    CHECK(top == rows.size() - 1);
    CHECK(scores[top] > 0.6);
    for (double s : scores) {
        CHECK(s > 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("isolation forest handles constant attributes") {
    // second attribute constant everywhere: splits must use the first
    auto data = matrix_from({{0.0, 5.0}, {1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}});
    IForParams params;
    params.t = 20;
    params.psi = 4;
    params.rng_seed = 1;
    auto forest = ifor_fit(data, params);
    for (const auto& tree : forest.trees)
        for (const auto& node : tree.nodes)
            if (!node.external()) CHECK(node.attr == 0);

    // all attributes constant: the root stays a leaf of full size
    auto flat = matrix_from({{2.0, 2.0}, {2.0, 2.0}, {2.0, 2.0}});
    auto f2 = ifor_fit(flat, params);
    for (const auto& tree : f2.trees) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].external());
        CHECK(tree.nodes[0].size == 3);
    }
    // identical rows get identical (high-mass) scores
    auto s2 = ifor_score(f2, flat);
    CHECK(s2[0] == s2[1]);
    CHECK(s2[1] == s2[2]);
}

TEST_CASE("isolation forest split values lie inside the node range") {
    Rng rng(9);
    std::vector<std::vector<double>> rows(50, std::vector<double>(3));
    for (auto& r : rows)
        for (auto& v : r) v = rng.next_double() * 10.0;
    auto data = matrix_from(rows);
    IForParams params;
    params.t = 30;
    params.psi = 50;
    params.rng_seed = 4;
    auto forest = ifor_fit(data, params);
    CHECK(forest.height_limit == 6);  // ceil(log2 50)
    double lo = *std::min_element(data.data.begin(), data.data.end());
    double hi = *std::max_element(data.data.begin(), data.data.end());
    for (const auto& tree : forest.trees) {
        CHECK(iso_max_depth(tree, 0, 0) <= forest.height_limit);
        for (const auto& node : tree.nodes) {
            if (node.external()) continue;
            CHECK(node.split > lo);
            CHECK(node.split < hi);
            CHECK(node.attr >= 0);
            CHECK(node.attr < 3);
        }
    }
}

TEST_CASE("isolation forest is deterministic in its seed") {
    Rng rng(10);
    std::vector<std::vector<double>> rows(40, std::vector<double>(4));
    for (auto& r : rows)
        for (auto& v : r) v = rng.next_double();
    auto data = matrix_from(rows);
    IForParams params;
    params.t = 25;
    params.psi = 16;
    params.rng_seed = 99;
    auto a = ifor_fit_score(data, params);
    auto b = ifor_fit_score(data, params);
    CHECK(a == b);
    params.rng_seed = 100;
    auto c = ifor_fit_score(data, params);
    CHECK(a != c);
}

TEST_CASE("LOF is about 1 on a uniform grid") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) rows.push_back({double(i), double(j)});
    auto data = matrix_from(rows);
    LofParams params;
    params.k = 8;
    auto lof = lof_score(data, params);
    // interior points of a regular grid have density equal to their
    // neighbors'; boundary effects stay small
    for (int i = 5; i < 15; ++i)
        for (int j = 5; j < 15; ++j)
            CHECK(lof[std::size_t(i * 20 + j)] == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("LOF flags the isolated point in a 6-point fixture") {
    auto data = matrix_from(
        {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0.5, 0.5}, {10, 10}});
    LofParams params;
    params.k = 3;
    auto lof = lof_score(data, params);
    for (std::size_t i = 0; i < 5; ++i) CHECK(lof[i] < 2.0);
    CHECK(lof[5] > 2.0);
}

TEST_CASE("LOF handles duplicate points (infinite local density)") {
    auto data = matrix_from({{0, 0}, {0, 0}, {0, 0}, {0, 0}, {5, 5}});
    LofParams params;
    params.k = 3;
    auto lof = lof_score(data, params);
    // duplicates compare inf/inf -> 1 per the convention
    for (std::size_t i = 0; i < 4; ++i) CHECK(lof[i] == doctest::Approx(1.0));
    CHECK(lof[4] > 1.0);
}

TEST_CASE("LOF rejects k out of range") {
    auto data = matrix_from({{0, 0}, {1, 1}, {2, 2}});
    LofParams params;
    params.k = 3;  // only n - 1 = 2 possible neighbors
    CHECK_THROWS_AS(lof_score(data, params), KTooLarge);
    params.k = 0;
    CHECK_THROWS_AS(lof_score(data, params), KTooLarge);
}

TEST_CASE("LOF matches a textbook reference implementation") {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 10 + rng.next_below(21);  // 10..30
        std::vector<std::vector<double>> rows(n, std::vector<double>(3));
        for (auto& r : rows)
            for (auto& v : r) v = rng.next_double() * 4.0;
        // inject one duplicate pair to exercise tie handling
        rows[1] = rows[0];
        auto data = matrix_from(rows);
        auto dist = pairwise_distances(data, Metric::Euclidean);
        for (int k : {2, 5, int(n) - 1}) {
            auto got = lof_score_from_distances(dist, k);
            auto want = oracles::brute_lof(dist, k);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < n; ++i)
                CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("pairwise distance matrix is symmetric with zero diagonal") {
    Rng rng(5);
    std::vector<std::vector<double>> rows(15, std::vector<double>(6));
    for (auto& r : rows)
        for (auto& v : r) v = rng.next_double() < 0.4 ? 0.0 : rng.next_double();
    auto data = matrix_from(rows);
    for (Metric metric : {Metric::Euclidean, Metric::Tanimoto}) {
        auto dist = pairwise_distances(data, metric);
        REQUIRE(dist.rows == 15);
        REQUIRE(dist.cols == 15);
        for (std::size_t i = 0; i < 15; ++i) {
            CHECK(dist.at(i, i) == 0.0);
            for (std::size_t j = 0; j < 15; ++j) {
                CHECK(dist.at(i, j) == dist.at(j, i));
                double direct = metric == Metric::Euclidean
                                    ? euclidean(data.row(i), data.row(j))
                                    : tanimoto(data.row(i), data.row(j));
                CHECK(dist.at(i, j) == direct);
            }
        }
    }
}

TEST_CASE("preference-space forest beats ambient isolation forest on concentric circles") {
    // two concentric circles; the inner one sits inside the outer's hull,
    // which defeats axis-aligned splits but not preference isolation
    auto ds = generate(preset("concentric2"), 123);
    std::vector<int> binary_labels(ds.labels.size());
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        binary_labels[i] = ds.labels[i] < 0 ? 1 : 0;

    EmbeddingConfig ecfg;
    ecfg.sigma = ds.noise_sigma;
    ecfg.rng_seed = 5;
    auto pool = sample_pool(ds.points, ds.family, 10 * ds.size(), ecfg.rng_seed);
    auto prefs = embed(ds.points, pool, ecfg);

    PifParams pcfg;
    pcfg.t = 100;
    pcfg.psi = 256;
    pcfg.rng_seed = 11;
    auto forest = build_forest(prefs, pcfg);
    auto pif_scores = score_all(prefs, forest);

    Matrix ambient(ds.size(), 2);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        ambient.at(i, 0) = ds.points[i].x;
        ambient.at(i, 1) = ds.points[i].y;
    }
    IForParams icfg;
    icfg.rng_seed = 11;
    auto ifor_scores = ifor_fit_score(ambient, icfg);

    double pif_auc = oracles::brute_auc(pif_scores, binary_labels);
    double ifor_auc = oracles::brute_auc(ifor_scores, binary_labels);
    CHECK(pif_auc > 0.9);
    CHECK(pif_auc > ifor_auc);
}
