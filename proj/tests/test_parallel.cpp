#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pif/datasets.hpp"
#include "pif/forest.hpp"
#include "pif/preference.hpp"

using namespace pif;

namespace {

struct Fixture {
    LabeledDataset ds;
    std::vector<ModelInstance> pool;
    EmbeddingConfig ecfg;

    Fixture() {
        ds = generate(preset("circle4"), 17);
        ecfg.sigma = ds.noise_sigma;
        ecfg.rng_seed = 23;
        pool = sample_pool(ds.points, ds.family, 4 * ds.size(), ecfg.rng_seed);
    }
};

bool forests_identical(const PiForest& a, const PiForest& b) {
    if (a.seed_table.data != b.seed_table.data) return false;
    if (a.trees.size() != b.trees.size()) return false;
    for (std::size_t i = 0; i < a.trees.size(); ++i) {
        if (a.trees[i].child_ids != b.trees[i].child_ids) return false;
        if (a.trees[i].seed_slots != b.trees[i].seed_slots) return false;
        if (a.trees[i].nodes.size() != b.trees[i].nodes.size()) return false;
        for (std::size_t j = 0; j < a.trees[i].nodes.size(); ++j) {
            const auto& x = a.trees[i].nodes[j];
            const auto& y = b.trees[i].nodes[j];
            if (x.children_begin != y.children_begin || x.seeds_begin != y.seeds_begin ||
                x.size != y.size)
                return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("parallel kernels match their serial references bit for bit") {
    Fixture f;

    auto prefs_par = embed(f.ds.points, f.pool, f.ecfg);
    auto prefs_ser = embed_serial(f.ds.points, f.pool, f.ecfg);
    CHECK(prefs_par.m.data == prefs_ser.m.data);
    CHECK(prefs_par.binary == prefs_ser.binary);

    PifParams params;
    params.t = 30;
    params.psi = 128;
    params.rng_seed = 31;
    auto forest_par = build_forest(prefs_par, params);
    auto forest_ser = build_forest_serial(prefs_par, params);
    CHECK(forests_identical(forest_par, forest_ser));

    auto scores_par = score_all(prefs_par, forest_par);
    auto scores_ser = score_all_serial(prefs_par, forest_par);
    CHECK(scores_par == scores_ser);
}

TEST_CASE("results do not depend on the thread count") {
#ifdef _OPENMP
    Fixture f;
    PifParams params;
    params.t = 20;
    params.psi = 64;
    params.rng_seed = 31;

    omp_set_num_threads(1);
    auto prefs1 = embed(f.ds.points, f.pool, f.ecfg);
    auto forest1 = build_forest(prefs1, params);
    auto scores1 = score_all(prefs1, forest1);

    omp_set_num_threads(8);
    auto prefs8 = embed(f.ds.points, f.pool, f.ecfg);
    auto forest8 = build_forest(prefs8, params);
    auto scores8 = score_all(prefs8, forest8);

    omp_set_num_threads(omp_get_num_procs());

    CHECK(prefs1.m.data == prefs8.m.data);
    CHECK(forests_identical(forest1, forest8));
    CHECK(scores1 == scores8);
#else
    MESSAGE("built without OpenMP; thread-count invariance is trivial");
#endif
}

TEST_CASE("binarized embedding matches between serial and parallel paths") {
    Fixture f;
    f.ecfg.binarize = true;
    auto par = embed(f.ds.points, f.pool, f.ecfg);
    auto ser = embed_serial(f.ds.points, f.pool, f.ecfg);
    CHECK(par.binary);
    CHECK(par.m.data == ser.m.data);
}
