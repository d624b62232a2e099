// Compares the OpenMP kernels against their serial reference paths:
// same outputs, wall-clock side by side.
#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pif/datasets.hpp"
#include "pif/forest.hpp"
#include "pif/preference.hpp"

using namespace pif;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_ms(F&& f) {
    double t0 = now_ms();
    f();
    return now_ms() - t0;
}

bool same(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * 8) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::string name = argc > 1 ? argv[1] : "stair3";
    auto ds = generate(preset(name), 42);
    std::size_t m = 10 * ds.size();

    auto pool = sample_pool(ds.points, ds.family, m, 1);
    EmbeddingConfig cfg;
    cfg.sigma = ds.noise_sigma;

    PreferenceMatrix prefs_s, prefs_p;
    double t_embed_s = time_ms([&] { prefs_s = embed_serial(ds.points, pool, cfg); });
    double t_embed_p = time_ms([&] { prefs_p = embed(ds.points, pool, cfg); });

    PifParams params;
    params.rng_seed = 7;
    PiForest forest_s, forest_p;
    double t_build_s = time_ms([&] { forest_s = build_forest_serial(prefs_s, params); });
    double t_build_p = time_ms([&] { forest_p = build_forest(prefs_p, params); });

    std::vector<double> scores_s, scores_p;
    double t_score_s = time_ms([&] { scores_s = score_all_serial(prefs_s, forest_s); });
    double t_score_p = time_ms([&] { scores_p = score_all(prefs_p, forest_p); });

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("dataset %s: n=%zu m=%zu, %d thread(s)\n", name.c_str(), ds.size(), m, threads);
    std::printf("%-10s %12s %12s %10s %8s\n", "kernel", "serial (ms)", "openmp (ms)", "speedup",
                "match");
    std::printf("%-10s %12.1f %12.1f %9.2fx %8s\n", "embed", t_embed_s, t_embed_p,
                t_embed_s / t_embed_p, same(prefs_s.m.data, prefs_p.m.data) ? "yes" : "NO");
    std::printf("%-10s %12.1f %12.1f %9.2fx %8s\n", "build", t_build_s, t_build_p,
                t_build_s / t_build_p,
                same(forest_s.seed_table.data, forest_p.seed_table.data) ? "yes" : "NO");
    std::printf("%-10s %12.1f %12.1f %9.2fx %8s\n", "score", t_score_s, t_score_p,
                t_score_s / t_score_p, same(scores_s, scores_p) ? "yes" : "NO");

    bool ok = same(prefs_s.m.data, prefs_p.m.data) &&
              same(forest_s.seed_table.data, forest_p.seed_table.data) &&
              same(scores_s, scores_p);
    return ok ? 0 : 1;
}
