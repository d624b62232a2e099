#include "pif/preference.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pif {

std::vector<ModelInstance> sample_pool(std::span<const Point2> points, ModelKind family,
                                       std::size_t m, std::uint64_t rng_seed) {
    const std::size_t mss = minimal_sample_size(family);
    if (points.size() < mss)
        throw ConfigError("sample_pool: fewer points than the minimal sample size");
    std::vector<ModelInstance> pool;
    pool.reserve(m);
    Rng rng(rng_seed);
    std::vector<Point2> sample(mss);
    for (std::size_t slot = 0; slot < m; ++slot) {
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            auto idx = rng.sample_indices(points.size(), mss);
            for (std::size_t i = 0; i < mss; ++i) sample[i] = points[idx[i]];
            try {
                pool.push_back(fit_minimal(family, sample));
                ok = true;
            } catch (const DegenerateSample&) {
            }
        }
        if (!ok)
            throw PoolExhausted("sample_pool: 100 degenerate draws for pool slot " +
                                std::to_string(slot));
    }
    return pool;
}

namespace {

void embed_row(std::span<const Point2> points, std::span<const ModelInstance> pool,
               const EmbeddingConfig& cfg, PreferenceMatrix& out, std::size_t i) {
    const double cutoff = 3.0 * cfg.sigma;
    const double denom =
        cfg.phi_exponent == PhiExponent::Sigma ? cfg.sigma : cfg.sigma * cfg.sigma;
    auto row = out.m.row(i);
    for (std::size_t j = 0; j < pool.size(); ++j) {
        double d = residual(pool[j], points[i]);
        if (d <= cutoff)
            row[j] = cfg.binarize ? 1.0 : std::exp(-(d * d) / denom);
        else
            row[j] = 0.0;
    }
}

}  // namespace

PreferenceMatrix embed_serial(std::span<const Point2> points, std::span<const ModelInstance> pool,
                              const EmbeddingConfig& cfg) {
    if (pool.empty()) throw ConfigError("embed: empty model pool");
    if (!(cfg.sigma > 0.0)) throw ConfigError("embed: sigma must be positive");
    PreferenceMatrix out;
    out.m = Matrix(points.size(), pool.size());
    out.binary = cfg.binarize;
    for (std::size_t i = 0; i < points.size(); ++i) embed_row(points, pool, cfg, out, i);
    return out;
}

PreferenceMatrix embed(std::span<const Point2> points, std::span<const ModelInstance> pool,
                       const EmbeddingConfig& cfg) {
    if (pool.empty()) throw ConfigError("embed: empty model pool");
    if (!(cfg.sigma > 0.0)) throw ConfigError("embed: sigma must be positive");
    PreferenceMatrix out;
    out.m = Matrix(points.size(), pool.size());
    out.binary = cfg.binarize;
    const std::int64_t n = std::int64_t(points.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) embed_row(points, pool, cfg, out, std::size_t(i));
    return out;
}

double tanimoto(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionMismatch("tanimoto: dimension mismatch");
    double dot = 0.0, np = 0.0, nq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        dot += p[i] * q[i];
        np += p[i] * p[i];
        nq += q[i] * q[i];
    }
    double denom = np + nq - dot;
    if (denom == 0.0) return 0.0;  // both all-zero
    return 1.0 - dot / denom;
}

double jaccard(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionMismatch("jaccard: dimension mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        bool a = p[i] != 0.0, b = q[i] != 0.0;
        if ((p[i] != 0.0 && p[i] != 1.0) || (q[i] != 0.0 && q[i] != 1.0))
            throw NonBinaryInput("jaccard: components must be 0 or 1");
        inter += a && b;
        uni += a || b;
    }
    if (uni == 0) return 0.0;
    return 1.0 - double(inter) / double(uni);
}

double euclidean(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionMismatch("euclidean: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = p[i] - q[i];
        s += d * d;
    }
    return std::sqrt(s);
}

SparseVec SparseVec::from(std::span<const double> dense) {
    SparseVec v;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0.0) {
            v.idx.push_back(std::uint32_t(i));
            v.val.push_back(dense[i]);
            v.norm2 += dense[i] * dense[i];
        }
    }
    return v;
}

double tanimoto(const SparseVec& p, const SparseVec& q) {
    double dot = 0.0;
    std::size_t i = 0, j = 0;
    while (i < p.idx.size() && j < q.idx.size()) {
        if (p.idx[i] < q.idx[j])
            ++i;
        else if (p.idx[i] > q.idx[j])
            ++j;
        else {
            dot += p.val[i] * q.val[j];
            ++i;
            ++j;
        }
    }
    double denom = p.norm2 + q.norm2 - dot;
    if (denom == 0.0) return 0.0;
    return 1.0 - dot / denom;
}

}  // namespace pif
