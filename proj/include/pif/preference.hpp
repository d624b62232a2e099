#ifndef PIF_PREFERENCE_HPP
#define PIF_PREFERENCE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pif/common.hpp"
#include "pif/geometry.hpp"

namespace pif {

// Exponent convention of the preference function phi(d) = exp(-d^2 / s):
// Sigma divides by sigma, SigmaSquared by sigma^2.
enum class PhiExponent { Sigma, SigmaSquared };

struct EmbeddingConfig {
    double sigma = 0.01;
    double pool_multiplier = 10.0;
    bool binarize = false;
    PhiExponent phi_exponent = PhiExponent::Sigma;
    std::uint64_t rng_seed = 0;
};

struct PreferenceMatrix {
    Matrix m;
    bool binary = false;

    std::size_t points() const { return m.rows; }
    std::size_t pool_size() const { return m.cols; }
    std::span<const double> row(std::size_t i) const { return m.row(i); }
};

// Draws m model instances RanSaC-style: each from a minimal sample of
// distinct points chosen uniformly. Degenerate draws are retried up to
// 100 times per slot, then PoolExhausted is thrown.
std::vector<ModelInstance> sample_pool(std::span<const Point2> points, ModelKind family,
                                       std::size_t m, std::uint64_t rng_seed);

// Preference component: phi(delta) if delta <= 3 sigma, else 0;
// binarized variant maps the same cutoff to {0,1}.
PreferenceMatrix embed(std::span<const Point2> points, std::span<const ModelInstance> pool,
                       const EmbeddingConfig& cfg);
PreferenceMatrix embed_serial(std::span<const Point2> points, std::span<const ModelInstance> pool,
                              const EmbeddingConfig& cfg);

// Tanimoto distance 1 - <p,q> / (|p|^2 + |q|^2 - <p,q>); 0 when both
// vectors are all-zero.
double tanimoto(std::span<const double> p, std::span<const double> q);

// Jaccard distance on {0,1} vectors; on binary input equals tanimoto.
double jaccard(std::span<const double> p, std::span<const double> q);

double euclidean(std::span<const double> p, std::span<const double> q);

// Sparse view of a preference vector; distances computed over the
// nonzero support are bit-identical to the dense evaluation.
struct SparseVec {
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    double norm2 = 0.0;

    static SparseVec from(std::span<const double> dense);
};

double tanimoto(const SparseVec& p, const SparseVec& q);

}  // namespace pif

#endif
