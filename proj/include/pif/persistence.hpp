#ifndef PIF_PERSISTENCE_HPP
#define PIF_PERSISTENCE_HPP

#include <string>
#include <variant>
#include <vector>

#include "pif/baselines.hpp"
#include "pif/forest.hpp"
#include "pif/geometry.hpp"
#include "pif/preference.hpp"

namespace pif {

// A trained PI-Forest together with the model pool and embedding
// parameters it was trained with, so unseen ambient points can be
// re-embedded against the same pool and scored.
struct PifModel {
    PiForest forest;
    std::vector<ModelInstance> pool;  // empty when trained on a precomputed matrix
    EmbeddingConfig embed_cfg;
    ModelKind family = ModelKind::Line;

    std::vector<double> score_points(std::span<const Point2> points) const;
    std::vector<double> score_matrix(const Matrix& data) const;
};

struct IForModel {
    IsoForest forest;

    std::vector<double> score_matrix(const Matrix& data) const;
};

// LOF has no compact fitted state; the artifact is the training set.
struct LofModel {
    LofParams params;
    Matrix train;

    std::vector<double> score_train() const;
};

using ModelArtifact = std::variant<PifModel, IForModel, LofModel>;

// Container: magic "PIF1", u32 version, u32 method id, length-prefixed
// payload, trailing FNV-1a checksum. See docs/format.md.
void save_model(const ModelArtifact& model, const std::string& path);
ModelArtifact load_model(const std::string& path);

inline constexpr std::uint32_t kFormatVersion = 1;

}  // namespace pif

#endif
