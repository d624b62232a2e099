#ifndef PIF_GEOMETRY_HPP
#define PIF_GEOMETRY_HPP

#include <span>
#include <vector>

#include "pif/common.hpp"

namespace pif {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

enum class ModelKind { Line, Circle };

inline std::size_t minimal_sample_size(ModelKind kind) {
    return kind == ModelKind::Line ? 2 : 3;
}

// Line: ax + by + c = 0 with a^2 + b^2 = 1 (Hessian normal form),
// params = {a, b, c}. Circle: params = {cx, cy, r}, r > 0.
struct ModelInstance {
    ModelKind kind = ModelKind::Line;
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
};

// Fits a model exactly through a minimal sample (2 points for Line,
// 3 for Circle). Throws DegenerateSample on coincident/collinear input.
ModelInstance fit_minimal(ModelKind kind, std::span<const Point2> sample);

// Orthogonal distance for Line, |dist-to-center - r| for Circle.
double residual(const ModelInstance& model, Point2 p);

}  // namespace pif

#endif
