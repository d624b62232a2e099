#include "pif/geometry.hpp"

#include <cmath>

namespace pif {

namespace {

double bounding_scale(std::span<const Point2> pts) {
    double s = 1.0;
    for (const auto& p : pts) {
        s = std::max(s, std::abs(p.x));
        s = std::max(s, std::abs(p.y));
    }
    return s;
}

ModelInstance fit_line(std::span<const Point2> s) {
    double dx = s[1].x - s[0].x;
    double dy = s[1].y - s[0].y;
    double len = std::hypot(dx, dy);
    if (len < 1e-12 * bounding_scale(s))
        throw DegenerateSample("line sample: coincident points");
    double a = -dy / len;
    double b = dx / len;
    double c = -(a * s[0].x + b * s[0].y);
    return {ModelKind::Line, a, b, c};
}

ModelInstance fit_circle(std::span<const Point2> s) {
    // Circumcenter from the perpendicular-bisector linear system:
    //   2(x2-x1) cx + 2(y2-y1) cy = x2^2+y2^2 - x1^2-y1^2
    //   2(x3-x1) cx + 2(y3-y1) cy = x3^2+y3^2 - x1^2-y1^2
    double ax = 2.0 * (s[1].x - s[0].x), ay = 2.0 * (s[1].y - s[0].y);
    double bx = 2.0 * (s[2].x - s[0].x), by = 2.0 * (s[2].y - s[0].y);
    double det = ax * by - ay * bx;
    double scale = bounding_scale(s);
    if (std::abs(det) < 1e-12 * scale * scale)
        throw DegenerateSample("circle sample: collinear points");
    double r1 = s[1].x * s[1].x + s[1].y * s[1].y - s[0].x * s[0].x - s[0].y * s[0].y;
    double r2 = s[2].x * s[2].x + s[2].y * s[2].y - s[0].x * s[0].x - s[0].y * s[0].y;
    double cx = (r1 * by - r2 * ay) / det;
    double cy = (ax * r2 - bx * r1) / det;
    double r = std::hypot(s[0].x - cx, s[0].y - cy);
    if (!(r > 0.0) || !std::isfinite(r))
        throw DegenerateSample("circle sample: zero or invalid radius");
    return {ModelKind::Circle, cx, cy, r};
}

}  // namespace

ModelInstance fit_minimal(ModelKind kind, std::span<const Point2> sample) {
    if (sample.size() != minimal_sample_size(kind))
        throw DegenerateSample("minimal sample has wrong size");
    return kind == ModelKind::Line ? fit_line(sample) : fit_circle(sample);
}

double residual(const ModelInstance& m, Point2 p) {
    if (m.kind == ModelKind::Line)
        return std::abs(m.p0 * p.x + m.p1 * p.y + m.p2);
    return std::abs(std::hypot(p.x - m.p0, p.y - m.p1) - m.p2);
}

}  // namespace pif
