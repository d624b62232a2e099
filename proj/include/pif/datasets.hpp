#ifndef PIF_DATASETS_HPP
#define PIF_DATASETS_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pif/common.hpp"
#include "pif/geometry.hpp"

namespace pif {

struct Segment {
    Point2 a, b;
};

struct CircleShape {
    Point2 center;
    double radius = 1.0;
};

using Shape = std::variant<Segment, CircleShape>;

struct StructureSpec {
    Shape shape;
    int count = 0;
};

struct DatasetSpec {
    std::string name;
    std::vector<StructureSpec> structures;
    int anomaly_count = 0;
    double noise_sigma = 0.01;
    ModelKind family = ModelKind::Line;
};

// label: -1 for anomaly, structure index 0..k-1 for normal points.
struct LabeledDataset {
    std::string name;
    std::vector<Point2> points;
    std::vector<int> labels;
    double noise_sigma = 0.01;
    ModelKind family = ModelKind::Line;

    std::size_t size() const { return points.size(); }
    std::size_t anomalies() const;
};

// Named presets: stair3, stair4, star5, star11, circle3, circle4,
// circle5 (cardinalities 272+64+64/400, 4x50/200, 5x50/250, 11x50/550,
// 376+62+62/500, 4x50/200, 5x50/250), plus concentric2 (two concentric
// circles, 100 points each, 100 anomalies).
DatasetSpec preset(const std::string& name);
std::vector<std::string> preset_names();

// Per structure: points uniform along the shape plus isotropic Gaussian
// noise. Anomalies uniform in the bounding box of normal points,
// re-sampled up to 50 times when within 3 sigma of any structure.
LabeledDataset generate(const DatasetSpec& spec, std::uint64_t rng_seed);

// Distance from a point to the noiseless shape.
double shape_distance(const Shape& shape, Point2 p);

// |X| = 1000 with ratio*1000 anomalies; normal points split over the
// base preset's structures with proportions preserved.
LabeledDataset contamination_sweep(const std::string& base, double ratio,
                                   std::uint64_t rng_seed);

}  // namespace pif

#endif
