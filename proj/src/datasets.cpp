#include "pif/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pif {

std::size_t LabeledDataset::anomalies() const {
    std::size_t a = 0;
    for (int l : labels) a += (l < 0);
    return a;
}

namespace {

Segment seg(double ax, double ay, double bx, double by) {
    return Segment{{ax, ay}, {bx, by}};
}

// All presets share one scene scale; the noise sigma is per preset. The
// absolute sigma matters because phi(delta) = exp(-delta^2 / sigma) is
// not scale-invariant: with sigma well below 1 the kernel is nearly flat
// over the [0, 3*sigma] acceptance band and continuous preferences
// collapse onto the binary embedding, while sigma around 0.15-0.3 keeps
// them graded. Each preset uses the noise level (relative to its
// structure size) at which those gradations are informative rather than
// drowning the structures.
constexpr double kSceneScale = 15.0;
constexpr double kNoiseLow = 0.01 * kSceneScale;
constexpr double kNoiseHigh = 0.02 * kSceneScale;

// Alternating horizontal/vertical segments starting at the origin. The
// step length is large relative to the noise scale so that chance
// preferences for unrelated pool models stay rare; with short steps
// those accidental agreements dominate the embedding.
std::vector<Shape> stair_shapes(int k) {
    constexpr double kStep = 4.0;
    std::vector<Shape> shapes;
    Point2 cur{0.0, 0.0};
    for (int i = 0; i < k; ++i) {
        Point2 next = cur;
        if (i % 2 == 0)
            next.x += kStep;
        else
            next.y += kStep;
        shapes.push_back(Segment{cur, next});
        cur = next;
    }
    return shapes;
}

// k segments through the origin at angles i*pi/k, length 2.
std::vector<Shape> star_shapes(int k) {
    std::vector<Shape> shapes;
    for (int i = 0; i < k; ++i) {
        double a = double(i) * std::numbers::pi / double(k);
        double dx = std::cos(a), dy = std::sin(a);
        shapes.push_back(seg(-dx, -dy, dx, dy));
    }
    return shapes;
}

Shape scale_shape(const Shape& shape, double s) {
    if (const auto* sg = std::get_if<Segment>(&shape))
        return Segment{{sg->a.x * s, sg->a.y * s}, {sg->b.x * s, sg->b.y * s}};
    const auto& c = std::get<CircleShape>(shape);
    return CircleShape{{c.center.x * s, c.center.y * s}, c.radius * s};
}

DatasetSpec make(const std::string& name, std::vector<Shape> shapes,
                 std::vector<int> counts, int anomalies, ModelKind family,
                 double noise_sigma) {
    DatasetSpec spec;
    spec.name = name;
    spec.family = family;
    spec.anomaly_count = anomalies;
    spec.noise_sigma = noise_sigma;
    for (std::size_t i = 0; i < shapes.size(); ++i)
        spec.structures.push_back({scale_shape(shapes[i], kSceneScale), counts[i]});
    return spec;
}

}  // namespace

DatasetSpec preset(const std::string& name) {
    if (name == "stair3")
        return make(name, stair_shapes(3), {272, 64, 64}, 400, ModelKind::Line,
                    kNoiseLow);
    if (name == "stair4")
        return make(name, stair_shapes(4), {50, 50, 50, 50}, 200, ModelKind::Line,
                    kNoiseLow);
    if (name == "star5")
        return make(name, star_shapes(5), std::vector<int>(5, 50), 250, ModelKind::Line,
                    kNoiseHigh);
    if (name == "star11")
        return make(name, star_shapes(11), std::vector<int>(11, 50), 550,
                    ModelKind::Line, kNoiseLow);
    if (name == "circle3")
        return make(name,
                    {CircleShape{{0.0, 0.0}, 1.5}, CircleShape{{2.0, 0.0}, 0.8},
                     CircleShape{{0.0, 2.0}, 0.6}},
                    {376, 62, 62}, 500, ModelKind::Circle, kNoiseLow);
    if (name == "circle4")
        return make(name,
                    {CircleShape{{0.0, 0.0}, 1.2}, CircleShape{{2.0, 0.0}, 0.7},
                     CircleShape{{0.0, 2.0}, 0.9}, CircleShape{{2.0, 2.0}, 1.4}},
                    std::vector<int>(4, 50), 200, ModelKind::Circle, kNoiseHigh);
    if (name == "circle5")
        return make(name,
                    {CircleShape{{0.0, 0.0}, 1.2}, CircleShape{{2.0, 0.0}, 0.7},
                     CircleShape{{0.0, 2.0}, 0.9}, CircleShape{{2.0, 2.0}, 1.4},
                     CircleShape{{1.0, 1.0}, 0.5}},
                    std::vector<int>(5, 50), 250, ModelKind::Circle, kNoiseHigh);
    if (name == "concentric2")
        return make(name, {CircleShape{{0.0, 0.0}, 1.0}, CircleShape{{0.0, 0.0}, 2.0}},
                    {100, 100}, 100, ModelKind::Circle, kNoiseHigh);
    throw ConfigError("unknown dataset preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"stair3", "stair4", "star5", "star11", "circle3", "circle4", "circle5",
            "concentric2"};
}

double shape_distance(const Shape& shape, Point2 p) {
    if (std::holds_alternative<Segment>(shape)) {
        const auto& s = std::get<Segment>(shape);
        double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
        double len2 = dx * dx + dy * dy;
        double t = len2 == 0.0 ? 0.0
                               : ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
        t = std::clamp(t, 0.0, 1.0);
        return std::hypot(p.x - (s.a.x + t * dx), p.y - (s.a.y + t * dy));
    }
    const auto& c = std::get<CircleShape>(shape);
    return std::abs(std::hypot(p.x - c.center.x, p.y - c.center.y) - c.radius);
}

namespace {

Point2 sample_on_shape(const Shape& shape, Rng& rng) {
    if (std::holds_alternative<Segment>(shape)) {
        const auto& s = std::get<Segment>(shape);
        double t = rng.next_double();
        return {s.a.x + t * (s.b.x - s.a.x), s.a.y + t * (s.b.y - s.a.y)};
    }
    const auto& c = std::get<CircleShape>(shape);
    double a = 2.0 * std::numbers::pi * rng.next_double();
    return {c.center.x + c.radius * std::cos(a), c.center.y + c.radius * std::sin(a)};
}

}  // namespace

LabeledDataset generate(const DatasetSpec& spec, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    LabeledDataset ds;
    ds.name = spec.name;
    ds.noise_sigma = spec.noise_sigma;
    ds.family = spec.family;

    for (std::size_t si = 0; si < spec.structures.size(); ++si) {
        const auto& st = spec.structures[si];
        for (int i = 0; i < st.count; ++i) {
            Point2 p = sample_on_shape(st.shape, rng);
            p.x += spec.noise_sigma * rng.next_normal();
            p.y += spec.noise_sigma * rng.next_normal();
            ds.points.push_back(p);
            ds.labels.push_back(int(si));
        }
    }

    double lox = 0.0, hix = 0.0, loy = 0.0, hiy = 0.0;
    if (!ds.points.empty()) {
        lox = hix = ds.points[0].x;
        loy = hiy = ds.points[0].y;
        for (const auto& p : ds.points) {
            lox = std::min(lox, p.x);
            hix = std::max(hix, p.x);
            loy = std::min(loy, p.y);
            hiy = std::max(hiy, p.y);
        }
    }

    const double reject_radius = 3.0 * spec.noise_sigma;
    for (int i = 0; i < spec.anomaly_count; ++i) {
        Point2 p{};
        for (int attempt = 0; attempt < 50; ++attempt) {
            p = {lox + rng.next_double() * (hix - lox), loy + rng.next_double() * (hiy - loy)};
            double d = std::numeric_limits<double>::infinity();
            for (const auto& st : spec.structures)
                d = std::min(d, shape_distance(st.shape, p));
            if (d >= reject_radius) break;
        }
        ds.points.push_back(p);
        ds.labels.push_back(-1);
    }
    return ds;
}

LabeledDataset contamination_sweep(const std::string& base, double ratio,
                                   std::uint64_t rng_seed) {
    static const double kRatios[] = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    bool ok = false;
    for (double r : kRatios) ok = ok || std::abs(r - ratio) < 1e-12;
    if (!ok) throw InvalidRatio("contamination_sweep: ratio not in the supported set");
    if (base != "stair3" && base != "circle5")
        throw ConfigError("contamination_sweep: base must be stair3 or circle5");

    DatasetSpec spec = preset(base);
    const int total = 1000;
    const int anomalies = int(std::lround(ratio * total));
    const int normals = total - anomalies;

    int base_total = 0;
    for (const auto& st : spec.structures) base_total += st.count;

    // Largest-remainder apportionment of the normal count.
    std::vector<double> exact(spec.structures.size());
    std::vector<int> counts(spec.structures.size());
    int assigned = 0;
    for (std::size_t i = 0; i < spec.structures.size(); ++i) {
        exact[i] = double(normals) * double(spec.structures[i].count) / double(base_total);
        counts[i] = int(std::floor(exact[i]));
        assigned += counts[i];
    }
    std::vector<std::size_t> order(spec.structures.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
    });
    for (std::size_t i = 0; assigned < normals; ++i, ++assigned) counts[order[i]]++;

    for (std::size_t i = 0; i < spec.structures.size(); ++i)
        spec.structures[i].count = counts[i];
    spec.anomaly_count = anomalies;
    spec.name = base + "-sweep";
    return generate(spec, rng_seed);
}

}  // namespace pif
