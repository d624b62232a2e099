#include "pif/persistence.hpp"

#include <cstring>
#include <fstream>

namespace pif {

namespace {

constexpr char kMagic[4] = {'P', 'I', 'F', '1'};
constexpr std::uint32_t kMethodPif = 1;
constexpr std::uint32_t kMethodIFor = 2;
constexpr std::uint32_t kMethodLof = 3;

std::uint64_t fnv1a(const std::vector<char>& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= std::uint8_t(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct Writer {
    std::vector<char> buf;

    template <typename T>
    void raw(T v) {
        char tmp[sizeof(T)];
        std::memcpy(tmp, &v, sizeof(T));
        buf.insert(buf.end(), tmp, tmp + sizeof(T));
    }
    void u8(std::uint8_t v) { raw(v); }
    void u32(std::uint32_t v) { raw(v); }
    void u64(std::uint64_t v) { raw(v); }
    void i32(std::int32_t v) { raw(v); }
    void f64(double v) { raw(v); }
    void i32_vec(const std::vector<std::int32_t>& v) {
        u64(v.size());
        for (auto x : v) i32(x);
    }
    void f64_vec(const std::vector<double>& v) {
        u64(v.size());
        for (auto x : v) f64(x);
    }
    void matrix(const Matrix& m) {
        u64(m.rows);
        u64(m.cols);
        for (double x : m.data) f64(x);
    }
};

struct Reader {
    const std::vector<char>& buf;
    std::size_t pos = 0;

    template <typename T>
    T raw() {
        if (pos + sizeof(T) > buf.size()) throw CorruptArtifact("artifact: payload truncated");
        T v;
        std::memcpy(&v, buf.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    std::uint8_t u8() { return raw<std::uint8_t>(); }
    std::uint32_t u32() { return raw<std::uint32_t>(); }
    std::uint64_t u64() { return raw<std::uint64_t>(); }
    std::int32_t i32() { return raw<std::int32_t>(); }
    double f64() { return raw<double>(); }
    std::vector<std::int32_t> i32_vec() {
        std::uint64_t n = u64();
        std::vector<std::int32_t> v(n);
        for (auto& x : v) x = i32();
        return v;
    }
    std::vector<double> f64_vec() {
        std::uint64_t n = u64();
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    Matrix matrix() {
        Matrix m;
        m.rows = u64();
        m.cols = u64();
        m.data.resize(m.rows * m.cols);
        for (auto& x : m.data) x = f64();
        return m;
    }
};

void write_pif(Writer& w, const PifModel& model) {
    const auto& f = model.forest;
    w.i32(f.params.t);
    w.i32(f.params.psi);
    w.i32(f.params.b);
    w.i32(f.height_limit);
    w.i32(f.psi_effective);
    w.u32(std::uint32_t(f.params.metric));
    w.u64(f.params.rng_seed);
    w.u64(f.dim);

    w.f64(model.embed_cfg.sigma);
    w.f64(model.embed_cfg.pool_multiplier);
    w.u8(model.embed_cfg.binarize ? 1 : 0);
    w.u8(std::uint8_t(model.embed_cfg.phi_exponent));
    w.u64(model.embed_cfg.rng_seed);
    w.u8(std::uint8_t(model.family));

    w.u64(model.pool.size());
    for (const auto& m : model.pool) {
        w.u8(std::uint8_t(m.kind));
        w.f64(m.p0);
        w.f64(m.p1);
        w.f64(m.p2);
    }
    w.matrix(f.seed_table);
    w.u64(f.trees.size());
    for (const auto& tree : f.trees) {
        w.u64(tree.nodes.size());
        for (const auto& node : tree.nodes) {
            w.i32(node.children_begin);
            w.i32(node.seeds_begin);
            w.i32(node.size);
        }
        w.i32_vec(tree.child_ids);
        w.i32_vec(tree.seed_slots);
    }
}

PifModel read_pif(Reader& r) {
    PifModel model;
    auto& f = model.forest;
    f.params.t = r.i32();
    f.params.psi = r.i32();
    f.params.b = r.i32();
    f.height_limit = r.i32();
    f.params.height_limit = f.height_limit;
    f.psi_effective = r.i32();
    f.params.metric = Metric(r.u32());
    f.params.rng_seed = r.u64();
    f.dim = r.u64();

    model.embed_cfg.sigma = r.f64();
    model.embed_cfg.pool_multiplier = r.f64();
    model.embed_cfg.binarize = r.u8() != 0;
    model.embed_cfg.phi_exponent = PhiExponent(r.u8());
    model.embed_cfg.rng_seed = r.u64();
    model.family = ModelKind(r.u8());

    std::uint64_t pool_size = r.u64();
    model.pool.resize(pool_size);
    for (auto& m : model.pool) {
        m.kind = ModelKind(r.u8());
        m.p0 = r.f64();
        m.p1 = r.f64();
        m.p2 = r.f64();
    }
    f.seed_table = r.matrix();
    std::uint64_t ntrees = r.u64();
    f.trees.resize(ntrees);
    for (auto& tree : f.trees) {
        std::uint64_t nn = r.u64();
        tree.nodes.resize(nn);
        for (auto& node : tree.nodes) {
            node.children_begin = r.i32();
            node.seeds_begin = r.i32();
            node.size = r.i32();
        }
        tree.child_ids = r.i32_vec();
        tree.seed_slots = r.i32_vec();
    }
    return model;
}

void write_ifor(Writer& w, const IForModel& model) {
    const auto& f = model.forest;
    w.i32(f.params.t);
    w.i32(f.params.psi);
    w.i32(f.height_limit);
    w.i32(f.psi_effective);
    w.u64(f.params.rng_seed);
    w.u64(f.dim);
    w.u64(f.trees.size());
    for (const auto& tree : f.trees) {
        w.u64(tree.nodes.size());
        for (const auto& node : tree.nodes) {
            w.i32(node.left);
            w.i32(node.right);
            w.i32(node.attr);
            w.f64(node.split);
            w.i32(node.size);
        }
    }
}

IForModel read_ifor(Reader& r) {
    IForModel model;
    auto& f = model.forest;
    f.params.t = r.i32();
    f.params.psi = r.i32();
    f.height_limit = r.i32();
    f.params.height_limit = f.height_limit;
    f.psi_effective = r.i32();
    f.params.rng_seed = r.u64();
    f.dim = r.u64();
    std::uint64_t ntrees = r.u64();
    f.trees.resize(ntrees);
    for (auto& tree : f.trees) {
        std::uint64_t nn = r.u64();
        tree.nodes.resize(nn);
        for (auto& node : tree.nodes) {
            node.left = r.i32();
            node.right = r.i32();
            node.attr = r.i32();
            node.split = r.f64();
            node.size = r.i32();
        }
    }
    return model;
}

void write_lof(Writer& w, const LofModel& model) {
    w.i32(model.params.k);
    w.u32(std::uint32_t(model.params.metric));
    w.matrix(model.train);
}

LofModel read_lof(Reader& r) {
    LofModel model;
    model.params.k = r.i32();
    model.params.metric = Metric(r.u32());
    model.train = r.matrix();
    return model;
}

}  // namespace

std::vector<double> PifModel::score_points(std::span<const Point2> points) const {
    if (pool.empty())
        throw ConfigError("model has no embedding pool; it can only score matrices");
    PreferenceMatrix prefs = embed(points, pool, embed_cfg);
    return score_all(prefs, forest);
}

std::vector<double> PifModel::score_matrix(const Matrix& data) const {
    PreferenceMatrix prefs;
    prefs.m = data;
    prefs.binary = embed_cfg.binarize;
    return score_all(prefs, forest);
}

std::vector<double> IForModel::score_matrix(const Matrix& data) const {
    return ifor_score(forest, data);
}

std::vector<double> LofModel::score_train() const { return lof_score(train, params); }

void save_model(const ModelArtifact& model, const std::string& path) {
    Writer payload;
    std::uint32_t method = 0;
    if (std::holds_alternative<PifModel>(model)) {
        method = kMethodPif;
        write_pif(payload, std::get<PifModel>(model));
    } else if (std::holds_alternative<IForModel>(model)) {
        method = kMethodIFor;
        write_ifor(payload, std::get<IForModel>(model));
    } else {
        method = kMethodLof;
        write_lof(payload, std::get<LofModel>(model));
    }

    Writer out;
    out.buf.insert(out.buf.end(), kMagic, kMagic + 4);
    out.u32(kFormatVersion);
    out.u32(method);
    out.u64(payload.buf.size());
    out.buf.insert(out.buf.end(), payload.buf.begin(), payload.buf.end());
    out.u64(fnv1a(payload.buf));

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open for writing: " + path);
    file.write(out.buf.data(), std::streamsize(out.buf.size()));
    if (!file) throw IoError("write failed: " + path);
}

ModelArtifact load_model(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open for reading: " + path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(file)),
                            std::istreambuf_iterator<char>());

    if (bytes.size() < 4 + 4 + 4 + 8 + 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw CorruptArtifact("artifact: bad magic or header truncated: " + path);
    Reader header{bytes, 4};
    std::uint32_t version = header.u32();
    if (version != kFormatVersion)
        throw VersionMismatch("artifact format version " + std::to_string(version) +
                              " unsupported; this build reads version " +
                              std::to_string(kFormatVersion));
    std::uint32_t method = header.u32();
    std::uint64_t payload_len = header.u64();
    if (header.pos + payload_len + 8 > bytes.size())
        throw CorruptArtifact("artifact: truncated payload: " + path);

    std::vector<char> payload(bytes.begin() + std::ptrdiff_t(header.pos),
                              bytes.begin() + std::ptrdiff_t(header.pos + payload_len));
    Reader tail{bytes, header.pos + payload_len};
    if (tail.u64() != fnv1a(payload))
        throw CorruptArtifact("artifact: checksum mismatch: " + path);

    Reader r{payload, 0};
    switch (method) {
        case kMethodPif: return read_pif(r);
        case kMethodIFor: return read_ifor(r);
        case kMethodLof: return read_lof(r);
        default: throw CorruptArtifact("artifact: unknown method id");
    }
}

}  // namespace pif
