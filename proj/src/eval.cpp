#include "pif/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pif/baselines.hpp"
#include "pif/datasets.hpp"
#include "pif/preference.hpp"

namespace pif {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw DimensionMismatch("roc_auc: scores/labels length mismatch");
    std::size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l != 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw DegenerateLabels("roc_auc: need at least one anomaly and one normal");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks for tied groups
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = 0.5 * double(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] != 0) rank_sum_pos += avg_rank;
        i = j;
    }
    return (rank_sum_pos - 0.5 * double(n_pos) * double(n_pos + 1)) /
           (double(n_pos) * double(n_neg));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("paired_t_test: length mismatch");
    if (a.size() < 2) throw ConfigError("paired_t_test: need at least 2 pairs");
    // two-sided alpha = 0.05 critical values, df = 1..30
    static const double kCritical[30] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};

    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= double(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = (a[i] - b[i]) - mean;
        var += d * d;
    }
    var /= double(n - 1);

    TTestResult r;
    if (var == 0.0) {
        r.zero_variance = true;
        r.significant = mean != 0.0;
        r.t = mean == 0.0 ? 0.0
                          : std::copysign(std::numeric_limits<double>::infinity(), mean);
        return r;
    }
    r.t = mean / (std::sqrt(var) / std::sqrt(double(n)));
    std::size_t df = std::min<std::size_t>(n - 1, 30);
    r.significant = std::abs(r.t) > kCritical[df - 1];
    return r;
}

std::string embedding_name(Embedding e) {
    switch (e) {
        case Embedding::Ambient: return "ambient";
        case Embedding::Binary: return "binary";
        case Embedding::Continuous: return "continuous";
    }
    return "?";
}

Embedding embedding_from_name(const std::string& name) {
    if (name == "ambient") return Embedding::Ambient;
    if (name == "binary") return Embedding::Binary;
    if (name == "continuous") return Embedding::Continuous;
    throw ConfigError("unknown embedding: " + name);
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed) ok = ok || it.key() == key;
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

MethodSpec parse_method(const json& m) {
    if (m.is_string()) {
        MethodSpec spec{m.get<std::string>()};
        if (spec.name != "pif" && spec.name != "ifor" && spec.name != "lof")
            throw ConfigError("config: unknown method '" + spec.name + "'");
        return spec;
    }
    if (!m.is_object()) throw ConfigError("config: method entries must be strings or objects");
    reject_unknown_keys(m, {"name", "k"}, "method");
    MethodSpec spec;
    spec.name = m.at("name").get<std::string>();
    if (spec.name != "pif" && spec.name != "ifor" && spec.name != "lof")
        throw ConfigError("config: unknown method '" + spec.name + "'");
    if (m.contains("k")) spec.k = m.at("k").get<int>();
    if (spec.k < 1) throw ConfigError("config: lof k must be >= 1");
    return spec;
}

double stat_mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double stat_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = stat_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1));
}

Matrix ambient_matrix(const LabeledDataset& ds) {
    Matrix m(ds.points.size(), 2);
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
        m.at(i, 0) = ds.points[i].x;
        m.at(i, 1) = ds.points[i].y;
    }
    return m;
}

Metric metric_for(Embedding e) {
    switch (e) {
        case Embedding::Ambient: return Metric::Euclidean;
        case Embedding::Binary: return Metric::Jaccard;
        case Embedding::Continuous: return Metric::Tanimoto;
    }
    return Metric::Euclidean;
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << std::fixed << v;
    return os.str();
}

}  // namespace

double CellResult::mean() const { return stat_mean(aucs); }
double CellResult::stddev() const { return stat_stddev(aucs); }
double SweepRow::mean() const { return stat_mean(aucs); }

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: root must be an object");
    reject_unknown_keys(root,
                        {"seed", "runs", "out_dir", "datasets", "embeddings", "methods",
                         "pif", "pool_multiplier", "phi_exponent", "sweep"},
                        "root");
    RunConfig cfg;
    if (root.contains("seed")) cfg.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("runs")) cfg.runs = root.at("runs").get<int>();
    if (cfg.runs < 1) throw ConfigError("config: runs must be >= 1");
    if (root.contains("out_dir")) cfg.out_dir = root.at("out_dir").get<std::string>();
    if (root.contains("datasets"))
        for (const auto& d : root.at("datasets")) cfg.datasets.push_back(d.get<std::string>());
    if (root.contains("embeddings"))
        for (const auto& e : root.at("embeddings"))
            cfg.embeddings.push_back(embedding_from_name(e.get<std::string>()));
    if (root.contains("methods"))
        for (const auto& m : root.at("methods")) cfg.methods.push_back(parse_method(m));
    if (root.contains("pool_multiplier")) {
        cfg.pool_multiplier = root.at("pool_multiplier").get<double>();
        if (!(cfg.pool_multiplier > 0)) throw ConfigError("config: pool_multiplier must be > 0");
    }
    if (root.contains("phi_exponent")) {
        auto name = root.at("phi_exponent").get<std::string>();
        if (name == "sigma")
            cfg.phi_exponent = PhiExponent::Sigma;
        else if (name == "sigma_squared")
            cfg.phi_exponent = PhiExponent::SigmaSquared;
        else
            throw ConfigError("config: phi_exponent must be sigma or sigma_squared");
    }
    if (root.contains("pif")) {
        const auto& p = root.at("pif");
        reject_unknown_keys(p, {"t", "psi", "b"}, "pif");
        if (p.contains("t")) cfg.pif.t = p.at("t").get<int>();
        if (p.contains("psi")) cfg.pif.psi = p.at("psi").get<int>();
        if (p.contains("b")) cfg.pif.b = p.at("b").get<int>();
    }
    if (root.contains("sweep")) {
        const auto& s = root.at("sweep");
        reject_unknown_keys(s, {"base", "ratios", "methods", "embedding"}, "sweep");
        SweepConfig sweep;
        if (s.contains("base")) sweep.base = s.at("base").get<std::string>();
        if (s.contains("ratios")) {
            sweep.ratios.clear();
            for (const auto& r : s.at("ratios")) sweep.ratios.push_back(r.get<double>());
        }
        if (s.contains("methods"))
            for (const auto& m : s.at("methods")) sweep.methods.push_back(parse_method(m));
        if (s.contains("embedding"))
            sweep.embedding = embedding_from_name(s.at("embedding").get<std::string>());
        if (sweep.methods.empty()) sweep.methods.push_back({"pif"});
        cfg.sweep = sweep;
    }
    bool has_grid = !cfg.datasets.empty() || !cfg.methods.empty();
    if (has_grid && (cfg.datasets.empty() || cfg.methods.empty() || cfg.embeddings.empty()))
        throw ConfigError("config: datasets, methods and embeddings must all be non-empty");
    if (!has_grid && !cfg.sweep)
        throw ConfigError("config: nothing to run (no datasets/methods and no sweep)");
    return cfg;
}

namespace {

struct RunContext {
    const RunConfig& cfg;
    LabeledDataset ds;
    Matrix data;                       // matrix the methods operate on
    Metric metric = Metric::Euclidean;
    bool have_dist = false;
    Matrix dist;                       // pairwise distances, for LOF reuse

    const Matrix& distances() {
        if (!have_dist) {
            dist = pairwise_distances(data, metric);
            have_dist = true;
        }
        return dist;
    }
};

std::vector<double> run_method(RunContext& ctx, const MethodSpec& method,
                               std::uint64_t seed) {
    if (method.name == "pif") {
        PifParams params = ctx.cfg.pif;
        params.metric = ctx.metric;
        params.rng_seed = seed;
        PreferenceMatrix prefs;
        prefs.m = ctx.data;
        prefs.binary = false;
        return score_all(prefs, build_forest(prefs, params));
    }
    if (method.name == "ifor") {
        IForParams params;
        params.t = ctx.cfg.pif.t;
        params.psi = ctx.cfg.pif.psi;
        params.rng_seed = seed;
        return ifor_fit_score(ctx.data, params);
    }
    if (method.name == "lof") {
        if (std::size_t(method.k) >= ctx.data.rows)
            throw KTooLarge("lof: k >= n in cell");
        return lof_score_from_distances(ctx.distances(), method.k);
    }
    throw ConfigError("unknown method: " + method.name);
}

void prepare_space(RunContext& ctx, Embedding emb, std::uint64_t embed_seed,
                   double pool_multiplier, PhiExponent phi_exponent) {
    ctx.have_dist = false;
    ctx.metric = metric_for(emb);
    if (emb == Embedding::Ambient) {
        ctx.data = ambient_matrix(ctx.ds);
        return;
    }
    EmbeddingConfig ecfg;
    ecfg.sigma = ctx.ds.noise_sigma > 0 ? ctx.ds.noise_sigma : 0.01;
    ecfg.binarize = emb == Embedding::Binary;
    ecfg.phi_exponent = phi_exponent;
    ecfg.rng_seed = embed_seed;
    std::size_t m = std::size_t(std::llround(pool_multiplier * double(ctx.ds.size())));
    auto pool = sample_pool(ctx.ds.points, ctx.ds.family, std::max<std::size_t>(m, 1),
                            embed_seed);
    ctx.data = embed(ctx.ds.points, pool, ecfg).m;
}

std::vector<int> anomaly_labels(const LabeledDataset& ds) {
    std::vector<int> labels(ds.labels.size());
    for (std::size_t i = 0; i < ds.labels.size(); ++i) labels[i] = ds.labels[i] < 0 ? 1 : 0;
    return labels;
}

}  // namespace

EvalReport run_experiment(const RunConfig& cfg) {
    EvalReport report;
    report.config = cfg;
    report.metadata =
        "seed=" + std::to_string(cfg.seed) + " runs=" + std::to_string(cfg.runs) +
        " pif_t=" + std::to_string(cfg.pif.t) + " pif_psi=" + std::to_string(cfg.pif.psi) +
        " pif_b=" + std::to_string(cfg.pif.b) +
        " pool_multiplier=" + fmt(cfg.pool_multiplier, 3) +
        std::string(" phi_exponent=") +
        (cfg.phi_exponent == PhiExponent::Sigma ? "sigma" : "sigma_squared") +
        " note=datasets-and-methods-rerandomized-per-run";

    // cell index: dataset x method x embedding
    for (const auto& dsname : cfg.datasets)
        for (const auto& method : cfg.methods)
            for (Embedding emb : cfg.embeddings)
                report.cells.push_back(
                    {dsname, method.id(), embedding_name(emb), {}, {}});

    auto cell = [&](const std::string& ds, const std::string& method,
                    const std::string& emb) -> CellResult& {
        for (auto& c : report.cells)
            if (c.dataset == ds && c.method == method && c.embedding == emb) return c;
        throw Error("internal: missing cell");
    };

    for (const auto& dsname : cfg.datasets) {
        for (int run = 0; run < cfg.runs; ++run) {
            RunContext ctx{cfg, {}, {}, Metric::Euclidean, false, {}};
            std::uint64_t ds_seed =
                mix_seed(mix_seed(cfg.seed, hash_str("dataset:" + dsname)), std::uint64_t(run));
            try {
                ctx.ds = generate(preset(dsname), ds_seed);
            } catch (const std::exception& e) {
                for (const auto& method : cfg.methods)
                    for (Embedding emb : cfg.embeddings)
                        cell(dsname, method.id(), embedding_name(emb)).error = e.what();
                continue;
            }
            auto labels = anomaly_labels(ctx.ds);
            for (Embedding emb : cfg.embeddings) {
                std::uint64_t embed_seed = mix_seed(
                    mix_seed(cfg.seed, hash_str("embed:" + dsname + ":" + embedding_name(emb))),
                    std::uint64_t(run));
                try {
                    prepare_space(ctx, emb, embed_seed, cfg.pool_multiplier, cfg.phi_exponent);
                } catch (const std::exception& e) {
                    for (const auto& method : cfg.methods)
                        cell(dsname, method.id(), embedding_name(emb)).error = e.what();
                    continue;
                }
                for (const auto& method : cfg.methods) {
                    auto& c = cell(dsname, method.id(), embedding_name(emb));
                    std::uint64_t mseed = mix_seed(
                        mix_seed(cfg.seed, hash_str("method:" + dsname + ":" + method.id() +
                                                    ":" + embedding_name(emb))),
                        std::uint64_t(run));
                    try {
                        auto scores = run_method(ctx, method, mseed);
                        c.aucs.push_back(roc_auc(scores, labels));
                    } catch (const std::exception& e) {
                        c.error = e.what();
                    }
                }
            }
        }
    }

    // pairwise t-tests between methods, per dataset x embedding
    for (const auto& dsname : cfg.datasets) {
        for (Embedding emb : cfg.embeddings) {
            for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
                for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
                    const auto* a = &report.cells[0];
                    const auto* b = a;
                    for (const auto& c : report.cells) {
                        if (c.dataset == dsname && c.embedding == embedding_name(emb)) {
                            if (c.method == cfg.methods[i].id()) a = &c;
                            if (c.method == cfg.methods[j].id()) b = &c;
                        }
                    }
                    if (a->aucs.size() != b->aucs.size() || a->aucs.size() < 2) continue;
                    report.t_tests.push_back({dsname, embedding_name(emb), a->method,
                                              b->method, paired_t_test(a->aucs, b->aucs)});
                }
            }
        }
    }

    if (cfg.sweep) {
        const auto& sweep = *cfg.sweep;
        for (const auto& method : sweep.methods)
            for (double ratio : sweep.ratios)
                report.sweep_rows.push_back({method.id(), ratio, {}});
        for (double ratio : sweep.ratios) {
            for (int run = 0; run < cfg.runs; ++run) {
                RunContext ctx{cfg, {}, {}, Metric::Euclidean, false, {}};
                std::uint64_t ds_seed = mix_seed(
                    mix_seed(cfg.seed, hash_str("sweep:" + sweep.base + ":" + fmt(ratio, 3))),
                    std::uint64_t(run));
                ctx.ds = contamination_sweep(sweep.base, ratio, ds_seed);
                auto labels = anomaly_labels(ctx.ds);
                std::uint64_t embed_seed = mix_seed(ds_seed, hash_str("sweep-embed"));
                prepare_space(ctx, sweep.embedding, embed_seed, cfg.pool_multiplier,
                               cfg.phi_exponent);
                for (const auto& method : sweep.methods) {
                    std::uint64_t mseed = mix_seed(ds_seed, hash_str("sweep-" + method.id()));
                    auto scores = run_method(ctx, method, mseed);
                    double auc = roc_auc(scores, labels);
                    for (auto& row : report.sweep_rows)
                        if (row.method == method.id() && row.ratio == ratio)
                            row.aucs.push_back(auc);
                }
            }
        }
    }
    return report;
}

std::string report_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "# " << report.metadata << "\n";
    os << "method,dataset,embedding,mean_auc,std_auc,runs\n";
    for (const auto& c : report.cells) {
        if (!c.error.empty()) {
            os << c.method << "," << c.dataset << "," << c.embedding << ",error,error,"
               << c.aucs.size() << "\n";
            continue;
        }
        os << c.method << "," << c.dataset << "," << c.embedding << "," << fmt(c.mean())
           << "," << fmt(c.stddev()) << "," << c.aucs.size() << "\n";
    }
    return os.str();
}

std::string report_raw_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "method,dataset,embedding,run,auc\n";
    for (const auto& c : report.cells)
        for (std::size_t r = 0; r < c.aucs.size(); ++r)
            os << c.method << "," << c.dataset << "," << c.embedding << "," << r << ","
               << fmt(c.aucs[r]) << "\n";
    return os.str();
}

std::string report_sweep_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "method,ratio,mean_auc,std_auc,runs\n";
    for (const auto& row : report.sweep_rows)
        os << row.method << "," << fmt(row.ratio, 2) << "," << fmt(row.mean()) << ","
           << fmt(stat_stddev(row.aucs)) << "," << row.aucs.size() << "\n";
    return os.str();
}

std::string report_text_table(const EvalReport& report) {
    // columns: method @ embedding; rows: datasets; best per row marked *
    std::vector<std::pair<std::string, std::string>> columns;
    for (const auto& c : report.cells) {
        std::pair<std::string, std::string> key{c.method, c.embedding};
        if (std::find(columns.begin(), columns.end(), key) == columns.end())
            columns.push_back(key);
    }
    std::vector<std::string> datasets;
    for (const auto& c : report.cells)
        if (std::find(datasets.begin(), datasets.end(), c.dataset) == datasets.end())
            datasets.push_back(c.dataset);

    std::ostringstream os;
    os << "# " << report.metadata << "\n";
    int w = 10;
    for (const auto& col : columns)
        w = std::max(w, int(col.first.size() + col.second.size()) + 2);
    os << std::string(12, ' ');
    for (const auto& col : columns) {
        std::string h = col.first + "@" + col.second;
        os << h << std::string(std::size_t(std::max(1, w + 1 - int(h.size()))), ' ');
    }
    os << "\n";
    for (const auto& ds : datasets) {
        std::vector<double> vals(columns.size(), -1.0);
        for (std::size_t i = 0; i < columns.size(); ++i)
            for (const auto& c : report.cells)
                if (c.dataset == ds && c.method == columns[i].first &&
                    c.embedding == columns[i].second && c.error.empty())
                    vals[i] = c.mean();
        double best = *std::max_element(vals.begin(), vals.end());
        os << ds << std::string(std::size_t(std::max(1, 12 - int(ds.size()))), ' ');
        for (std::size_t i = 0; i < columns.size(); ++i) {
            std::string cellstr = vals[i] < 0 ? "error" : fmt(vals[i], 3);
            if (vals[i] == best && vals[i] >= 0) cellstr += "*";
            os << cellstr << std::string(std::size_t(std::max(1, w + 1 - int(cellstr.size()))), ' ');
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace pif
