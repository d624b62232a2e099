#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pif/baselines.hpp"
#include "pif/csv.hpp"
#include "pif/datasets.hpp"
#include "pif/eval.hpp"
#include "pif/forest.hpp"
#include "pif/persistence.hpp"
#include "pif/preference.hpp"
#include "pif/svg.hpp"

namespace {

using namespace pif;
using nlohmann::json;

DatasetSpec spec_from_json_file(const std::string& path) {
    json root;
    try {
        root = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    for (auto it = root.begin(); it != root.end(); ++it) {
        std::string k = it.key();
        if (k != "name" && k != "family" && k != "noise_sigma" && k != "anomalies" &&
            k != "structures")
            throw ConfigError(path + ": unknown key '" + k + "'");
    }
    DatasetSpec spec;
    spec.name = root.value("name", std::string("custom"));
    std::string family = root.value("family", std::string("line"));
    if (family != "line" && family != "circle")
        throw ConfigError(path + ": family must be line or circle");
    spec.family = family == "line" ? ModelKind::Line : ModelKind::Circle;
    spec.noise_sigma = root.value("noise_sigma", 0.01);
    spec.anomaly_count = root.value("anomalies", 0);
    for (const auto& s : root.at("structures")) {
        StructureSpec st;
        st.count = s.at("count").get<int>();
        if (s.contains("segment")) {
            auto v = s.at("segment");
            st.shape = Segment{{v.at(0), v.at(1)}, {v.at(2), v.at(3)}};
        } else if (s.contains("circle")) {
            auto v = s.at("circle");
            st.shape = CircleShape{{v.at(0), v.at(1)}, v.at(2)};
        } else {
            throw ConfigError(path + ": structure needs 'segment' or 'circle'");
        }
        spec.structures.push_back(st);
    }
    if (spec.structures.empty()) throw ConfigError(path + ": no structures");
    return spec;
}

ModelKind parse_family(const std::string& s) {
    if (s == "line") return ModelKind::Line;
    if (s == "circle") return ModelKind::Circle;
    throw ConfigError("family must be line or circle, got '" + s + "'");
}

Metric parse_metric(const std::string& s) {
    if (s == "tanimoto") return Metric::Tanimoto;
    if (s == "jaccard") return Metric::Jaccard;
    if (s == "euclidean") return Metric::Euclidean;
    throw ConfigError("metric must be tanimoto, jaccard or euclidean, got '" + s + "'");
}

bool looks_like_matrix_csv(const std::string& path) {
    std::string text = read_text_file(path);
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        if (!line.empty() && line[0] != '#') return line.rfind("p_0", 0) == 0;
        if (eol == std::string::npos) break;
        pos = eol + 1;
    }
    return false;
}

struct ScoreOptions {
    std::string input;
    std::string method = "pif";
    std::string space = "preference";
    std::string metric_override;
    std::string family = "line";
    double sigma = 0.01;
    double multiplier = 10.0;
    int t = 100, psi = 256, b = 2, k = 10;
    std::uint64_t seed = 0;
    std::string out = "scores.csv";
    std::string save_model;
    std::string load_model_path;
};

int cmd_score(const ScoreOptions& opt) {
    if (opt.method != "pif" && opt.method != "ifor" && opt.method != "lof")
        throw ConfigError("unknown method '" + opt.method + "'");
    if (opt.space != "ambient" && opt.space != "preference" && opt.space != "binary")
        throw ConfigError("space must be ambient, preference or binary");

    std::vector<std::string> meta;
    std::vector<double> scores;

    if (!opt.load_model_path.empty()) {
        ModelArtifact artifact = load_model(opt.load_model_path);
        if (std::holds_alternative<PifModel>(artifact)) {
            const auto& model = std::get<PifModel>(artifact);
            if (looks_like_matrix_csv(opt.input)) {
                scores = model.score_matrix(read_matrix_csv(opt.input));
            } else {
                auto ds = read_dataset_csv(opt.input);
                scores = model.score_points(ds.points);
            }
            meta.push_back("method=pif loaded=" + opt.load_model_path);
        } else if (std::holds_alternative<IForModel>(artifact)) {
            const auto& model = std::get<IForModel>(artifact);
            Matrix data;
            if (looks_like_matrix_csv(opt.input)) {
                data = read_matrix_csv(opt.input);
            } else {
                auto ds = read_dataset_csv(opt.input);
                data = Matrix(ds.points.size(), 2);
                for (std::size_t i = 0; i < ds.points.size(); ++i) {
                    data.at(i, 0) = ds.points[i].x;
                    data.at(i, 1) = ds.points[i].y;
                }
            }
            scores = model.score_matrix(data);
            meta.push_back("method=ifor loaded=" + opt.load_model_path);
        } else {
            scores = std::get<LofModel>(artifact).score_train();
            meta.push_back("method=lof loaded=" + opt.load_model_path +
                           " note=scores-are-for-the-stored-training-set");
        }
        write_scores_csv(scores, meta, opt.out);
        std::cout << "wrote " << scores.size() << " scores to " << opt.out << "\n";
        return 0;
    }

    // Assemble the matrix the method operates on.
    Matrix data;
    bool binary = false;
    std::vector<ModelInstance> pool;
    EmbeddingConfig ecfg;
    bool have_pool = false;
    if (looks_like_matrix_csv(opt.input)) {
        data = read_matrix_csv(opt.input);
        binary = opt.space == "binary";
    } else {
        auto ds = read_dataset_csv(opt.input);
        if (opt.space == "ambient") {
            data = Matrix(ds.points.size(), 2);
            for (std::size_t i = 0; i < ds.points.size(); ++i) {
                data.at(i, 0) = ds.points[i].x;
                data.at(i, 1) = ds.points[i].y;
            }
        } else {
            ModelKind family = parse_family(opt.family);
            ecfg.sigma = opt.sigma;
            ecfg.binarize = opt.space == "binary";
            ecfg.rng_seed = mix_seed(opt.seed, hash_str("pool"));
            std::size_t m =
                std::max<std::size_t>(1, std::size_t(opt.multiplier * double(ds.size())));
            pool = sample_pool(ds.points, family, m, ecfg.rng_seed);
            have_pool = true;
            data = embed(ds.points, pool, ecfg).m;
            binary = ecfg.binarize;
        }
    }

    Metric metric = opt.space == "ambient"
                        ? Metric::Euclidean
                        : (opt.space == "binary" ? Metric::Jaccard : Metric::Tanimoto);
    if (!opt.metric_override.empty()) metric = parse_metric(opt.metric_override);

    if (opt.method == "pif") {
        PifParams params;
        params.t = opt.t;
        params.psi = opt.psi;
        params.b = opt.b;
        params.metric = metric;
        params.rng_seed = opt.seed;
        PreferenceMatrix prefs;
        prefs.m = data;
        prefs.binary = binary;
        PiForest forest = build_forest(prefs, params);
        scores = score_all(prefs, forest);
        meta.push_back("method=pif metric=" + std::string(metric == Metric::Tanimoto
                                                              ? "tanimoto"
                                                              : metric == Metric::Jaccard
                                                                    ? "jaccard"
                                                                    : "euclidean") +
                       " t=" + std::to_string(params.t) + " psi=" + std::to_string(params.psi) +
                       " b=" + std::to_string(params.b) + " seed=" + std::to_string(opt.seed));
        if (!opt.save_model.empty()) {
            PifModel model{std::move(forest), std::move(pool), ecfg,
                           parse_family(opt.family)};
            if (!have_pool) model.pool.clear();
            save_model(model, opt.save_model);
        }
    } else if (opt.method == "ifor") {
        IForParams params;
        params.t = opt.t;
        params.psi = opt.psi;
        params.rng_seed = opt.seed;
        IsoForest forest = ifor_fit(data, params);
        scores = ifor_score(forest, data);
        meta.push_back("method=ifor t=" + std::to_string(params.t) +
                       " psi=" + std::to_string(params.psi) +
                       " seed=" + std::to_string(opt.seed));
        if (!opt.save_model.empty()) save_model(IForModel{std::move(forest)}, opt.save_model);
    } else {
        LofParams params;
        params.k = opt.k;
        params.metric = metric;
        scores = lof_score(data, params);
        meta.push_back("method=lof k=" + std::to_string(params.k) + " metric=" +
                       std::string(metric == Metric::Tanimoto
                                       ? "tanimoto"
                                       : metric == Metric::Jaccard ? "jaccard" : "euclidean"));
        if (!opt.save_model.empty())
            save_model(LofModel{params, std::move(data)}, opt.save_model);
    }

    write_scores_csv(scores, meta, opt.out);
    std::cout << "wrote " << scores.size() << " scores to " << opt.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Preference Isolation Forest toolkit"};
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (default: logical cores)");

    // generate
    auto* gen = app.add_subcommand("generate", "generate a synthetic labeled dataset");
    std::string gen_preset, gen_spec, gen_out = "dataset.csv";
    std::uint64_t gen_seed = 0;
    int grid_n = 0;
    std::vector<double> grid_bbox;
    gen->add_option("--preset", gen_preset, "preset name (stair3, stair4, star5, star11, "
                                            "circle3, circle4, circle5, concentric2)");
    gen->add_option("--spec", gen_spec, "JSON dataset spec file");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--grid", grid_n, "emit an NxN unlabeled query grid instead");
    gen->add_option("--bbox", grid_bbox, "grid bounding box: xmin ymin xmax ymax")
        ->expected(4);
    gen->add_option("-o,--out", gen_out, "output CSV path");

    // embed
    auto* emb = app.add_subcommand("embed", "embed a dataset into preference space");
    std::string emb_in, emb_family = "line", emb_out = "prefs.csv";
    double emb_sigma = 0.01, emb_mult = 10.0;
    bool emb_binarize = false;
    std::uint64_t emb_seed = 0;
    emb->add_option("input", emb_in, "dataset CSV")->required();
    emb->add_option("--family", emb_family, "model family: line or circle");
    emb->add_option("--sigma", emb_sigma, "noise standard deviation estimate");
    emb->add_option("--pool-multiplier", emb_mult, "pool size = multiplier * n");
    emb->add_flag("--binarize", emb_binarize, "binary preferences");
    emb->add_option("--seed", emb_seed, "random seed");
    emb->add_option("-o,--out", emb_out, "output CSV path");

    // score
    auto* sc = app.add_subcommand("score", "fit a detector and score the input");
    ScoreOptions sopt;
    sc->add_option("input", sopt.input, "dataset CSV or preference-matrix CSV")->required();
    sc->add_option("--method", sopt.method, "pif, ifor or lof");
    sc->add_option("--space", sopt.space, "ambient, preference or binary");
    sc->add_option("--metric", sopt.metric_override, "override: tanimoto, jaccard, euclidean");
    sc->add_option("--family", sopt.family, "model family for embedding");
    sc->add_option("--sigma", sopt.sigma, "noise sigma for embedding");
    sc->add_option("--pool-multiplier", sopt.multiplier, "pool size = multiplier * n");
    sc->add_option("--t", sopt.t, "tree count");
    sc->add_option("--psi", sopt.psi, "subsample size");
    sc->add_option("--b", sopt.b, "branching factor");
    sc->add_option("--k", sopt.k, "LOF neighborhood size");
    sc->add_option("--seed", sopt.seed, "random seed");
    sc->add_option("--save-model", sopt.save_model, "write model artifact here");
    sc->add_option("--load-model", sopt.load_model_path, "score with a saved artifact");
    sc->add_option("-o,--out", sopt.out, "output scores CSV");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "run an experiment grid from a JSON config");
    std::string ev_config, ev_outdir;
    ev->add_option("config", ev_config, "RunConfig JSON file")->required();
    ev->add_option("--out-dir", ev_outdir, "override the config's output directory");

    // plot
    auto* pl = app.add_subcommand("plot", "render a sweep line chart or a score heatmap");
    std::string pl_sweep, pl_grid, pl_scores, pl_out = "plot.svg";
    pl->add_option("--sweep", pl_sweep, "sweep CSV (method,ratio,mean_auc,...)");
    pl->add_option("--grid", pl_grid, "query-point CSV (x,y[,label]) for a heatmap");
    pl->add_option("--scores", pl_scores, "scores CSV matching --grid rows");
    pl->add_option("-o,--out", pl_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#endif

    try {
        if (gen->parsed()) {
            if (grid_n > 0) {
                if (grid_bbox.size() != 4)
                    throw ConfigError("--grid requires --bbox xmin ymin xmax ymax");
                LabeledDataset ds;
                ds.name = "grid";
                for (int i = 0; i < grid_n; ++i)
                    for (int j = 0; j < grid_n; ++j) {
                        double fx = grid_n == 1 ? 0.0 : double(i) / double(grid_n - 1);
                        double fy = grid_n == 1 ? 0.0 : double(j) / double(grid_n - 1);
                        ds.points.push_back({grid_bbox[0] + fx * (grid_bbox[2] - grid_bbox[0]),
                                             grid_bbox[1] + fy * (grid_bbox[3] - grid_bbox[1])});
                        ds.labels.push_back(0);
                    }
                write_dataset_csv(ds, gen_out);
                std::cout << "wrote " << ds.size() << " grid points to " << gen_out << "\n";
                return 0;
            }
            if (gen_preset.empty() == gen_spec.empty())
                throw ConfigError("generate needs exactly one of --preset or --spec");
            DatasetSpec spec =
                gen_preset.empty() ? spec_from_json_file(gen_spec) : preset(gen_preset);
            LabeledDataset ds = generate(spec, gen_seed);
            write_dataset_csv(ds, gen_out);
            std::cout << spec.name << ": " << ds.size() << " points ("
                      << ds.size() - ds.anomalies() << " normal in " << spec.structures.size()
                      << " structures, " << ds.anomalies() << " anomalies) -> " << gen_out
                      << "\n";
            return 0;
        }
        if (emb->parsed()) {
            auto ds = read_dataset_csv(emb_in);
            ModelKind family = parse_family(emb_family);
            if (ds.size() < minimal_sample_size(family))
                throw ConfigError("embed: dataset smaller than the minimal sample size");
            EmbeddingConfig cfg;
            cfg.sigma = emb_sigma;
            cfg.pool_multiplier = emb_mult;
            cfg.binarize = emb_binarize;
            cfg.rng_seed = emb_seed;
            std::size_t m = std::max<std::size_t>(1, std::size_t(emb_mult * double(ds.size())));
            auto pool = sample_pool(ds.points, family, m, emb_seed);
            auto prefs = embed(ds.points, pool, cfg);
            write_matrix_csv(prefs.m, emb_out);
            std::cout << "wrote " << prefs.points() << "x" << prefs.pool_size()
                      << " preference matrix to " << emb_out << "\n";
            return 0;
        }
        if (sc->parsed()) return cmd_score(sopt);
        if (ev->parsed()) {
            RunConfig cfg = parse_run_config(read_text_file(ev_config));
            if (!ev_outdir.empty()) cfg.out_dir = ev_outdir;
            std::filesystem::create_directories(cfg.out_dir);
            EvalReport report = run_experiment(cfg);
            auto out = [&](const std::string& name) {
                return (std::filesystem::path(cfg.out_dir) / name).string();
            };
            write_text_file(report_csv(report), out("report.csv"));
            write_text_file(report_raw_csv(report), out("raw_aucs.csv"));
            write_text_file(report_text_table(report), out("report.txt"));
            if (!report.sweep_rows.empty())
                write_text_file(report_sweep_csv(report), out("sweep.csv"));
            std::cout << report_text_table(report);
            return 0;
        }
        if (pl->parsed()) {
            if (!pl_sweep.empty()) {
                // sweep CSV -> one series per method
                std::string text = read_text_file(pl_sweep);
                std::vector<SvgSeries> series;
                std::istringstream is(text);
                std::string line;
                bool first = true;
                while (std::getline(is, line)) {
                    if (line.empty() || line[0] == '#') continue;
                    if (first) {
                        first = false;
                        continue;  // header
                    }
                    std::istringstream ls(line);
                    std::string method, ratio_s, mean_s;
                    std::getline(ls, method, ',');
                    std::getline(ls, ratio_s, ',');
                    std::getline(ls, mean_s, ',');
                    if (method.empty() || ratio_s.empty() || mean_s.empty())
                        throw IoError(pl_sweep + ": malformed sweep row: " + line);
                    auto* s = [&]() -> SvgSeries* {
                        for (auto& x : series)
                            if (x.name == method) return &x;
                        series.push_back({method, {}});
                        return &series.back();
                    }();
                    s->points.emplace_back(std::stod(ratio_s), std::stod(mean_s));
                }
                if (series.empty()) throw IoError(pl_sweep + ": no sweep rows");
                write_text_file(svg_line_chart(series, "anomaly ratio", "mean AUC"), pl_out);
            } else if (!pl_grid.empty() && !pl_scores.empty()) {
                auto grid = read_dataset_csv(pl_grid);
                auto scores = read_scores_csv(pl_scores);
                if (scores.size() != grid.size())
                    throw ConfigError("plot: grid and scores row counts differ");
                std::vector<double> xs, ys;
                for (const auto& p : grid.points) {
                    xs.push_back(p.x);
                    ys.push_back(p.y);
                }
                write_text_file(svg_heatmap(xs, ys, scores), pl_out);
            } else {
                throw ConfigError("plot needs --sweep or both --grid and --scores");
            }
            std::cout << "wrote " << pl_out << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidRatio& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
