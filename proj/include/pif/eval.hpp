#ifndef PIF_EVAL_HPP
#define PIF_EVAL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pif/common.hpp"
#include "pif/forest.hpp"

namespace pif {

// Mann-Whitney AUC: probability a random anomaly (label 1) outscores a
// random normal (label 0), ties at half credit. Rank-based, O(n log n).
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct TTestResult {
    double t = 0.0;
    bool significant = false;
    bool zero_variance = false;
};

// Two-sided paired t-test at alpha = 0.05, critical values tabulated for
// df 1..30. Constant differences yield the +-inf sentinel (or t = 0 when
// the difference is identically zero).
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

enum class Embedding { Ambient, Binary, Continuous };

std::string embedding_name(Embedding e);
Embedding embedding_from_name(const std::string& name);

struct MethodSpec {
    std::string name;  // pif | ifor | lof
    int k = 10;        // lof neighborhood size

    std::string id() const { return name == "lof" ? name + "-k" + std::to_string(k) : name; }
};

struct SweepConfig {
    std::string base = "stair3";
    std::vector<double> ratios = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<MethodSpec> methods;
    Embedding embedding = Embedding::Continuous;
};

struct RunConfig {
    std::uint64_t seed = 0;
    int runs = 10;
    std::string out_dir = ".";
    std::vector<std::string> datasets;
    std::vector<Embedding> embeddings;
    std::vector<MethodSpec> methods;
    PifParams pif;  // t, psi, b defaults shared by pif and ifor
    double pool_multiplier = 10.0;
    PhiExponent phi_exponent = PhiExponent::Sigma;
    std::optional<SweepConfig> sweep;
};

// Parses and schema-validates the JSON experiment description; unknown
// keys are rejected.
RunConfig parse_run_config(const std::string& json_text);

struct CellResult {
    std::string dataset;
    std::string method;
    std::string embedding;
    std::vector<double> aucs;
    std::string error;  // non-empty when the cell failed

    double mean() const;
    double stddev() const;
};

struct SweepRow {
    std::string method;
    double ratio = 0.0;
    std::vector<double> aucs;

    double mean() const;
};

struct TTestRow {
    std::string dataset;
    std::string embedding;
    std::string method_a;
    std::string method_b;
    TTestResult result;
};

struct EvalReport {
    RunConfig config;
    std::string metadata;
    std::vector<CellResult> cells;
    std::vector<TTestRow> t_tests;
    std::vector<SweepRow> sweep_rows;
};

EvalReport run_experiment(const RunConfig& config);

std::string report_csv(const EvalReport& report);
std::string report_raw_csv(const EvalReport& report);
std::string report_sweep_csv(const EvalReport& report);
std::string report_text_table(const EvalReport& report);

}  // namespace pif

#endif
