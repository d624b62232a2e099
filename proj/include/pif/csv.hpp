#ifndef PIF_CSV_HPP
#define PIF_CSV_HPP

#include <string>
#include <vector>

#include "pif/common.hpp"
#include "pif/datasets.hpp"

namespace pif {

// Datasets: columns x,y,label (label -1 = anomaly, else structure index).
// The label column is optional on read (defaults to 0, e.g. score grids).
void write_dataset_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset read_dataset_csv(const std::string& path);

// Preference matrices: header p_0..p_{m-1}, one row per point.
void write_matrix_csv(const Matrix& m, const std::string& path);
Matrix read_matrix_csv(const std::string& path);

// Scores: '#'-prefixed metadata lines, then a `score` header and one
// value per row.
void write_scores_csv(const std::vector<double>& scores,
                      const std::vector<std::string>& metadata, const std::string& path);
std::vector<double> read_scores_csv(const std::string& path);

void write_text_file(const std::string& content, const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace pif

#endif
