#include "pif/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pif {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& s, std::size_t line_no, const std::string& path) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError(path + ": line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

// Shortest round-trippable decimal form.
std::string fmt_double(double v) {
    char buf[32];
    int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::from_chars(buf, buf + len, back);
    for (int prec = 1; prec < 17; ++prec) {
        char tmp[32];
        int n = std::snprintf(tmp, sizeof(tmp), "%.*g", prec, v);
        double t = 0.0;
        std::from_chars(tmp, tmp + n, t);
        if (t == v) return std::string(tmp, std::size_t(n));
    }
    return std::string(buf, std::size_t(len));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path);
    return f;
}

}  // namespace

void write_dataset_csv(const LabeledDataset& ds, const std::string& path) {
    auto f = open_out(path);
    f << "x,y,label\n";
    for (std::size_t i = 0; i < ds.points.size(); ++i)
        f << fmt_double(ds.points[i].x) << "," << fmt_double(ds.points[i].y) << ","
          << ds.labels[i] << "\n";
    if (!f) throw IoError("write failed: " + path);
}

LabeledDataset read_dataset_csv(const std::string& path) {
    auto f = open_in(path);
    LabeledDataset ds;
    ds.name = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("x,y", 0) == 0) continue;  // header
        auto cols = split(line);
        if (cols.size() != 2 && cols.size() != 3)
            throw IoError(path + ": line " + std::to_string(line_no) +
                          ": expected 2 or 3 columns");
        Point2 p{parse_double(cols[0], line_no, path), parse_double(cols[1], line_no, path)};
        int label = cols.size() == 3 ? int(parse_double(cols[2], line_no, path)) : 0;
        ds.points.push_back(p);
        ds.labels.push_back(label);
    }
    return ds;
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
    auto f = open_out(path);
    for (std::size_t j = 0; j < m.cols; ++j) f << (j ? "," : "") << "p_" << j;
    f << "\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j)
            f << (j ? "," : "") << fmt_double(m.at(i, j));
        f << "\n";
    }
    if (!f) throw IoError("write failed: " + path);
}

Matrix read_matrix_csv(const std::string& path) {
    auto f = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("p_0", 0) == 0) continue;  // header
        auto cols = split(line);
        std::vector<double> row;
        row.reserve(cols.size());
        for (const auto& c : cols) row.push_back(parse_double(c, line_no, path));
        if (!rows.empty() && row.size() != rows[0].size())
            throw IoError(path + ": line " + std::to_string(line_no) +
                          ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": empty matrix");
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[0].size(); ++j) m.at(i, j) = rows[i][j];
    return m;
}

void write_scores_csv(const std::vector<double>& scores,
                      const std::vector<std::string>& metadata, const std::string& path) {
    auto f = open_out(path);
    for (const auto& line : metadata) f << "# " << line << "\n";
    f << "score\n";
    for (double s : scores) f << fmt_double(s) << "\n";
    if (!f) throw IoError("write failed: " + path);
}

std::vector<double> read_scores_csv(const std::string& path) {
    auto f = open_in(path);
    std::vector<double> scores;
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header && line == "score") {
            seen_header = true;
            continue;
        }
        scores.push_back(parse_double(line, line_no, path));
    }
    return scores;
}

void write_text_file(const std::string& content, const std::string& path) {
    auto f = open_out(path);
    f << content;
    if (!f) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    auto f = open_in(path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace pif
