#include "icid/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "icid/rng.hpp"

namespace icid::data {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e && !s.empty();
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool is_comment(const std::string& trimmed) {
    return !trimmed.empty() && trimmed.front() == '#';
}

void write_provenance(std::ofstream& out, const Provenance& provenance) {
    if (provenance.empty()) return;
    out << "#";
    for (const auto& [k, v] : provenance) out << " " << k << "=" << v;
    out << "\n";
}

}  // namespace

TimeSeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    TimeSeries ts;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_content = true;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = trim(line);
        if (trimmed.empty() || is_comment(trimmed)) continue;
        auto cells = split_csv_line(line);
        if (first_content) {
            // A first row with any non-numeric cell is a header.
            bool numeric = true;
            double v;
            for (const auto& c : cells)
                if (!parse_double(c, v)) {
                    numeric = false;
                    break;
                }
            width = cells.size();
            first_content = false;
            if (!numeric) {
                ts.names = cells;
                continue;
            }
        }
        if (cells.size() != width)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(width) +
                                     " fields, got " + std::to_string(cells.size()));
        row.resize(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (!parse_double(cells[j], row[j]))
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-numeric field '" + cells[j] + "'");
            if (std::isnan(row[j]))
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": NaN is not a valid value");
        }
        ts.values.push_row(row);
    }
    if (ts.values.empty()) throw std::runtime_error(path + ": no data rows");
    return ts;
}

void write_csv(const TimeSeries& ts, const std::string& path,
               const Provenance& provenance) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_provenance(out, provenance);
    if (!ts.names.empty()) {
        for (std::size_t j = 0; j < ts.names.size(); ++j)
            out << (j ? "," : "") << ts.names[j];
        out << "\n";
    }
    for (std::size_t i = 0; i < ts.values.rows(); ++i) {
        for (std::size_t j = 0; j < ts.values.cols(); ++j)
            out << (j ? "," : "") << fmt_full(ts.values(i, j));
        out << "\n";
    }
}

NormParams fit_norm(const Matrix& m) {
    if (m.empty()) throw std::invalid_argument("cannot fit normalisation on empty data");
    NormParams p;
    p.min.assign(m.cols(), std::numeric_limits<double>::infinity());
    p.max.assign(m.cols(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            p.min[j] = std::min(p.min[j], m(i, j));
            p.max[j] = std::max(p.max[j], m(i, j));
        }
    return p;
}

Matrix apply_norm(const NormParams& params, const Matrix& points) {
    if (points.cols() != params.min.size())
        throw std::invalid_argument("normalisation dimension mismatch");
    Matrix out(points.rows(), points.cols());
    for (std::size_t j = 0; j < points.cols(); ++j) {
        double range = params.max[j] - params.min[j];
        for (std::size_t i = 0; i < points.rows(); ++i) {
            double v = range > 0.0 ? (points(i, j) - params.min[j]) / range : 0.0;
            out(i, j) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

std::pair<TimeSeries, NormParams> minmax_normalize(const TimeSeries& ts) {
    NormParams params = fit_norm(ts.values);
    TimeSeries scaled;
    scaled.names = ts.names;
    scaled.values = apply_norm(params, ts.values);
    return {std::move(scaled), std::move(params)};
}

Labels load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Labels labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || is_comment(s)) continue;
        bool outlier = false;
        if (s.size() >= 1 && (s.back() == 'o' || s.back() == 'O')) {
            outlier = true;
            s = trim(s.substr(0, s.size() - 1));
        }
        std::size_t idx = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), idx);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed label '" + trim(line) + "'");
        (outlier ? labels.outliers : labels.change_points).push_back(idx);
    }
    auto dedup = [](std::vector<std::size_t>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(labels.change_points);
    dedup(labels.outliers);
    for (std::size_t cp : labels.change_points)
        if (std::binary_search(labels.outliers.begin(), labels.outliers.end(), cp))
            throw std::runtime_error(path + ": index " + std::to_string(cp) +
                                     " labelled as both change point and outlier");
    return labels;
}

void write_labels(const Labels& labels, const std::string& path,
                  const Provenance& provenance) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_provenance(out, provenance);
    for (std::size_t cp : labels.change_points) out << cp << "\n";
    for (std::size_t o : labels.outliers) out << o << " o\n";
}

std::pair<TimeSeries, Labels> gen_s1(std::uint64_t seed, std::size_t points_per_block) {
    if (points_per_block == 0) throw std::invalid_argument("block size must be positive");
    static constexpr double kScales[5] = {1.0, 2.2, 4.3, 48.3, 28.3};
    static constexpr std::size_t kOutlierBase[5] = {89, 117, 139, 523, 537};

    const std::size_t n = 5 * points_per_block;
    TimeSeries ts;
    ts.names = {"x1"};
    ts.values = Matrix(n, 1);
    Rng rng(seed);
    for (std::size_t b = 0; b < 5; ++b)
        for (std::size_t i = 0; i < points_per_block; ++i)
            ts.values(b * points_per_block + i, 0) = kScales[b] * rng.next_gaussian();

    Labels labels;
    for (std::size_t b = 1; b < 5; ++b) labels.change_points.push_back(b * points_per_block);
    for (std::size_t base : kOutlierBase) {
        std::size_t idx = base * points_per_block / 300;  // fixed positions, rescaled
        std::size_t block = idx / points_per_block;
        ts.values(idx, 0) = 6.0 * kScales[block];
        labels.outliers.push_back(idx);
    }
    return {std::move(ts), std::move(labels)};
}

std::pair<TimeSeries, Labels> gen_s2(std::uint64_t seed, std::size_t points_per_block) {
    if (points_per_block == 0) throw std::invalid_argument("block size must be positive");
    static constexpr double kCov[3][3] = {
        // c11, c12, c22
        {0.9, 0.4, 0.2},
        {0.5, 0.5, 0.5},
        {0.9, 0.1, 0.9},
    };

    const std::size_t n = 3 * points_per_block;
    TimeSeries ts;
    ts.names = {"x1", "x2"};
    ts.values = Matrix(n, 2);
    Rng rng(seed);
    for (std::size_t b = 0; b < 3; ++b) {
        // 2x2 Cholesky factor; the rank-1 middle block yields l22 = 0.
        double l11 = std::sqrt(kCov[b][0]);
        double l21 = kCov[b][1] / l11;
        double l22 = std::sqrt(std::max(0.0, kCov[b][2] - l21 * l21));
        for (std::size_t i = 0; i < points_per_block; ++i) {
            double z1 = rng.next_gaussian();
            double z2 = rng.next_gaussian();
            std::size_t r = b * points_per_block + i;
            ts.values(r, 0) = l11 * z1;
            ts.values(r, 1) = l21 * z1 + l22 * z2;
        }
    }

    Labels labels;
    labels.change_points = {points_per_block, 2 * points_per_block};
    return {std::move(ts), std::move(labels)};
}

}  // namespace icid::data
