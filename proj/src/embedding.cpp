#include "icid/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "icid/threading.hpp"

namespace icid::embedding {

namespace {

void check_interval(const kernel::IsolationModel& m, const Matrix& X) {
    if (X.empty()) throw std::invalid_argument("cannot embed an empty interval");
    if (X.cols() != m.dim)
        throw std::invalid_argument("interval dimension does not match the model");
}

std::int64_t dot_i64(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += std::abs(x[k] - y[k]);
    return s;
}

double l2_distance2(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

double clamp_mmd(double v, PointKernelFamily family) {
    if (v >= 0.0) return v;
    if (family == PointKernelFamily::sigmoid) {
        std::fprintf(stderr,
                     "warning: negative squared discrepancy %.3e under the sigmoid "
                     "kernel (indefinite); reporting the raw value\n",
                     v);
        return v;
    }
    if (v < -1e-9)
        std::fprintf(stderr, "warning: squared discrepancy %.3e below tolerance; clamping\n",
                     v);
    return 0.0;
}

}  // namespace

// Shared by the interval and streaming paths so that both produce the same
// bits from the same integer sums.
double cosine_from_dots(std::int64_t dxy, std::int64_t dxx, std::int64_t dyy) {
    if (dxy == dxx && dxy == dyy) return 1.0;  // identical count vectors
    double s = static_cast<double>(dxy) /
               std::sqrt(static_cast<double>(dxx) * static_cast<double>(dyy));
    return std::clamp(s, 0.0, 1.0);
}

std::vector<std::int64_t> cell_counts(const kernel::IsolationModel& m, const Matrix& X,
                                      std::size_t row_begin, std::size_t row_end) {
    if (row_begin > row_end || row_end > X.rows())
        throw std::out_of_range("cell_counts: bad row range");
    const std::size_t psi = m.psi;
    std::vector<std::int64_t> counts(m.t * psi, 0);
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t p = 0; p < static_cast<std::int64_t>(m.t); ++p) {
        const auto& part = m.partitionings[p];
        std::int64_t* block = counts.data() + static_cast<std::size_t>(p) * psi;
        for (std::size_t r = row_begin; r < row_end; ++r)
            ++block[kernel::detail::nearest_center_impl(part, X.row(r))];
    }
    kernel::detail::add_assigns(static_cast<std::uint64_t>(row_end - row_begin) * m.t);
    return counts;
}

std::vector<std::int64_t> cell_counts(const kernel::IsolationModel& m, const Matrix& X) {
    check_interval(m, X);
    return cell_counts(m, X, 0, X.rows());
}

IntervalEmbedding embed_interval(const kernel::IsolationModel& m, const Matrix& X) {
    check_interval(m, X);
    auto counts = cell_counts(m, X);
    IntervalEmbedding e;
    e.count = X.rows();
    e.mean_feature.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        e.mean_feature[i] = static_cast<double>(counts[i]) / static_cast<double>(e.count);
    return e;
}

double idk_similarity(const kernel::IsolationModel& m, const Matrix& X, const Matrix& Y) {
    check_interval(m, X);
    check_interval(m, Y);
    auto cx = cell_counts(m, X);
    auto cy = cell_counts(m, Y);
    return cosine_from_dots(dot_i64(cx, cy), dot_i64(cx, cx), dot_i64(cy, cy));
}

double mmd_squared(const kernel::IsolationModel& m, const Matrix& X, const Matrix& Y) {
    check_interval(m, X);
    check_interval(m, Y);
    auto cx = cell_counts(m, X);
    auto cy = cell_counts(m, Y);
    const double nx = static_cast<double>(X.rows());
    const double ny = static_cast<double>(Y.rows());
    const double t = static_cast<double>(m.t);
    double v = static_cast<double>(dot_i64(cx, cx)) / (nx * nx * t) +
               static_cast<double>(dot_i64(cy, cy)) / (ny * ny * t) -
               2.0 * static_cast<double>(dot_i64(cx, cy)) / (nx * ny * t);
    return v < 0.0 ? 0.0 : v;
}

PointKernelFamily parse_kernel_family(const std::string& name) {
    if (name == "gaussian") return PointKernelFamily::gaussian;
    if (name == "laplacian") return PointKernelFamily::laplacian;
    if (name == "chi2") return PointKernelFamily::chi2;
    if (name == "polynomial") return PointKernelFamily::polynomial;
    if (name == "sigmoid") return PointKernelFamily::sigmoid;
    throw std::invalid_argument("unknown kernel family: " + name);
}

std::string kernel_family_name(PointKernelFamily f) {
    switch (f) {
        case PointKernelFamily::gaussian: return "gaussian";
        case PointKernelFamily::laplacian: return "laplacian";
        case PointKernelFamily::chi2: return "chi2";
        case PointKernelFamily::polynomial: return "polynomial";
        case PointKernelFamily::sigmoid: return "sigmoid";
    }
    throw std::logic_error("unreachable");
}

double point_kernel_eval(const PointKernelSpec& spec, std::span<const double> x,
                         std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("point dimensions differ");
    switch (spec.family) {
        case PointKernelFamily::gaussian:
            return std::exp(-spec.gamma * l2_distance2(x, y));
        case PointKernelFamily::laplacian:
            return std::exp(-spec.gamma * l1_distance(x, y));
        case PointKernelFamily::chi2: {
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                if (x[k] < 0.0 || y[k] < 0.0)
                    throw std::invalid_argument("chi2 kernel requires nonnegative inputs");
                double sum = x[k] + y[k];
                if (sum > 0.0) {
                    double d = x[k] - y[k];
                    s += d * d / sum;
                }
            }
            return std::exp(-spec.gamma * s);
        }
        case PointKernelFamily::polynomial:
            if (spec.degree < 1)
                throw std::invalid_argument("polynomial degree must be at least 1");
            return std::pow(spec.gamma * dot(x, y) + spec.coef0, spec.degree);
        case PointKernelFamily::sigmoid:
            return std::tanh(spec.gamma * dot(x, y) + spec.coef0);
    }
    throw std::logic_error("unreachable");
}

double gdk_cross(const PointKernelSpec& spec, const Matrix& X, const Matrix& Y) {
    if (X.empty() || Y.empty())
        throw std::invalid_argument("distributional kernel of an empty interval");
    if (X.cols() != Y.cols()) throw std::invalid_argument("interval dimensions differ");
    double s = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < Y.rows(); ++j)
            s += point_kernel_eval(spec, X.row(i), Y.row(j));
    return s / (static_cast<double>(X.rows()) * static_cast<double>(Y.rows()));
}

double gdk_similarity(const Matrix& X, const Matrix& Y, const PointKernelSpec& spec) {
    double kxx = gdk_cross(spec, X, X);
    double kyy = gdk_cross(spec, Y, Y);
    if (kxx <= 0.0 || kyy <= 0.0)
        throw std::invalid_argument("self-similarity must be positive to normalise");
    double s = gdk_cross(spec, X, Y) / std::sqrt(kxx * kyy);
    if (spec.family == PointKernelFamily::sigmoid) return s;  // may be negative
    return std::clamp(s, 0.0, 1.0);
}

double mmd_squared(const Matrix& X, const Matrix& Y, const PointKernelSpec& spec) {
    double v = gdk_cross(spec, X, X) + gdk_cross(spec, Y, Y) - 2.0 * gdk_cross(spec, X, Y);
    return clamp_mmd(v, spec.family);
}

double median_heuristic_gamma(const Matrix& data, std::uint64_t seed,
                              std::size_t max_sample) {
    if (data.empty()) throw std::invalid_argument("median heuristic on empty data");
    const std::size_t n = data.rows();
    std::vector<std::uint32_t> rows;
    if (n <= max_sample) {
        rows.resize(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
    } else {
        Rng rng(derive_seed(seed, 0x6D656469616EULL));
        rows = sample_without_replacement(n, max_sample, rng);
    }
    std::vector<double> dists;
    dists.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            double d2 = l2_distance2(data.row(rows[i]), data.row(rows[j]));
            if (d2 > 0.0) dists.push_back(std::sqrt(d2));
        }
    if (dists.empty()) return 1.0;
    std::sort(dists.begin(), dists.end());
    std::size_t half = dists.size() / 2;
    double median = (dists.size() % 2 == 1)
                        ? dists[half]
                        : 0.5 * (dists[half - 1] + dists[half]);
    if (median <= 0.0) return 1.0;
    return 1.0 / (2.0 * median * median);
}

PointKernelSpec resolve_kernel_spec(PointKernelSpec spec, const Matrix& data,
                                    std::uint64_t seed) {
    if (spec.gamma >= 0.0) return spec;
    switch (spec.family) {
        case PointKernelFamily::gaussian:
            spec.gamma = median_heuristic_gamma(data, seed);
            break;
        case PointKernelFamily::laplacian: {
            // Same heuristic scale, expressed for an L1 exponent.
            double g = median_heuristic_gamma(data, seed);
            spec.gamma = std::sqrt(2.0 * g);
            break;
        }
        case PointKernelFamily::chi2:
            spec.gamma = 1.0;
            break;
        case PointKernelFamily::polynomial:
        case PointKernelFamily::sigmoid:
            spec.gamma = 1.0 / static_cast<double>(data.cols());
            break;
    }
    return spec;
}

}  // namespace icid::embedding
