#include "icid/kernel.hpp"

#include <atomic>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "icid/threading.hpp"

namespace icid::kernel {

namespace {

std::atomic<std::uint64_t> g_assign_count{0};

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

// Nearest center by squared Euclidean distance; a strict comparison keeps the
// lowest index on ties.
std::size_t nearest_center(const Partitioning& p, std::span<const double> x) {
    const std::size_t psi = p.centers.rows();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < psi; ++j) {
        double d = squared_distance(p.centers.row(j), x);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

}  // namespace

std::uint64_t assign_count() { return g_assign_count.load(std::memory_order_relaxed); }
void reset_assign_count() { g_assign_count.store(0, std::memory_order_relaxed); }

namespace detail {
std::size_t nearest_center_impl(const Partitioning& p, std::span<const double> x) {
    return nearest_center(p, x);
}
void add_assigns(std::uint64_t n) { g_assign_count.fetch_add(n, std::memory_order_relaxed); }
}  // namespace detail

Partitioning sample_partitioning(const Matrix& data, std::size_t psi, Rng& rng) {
    if (psi == 0) throw std::invalid_argument("psi must be positive");
    if (psi > data.rows()) throw std::invalid_argument("insufficient data for subsample");
    auto idx = sample_without_replacement(data.rows(), psi, rng);
    Partitioning p;
    p.centers = Matrix(psi, data.cols());
    for (std::size_t i = 0; i < psi; ++i) {
        auto src = data.row(idx[i]);
        std::copy(src.begin(), src.end(), p.centers.row(i).begin());
    }
    return p;
}

IsolationModel build_model(const Matrix& data, std::size_t psi, std::size_t t,
                           std::uint64_t seed) {
    if (data.empty()) throw std::invalid_argument("cannot fit a model on empty data");
    if (t == 0) throw std::invalid_argument("t must be positive");
    if (psi == 0) throw std::invalid_argument("psi must be positive");
    if (psi > data.rows()) throw std::invalid_argument("insufficient data for subsample");

    IsolationModel m;
    m.psi = psi;
    m.t = t;
    m.dim = data.cols();
    m.seed = seed;
    m.partitionings.resize(t);
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(t); ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        m.partitionings[i] = sample_partitioning(data, psi, rng);
        m.partitionings[i].index = static_cast<std::size_t>(i);
    }
    return m;
}

std::size_t assign_cell(const Partitioning& p, std::span<const double> x) {
    if (x.size() != p.centers.cols())
        throw std::invalid_argument("point dimension does not match the model");
    g_assign_count.fetch_add(1, std::memory_order_relaxed);
    return nearest_center(p, x);
}

PointFeature feature_map(const IsolationModel& m, std::span<const double> x) {
    if (x.size() != m.dim)
        throw std::invalid_argument("point dimension does not match the model");
    PointFeature f;
    f.active_cells.resize(m.t);
    for (std::size_t p = 0; p < m.t; ++p)
        f.active_cells[p] = static_cast<std::uint32_t>(nearest_center(m.partitionings[p], x));
    g_assign_count.fetch_add(m.t, std::memory_order_relaxed);
    return f;
}

double point_kernel(const IsolationModel& m, std::span<const double> x,
                    std::span<const double> y) {
    PointFeature fx = feature_map(m, x);
    PointFeature fy = feature_map(m, y);
    std::size_t matches = 0;
    for (std::size_t p = 0; p < m.t; ++p)
        if (fx.active_cells[p] == fy.active_cells[p]) ++matches;
    return static_cast<double>(matches) / static_cast<double>(m.t);
}

}  // namespace icid::kernel
