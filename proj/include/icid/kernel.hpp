#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "icid/matrix.hpp"
#include "icid/rng.hpp"

namespace icid::kernel {

// One Voronoi partitioning: psi centers drawn from the fitting data without
// replacement. A point belongs to the cell of its nearest center (squared
// Euclidean distance, ties resolved to the lowest center index).
struct Partitioning {
    Matrix centers;      // psi x d
    std::size_t index{}; // ordinal within the owning model
};

struct IsolationModel {
    std::vector<Partitioning> partitionings; // size t
    std::size_t psi{};
    std::size_t t{};
    std::size_t dim{};
    std::uint64_t seed{};
};

// Active cell per partitioning; exactly t entries, each in [0, psi).
struct PointFeature {
    std::vector<std::uint32_t> active_cells;
};

Partitioning sample_partitioning(const Matrix& data, std::size_t psi, Rng& rng);

// t partitionings sampled independently; partitioning i uses the sub-seed
// derived from (seed, i), so the result does not depend on thread count.
IsolationModel build_model(const Matrix& data, std::size_t psi, std::size_t t,
                           std::uint64_t seed);

std::size_t assign_cell(const Partitioning& p, std::span<const double> x);

PointFeature feature_map(const IsolationModel& m, std::span<const double> x);

// Fraction of partitionings in which x and y share a cell; values are
// multiples of 1/t in [0, 1].
double point_kernel(const IsolationModel& m, std::span<const double> x,
                    std::span<const double> y);

// Number of single-point cell assignments performed so far (batch routines
// count each row once). Used by tests that pin down asymptotic cost.
std::uint64_t assign_count();
void reset_assign_count();

namespace detail {
// Uncounted nearest-center search for the batch loops, which bump the
// assignment counter once per batch instead of per call.
std::size_t nearest_center_impl(const Partitioning& p, std::span<const double> x);
void add_assigns(std::uint64_t n);
}  // namespace detail

}  // namespace icid::kernel
