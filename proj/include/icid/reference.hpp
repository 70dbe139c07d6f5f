#pragma once

#include <cstdint>
#include <vector>

#include "icid/detector.hpp"
#include "icid/kernel.hpp"
#include "icid/matrix.hpp"

// Straight-line serial implementations of the hot kernels. They are the
// ground truth the OpenMP paths are tested against (results must match
// bit-for-bit) and the baseline for the kernel benchmark.
namespace icid::reference {

kernel::IsolationModel build_model(const Matrix& data, std::size_t psi, std::size_t t,
                                   std::uint64_t seed);

std::vector<std::int64_t> cell_counts(const kernel::IsolationModel& m, const Matrix& X);

detector::ScoreSeries score_series(const Matrix& data, std::size_t w, std::size_t psi,
                                   std::size_t t, std::uint64_t seed);

}  // namespace icid::reference
