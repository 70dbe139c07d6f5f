#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "icid/kernel.hpp"
#include "icid/matrix.hpp"
#include "icid/rng.hpp"

// Shared test utilities. The oracle functions re-derive results from first
// principles (linear scans, explicit double sums) on purpose: they must stay
// independent of the library's own code paths.
namespace testutil {

inline icid::Matrix random_matrix(icid::Rng& rng, std::size_t n, std::size_t d,
                                  double lo = 0.0, double hi = 1.0) {
    icid::Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = lo + (hi - lo) * rng.next_double();
    return m;
}

inline std::size_t oracle_nearest(const icid::Matrix& centers, std::span<const double> x) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        double d = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            double diff = centers(c, k) - x[k];
            d += diff * diff;
        }
        if (best_d < 0.0 || d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Fraction of partitionings whose Voronoi cell contains both points.
inline double oracle_point_kernel(const icid::kernel::IsolationModel& m,
                                  std::span<const double> x, std::span<const double> y) {
    std::size_t matches = 0;
    for (const auto& p : m.partitionings)
        if (oracle_nearest(p.centers, x) == oracle_nearest(p.centers, y)) ++matches;
    return static_cast<double>(matches) / static_cast<double>(m.t);
}

// Mean pairwise point-kernel value between the rows of X and Y.
inline double oracle_idk_cross(const icid::kernel::IsolationModel& m,
                               const icid::Matrix& X, const icid::Matrix& Y) {
    double s = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < Y.rows(); ++j)
            s += oracle_point_kernel(m, X.row(i), Y.row(j));
    return s / (static_cast<double>(X.rows()) * static_cast<double>(Y.rows()));
}

}  // namespace testutil
