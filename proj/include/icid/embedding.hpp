#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "icid/kernel.hpp"
#include "icid/matrix.hpp"

namespace icid::embedding {

// Mean of the binary point features over an interval: a dense vector of
// length t*psi whose block for each partitioning sums to 1.
struct IntervalEmbedding {
    std::vector<double> mean_feature;
    std::size_t count{};
};

// Per-cell occupancy counts for the rows of X, laid out partitioning-major
// (block p covers [p*psi, (p+1)*psi)). Integer counts keep every downstream
// reduction exact, which is what makes the parallel paths bit-identical to
// the serial reference.
std::vector<std::int64_t> cell_counts(const kernel::IsolationModel& m, const Matrix& X);

// Same, restricted to rows [row_begin, row_end) without copying them out.
std::vector<std::int64_t> cell_counts(const kernel::IsolationModel& m, const Matrix& X,
                                      std::size_t row_begin, std::size_t row_end);

// Cosine of two count vectors from their integer dot products; exactly 1 for
// identical counts, clamped to [0, 1] otherwise.
double cosine_from_dots(std::int64_t dxy, std::int64_t dxx, std::int64_t dyy);

IntervalEmbedding embed_interval(const kernel::IsolationModel& m, const Matrix& X);

// Cosine-normalised similarity of the two interval embeddings, in [0, 1].
double idk_similarity(const kernel::IsolationModel& m, const Matrix& X, const Matrix& Y);

// Squared kernel mean discrepancy under the isolation kernel (unnormalised,
// includes the 1/t factor of the point kernel).
double mmd_squared(const kernel::IsolationModel& m, const Matrix& X, const Matrix& Y);

enum class PointKernelFamily { gaussian, laplacian, chi2, polynomial, sigmoid };

struct PointKernelSpec {
    PointKernelFamily family = PointKernelFamily::gaussian;
    double gamma = -1.0;  // < 0 requests the median heuristic where applicable
    double coef0 = 1.0;
    int degree = 3;
};

PointKernelFamily parse_kernel_family(const std::string& name);
std::string kernel_family_name(PointKernelFamily f);

double point_kernel_eval(const PointKernelSpec& spec, std::span<const double> x,
                         std::span<const double> y);

// Mean pairwise kernel value between the rows of X and Y (unnormalised
// distributional kernel).
double gdk_cross(const PointKernelSpec& spec, const Matrix& X, const Matrix& Y);

// Cosine-normalised distributional similarity.
double gdk_similarity(const Matrix& X, const Matrix& Y, const PointKernelSpec& spec);

double mmd_squared(const Matrix& X, const Matrix& Y, const PointKernelSpec& spec);

// gamma = 1 / (2 * median^2) of pairwise distances over at most `max_sample`
// rows drawn deterministically from `seed`. Falls back to 1.0 when every
// sampled distance is zero.
double median_heuristic_gamma(const Matrix& data, std::uint64_t seed,
                              std::size_t max_sample = 500);

// Fills in spec.gamma for the families that default to the median heuristic.
PointKernelSpec resolve_kernel_spec(PointKernelSpec spec, const Matrix& data,
                                    std::uint64_t seed);

}  // namespace icid::embedding
