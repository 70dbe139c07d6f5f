#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "icid/matrix.hpp"

namespace icid::data {

struct TimeSeries {
    Matrix values;
    std::vector<std::string> names;  // empty when the source had no header
};

struct NormParams {
    std::vector<double> min;
    std::vector<double> max;
};

// Ground-truth annotations: time indices of change points, and of injected
// point outliers. The two lists are disjoint.
struct Labels {
    std::vector<std::size_t> change_points;
    std::vector<std::size_t> outliers;
};

// Ordered key=value pairs echoed into output files as a leading "# ..."
// comment so that every artifact records how it was produced.
using Provenance = std::vector<std::pair<std::string, std::string>>;

// Numeric CSV. Lines starting with '#' are comments; a non-numeric first
// content row is treated as a header; ragged rows, non-numeric fields and
// NaNs are errors naming the offending line.
TimeSeries load_csv(const std::string& path);

void write_csv(const TimeSeries& ts, const std::string& path,
               const Provenance& provenance = {});

// Per-dimension extrema of the rows.
NormParams fit_norm(const Matrix& m);

// Per-dimension min-max scaling to [0, 1]; constant dimensions map to 0.
std::pair<TimeSeries, NormParams> minmax_normalize(const TimeSeries& ts);

// Same affine map as the fit, with results clamped to [0, 1] so that points
// outside the fitted range cannot escape the unit box.
Matrix apply_norm(const NormParams& params, const Matrix& points);

// One nonnegative index per line; an "o" suffix marks an outlier, e.g.
// "89 o". Lines starting with '#' are comments. Output lists are sorted and
// deduplicated.
Labels load_labels(const std::string& path);

void write_labels(const Labels& labels, const std::string& path,
                  const Provenance& provenance = {});

// Five Gaussian blocks with scales 1, 2.2, 4.3, 48.3, 28.3 and five point
// outliers injected at fixed positions, each 6 local scales from the mean.
// Change points sit at the block boundaries.
std::pair<TimeSeries, Labels> gen_s1(std::uint64_t seed,
                                     std::size_t points_per_block = 300);

// Three bivariate Gaussian blocks whose covariance structure changes at the
// block boundaries.
std::pair<TimeSeries, Labels> gen_s2(std::uint64_t seed,
                                     std::size_t points_per_block = 1000);

}  // namespace icid::data
