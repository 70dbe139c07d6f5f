#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icid/data.hpp"
#include "icid/embedding.hpp"
#include "icid/instability.hpp"
#include "icid/kernel.hpp"
#include "icid/matrix.hpp"

namespace icid::detector {

enum class Scoring { icid, icid_mmd, gcid_mmd };

Scoring parse_scoring(const std::string& name);
std::string scoring_name(Scoring s);

// Dissimilarity of each non-overlapping interval to its predecessor. The
// first interval has no predecessor and scores 0 by convention.
struct ScoreSeries {
    std::vector<double> scores;
    std::size_t window{};
    std::size_t psi{};  // 0 when the scoring does not use an isolation model
    Scoring scoring = Scoring::icid;
};

struct DetectionResult {
    ScoreSeries series;
    std::size_t psi_star{};
    double alpha{};
    double tau{};
    std::vector<std::size_t> flagged;  // interval indices, strictly above tau
};

// [start, end) row ranges of the floor(n/w) full windows; the remainder is
// dropped.
std::vector<std::pair<std::size_t, std::size_t>> split_intervals(std::size_t n,
                                                                 std::size_t w);

ScoreSeries score_series(const Matrix& data, std::size_t w, std::size_t psi,
                         std::size_t t, std::uint64_t seed, Scoring scoring,
                         const embedding::PointKernelSpec* kernel_spec = nullptr);

// Evaluates the full candidate grid and keeps the psi with the lowest
// instability of its score series; ties go to the smallest psi.
std::pair<std::size_t, ScoreSeries> select_psi(const Matrix& data, std::size_t w,
                                               std::vector<std::size_t> psi_list,
                                               std::size_t t, std::uint64_t seed,
                                               const InstabilityMeasure& measure,
                                               Scoring scoring = Scoring::icid);

// mu + alpha * sigma with population sigma.
double threshold(std::span<const double> scores, double alpha);

// Interval indices j >= 1 with scores[j] strictly above tau.
std::vector<std::size_t> flags_above(std::span<const double> scores, double tau);

DetectionResult detect_offline(const Matrix& data, std::size_t w,
                               const std::vector<std::size_t>& psi_list, double alpha,
                               std::size_t t, std::uint64_t seed,
                               const InstabilityMeasure& measure,
                               Scoring scoring = Scoring::icid,
                               const embedding::PointKernelSpec* kernel_spec = nullptr);

// Rolling buffer of the latest k points. Rows live in a fixed-capacity ring;
// the physical storage order is what the model sampler sees, which keeps
// rebuilds deterministic for identical buffer contents.
class OnlineState {
public:
    OnlineState(Matrix storage, std::size_t w, std::size_t psi_star, std::size_t t,
                std::uint64_t seed, InstabilityMeasure measure, data::NormParams norm,
                double alpha, double tau_ref, ScoreSeries reference_series);

    std::size_t psi_star() const { return psi_star_; }
    std::size_t window() const { return w_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return storage_.rows(); }
    double reference_threshold() const { return tau_ref_; }
    const ScoreSeries& reference_series() const { return reference_series_; }
    const data::NormParams& norm() const { return norm_; }
    const Matrix& buffer() const { return storage_; }

    // Points are buffered as given. Scaling is the caller's concern: a raw
    // stream should be passed through apply_norm(norm()) first so that every
    // step sees the reference scale.
    void append(const Matrix& new_points);

    // Row range [size-2w, size) of the buffer in time order.
    Matrix last_two_intervals() const;

    std::uint64_t seed() const { return seed_; }
    std::size_t t() const { return t_; }

private:
    Matrix storage_;        // grows to capacity, then wraps
    std::size_t capacity_;
    std::size_t head_ = 0;  // oldest row once the ring is full
    std::size_t w_;
    std::size_t psi_star_;
    std::size_t t_;
    std::uint64_t seed_;
    InstabilityMeasure measure_;
    data::NormParams norm_;
    double alpha_;
    double tau_ref_;
    ScoreSeries reference_series_;

    std::size_t physical(std::size_t logical) const;
};

// Runs offline selection on the reference to freeze psi*, records the
// reference min/max as the scale for later raw input, and seeds the buffer
// with the reference as given (k equals the reference length). The reference
// itself is not rescaled here; normalise it beforehand if desired.
OnlineState init_online(const Matrix& reference, std::size_t w,
                        const std::vector<std::size_t>& psi_list, double alpha,
                        std::size_t t, std::uint64_t seed,
                        const InstabilityMeasure& measure);

// Appends new points, rebuilds the model from the buffer and scores the last
// interval against its predecessor.
double online_step(OnlineState& state, const Matrix& new_points);

// Point-level variant: for each t-index i in [w, n-w) the score compares the
// w points before i against the w points from i on, under one model fitted to
// all of data. The first and last w points score 0.
std::vector<double> score_points_cpd(const Matrix& data, std::size_t w, std::size_t psi,
                                     std::size_t t, std::uint64_t seed);

}  // namespace icid::detector
