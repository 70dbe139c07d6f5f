#include "icid/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "icid/threading.hpp"

namespace icid::detector {

Scoring parse_scoring(const std::string& name) {
    if (name == "icid") return Scoring::icid;
    if (name == "icid_mmd") return Scoring::icid_mmd;
    if (name == "gcid_mmd") return Scoring::gcid_mmd;
    throw std::invalid_argument("unknown scoring: " + name);
}

std::string scoring_name(Scoring s) {
    switch (s) {
        case Scoring::icid: return "icid";
        case Scoring::icid_mmd: return "icid_mmd";
        case Scoring::gcid_mmd: return "gcid_mmd";
    }
    throw std::logic_error("unreachable");
}

std::vector<std::pair<std::size_t, std::size_t>> split_intervals(std::size_t n,
                                                                 std::size_t w) {
    if (w == 0) throw std::invalid_argument("window must be positive");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t count = n / w;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.emplace_back(i * w, (i + 1) * w);
    return out;
}

namespace {

// Interval scores under the isolation kernel. Partitionings are processed
// independently; per-interval cell counts stay integer, and the per
// partitioning partial dot products are integers too, so the reduction is
// exact and independent of thread count.
std::vector<double> isolation_interval_scores(const Matrix& data, std::size_t w,
                                              std::size_t psi, std::size_t t,
                                              std::uint64_t seed, bool as_mmd) {
    const std::size_t n_intervals = data.rows() / w;
    auto model = kernel::build_model(data, psi, t, seed);

    std::vector<std::int64_t> sxx(t * n_intervals, 0);
    std::vector<std::int64_t> sxy(t * n_intervals, 0);
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t p = 0; p < static_cast<std::int64_t>(t); ++p) {
        const auto& part = model.partitionings[p];
        std::vector<std::int64_t> prev(psi, 0), cur(psi, 0);
        for (std::size_t i = 0; i < n_intervals; ++i) {
            std::fill(cur.begin(), cur.end(), 0);
            for (std::size_t r = i * w; r < (i + 1) * w; ++r)
                ++cur[kernel::detail::nearest_center_impl(part, data.row(r))];
            std::int64_t xx = 0, xy = 0;
            for (std::size_t c = 0; c < psi; ++c) {
                xx += cur[c] * cur[c];
                xy += prev[c] * cur[c];
            }
            sxx[static_cast<std::size_t>(p) * n_intervals + i] = xx;
            if (i > 0) sxy[static_cast<std::size_t>(p) * n_intervals + i] = xy;
            std::swap(prev, cur);
        }
    }
    kernel::detail::add_assigns(static_cast<std::uint64_t>(n_intervals) * w * t);

    std::vector<std::int64_t> total_xx(n_intervals, 0), total_xy(n_intervals, 0);
    for (std::size_t p = 0; p < t; ++p)
        for (std::size_t i = 0; i < n_intervals; ++i) {
            total_xx[i] += sxx[p * n_intervals + i];
            total_xy[i] += sxy[p * n_intervals + i];
        }

    std::vector<double> scores(n_intervals, 0.0);
    const double w2t = static_cast<double>(w) * static_cast<double>(w) *
                       static_cast<double>(t);
    for (std::size_t i = 1; i < n_intervals; ++i) {
        if (as_mmd) {
            // ||mean_prev - mean_cur||^2 / t, exact in the integer sums.
            std::int64_t sq = total_xx[i - 1] + total_xx[i] - 2 * total_xy[i];
            scores[i] = static_cast<double>(sq) / w2t;
        } else {
            scores[i] = 1.0 - embedding::cosine_from_dots(total_xy[i], total_xx[i - 1],
                                                          total_xx[i]);
        }
    }
    return scores;
}

std::vector<double> gdk_interval_scores(const Matrix& data, std::size_t w,
                                        const embedding::PointKernelSpec& spec) {
    const std::size_t n_intervals = data.rows() / w;
    std::vector<Matrix> intervals(n_intervals);
    for (std::size_t i = 0; i < n_intervals; ++i)
        intervals[i] = data.slice_rows(i * w, (i + 1) * w);

    std::vector<double> self(n_intervals, 0.0), cross(n_intervals, 0.0);
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_intervals); ++i) {
        self[i] = embedding::gdk_cross(spec, intervals[i], intervals[i]);
        if (i > 0) cross[i] = embedding::gdk_cross(spec, intervals[i - 1], intervals[i]);
    }

    std::vector<double> scores(n_intervals, 0.0);
    for (std::size_t i = 1; i < n_intervals; ++i) {
        double v = self[i - 1] + self[i] - 2.0 * cross[i];
        if (v < 0.0 && spec.family != embedding::PointKernelFamily::sigmoid) v = 0.0;
        scores[i] = v;
    }
    return scores;
}

}  // namespace

ScoreSeries score_series(const Matrix& data, std::size_t w, std::size_t psi,
                         std::size_t t, std::uint64_t seed, Scoring scoring,
                         const embedding::PointKernelSpec* kernel_spec) {
    if (w == 0) throw std::invalid_argument("window must be positive");
    if (data.rows() / w < 2) throw std::invalid_argument("need at least two intervals");

    ScoreSeries series;
    series.window = w;
    series.scoring = scoring;
    if (scoring == Scoring::gcid_mmd) {
        embedding::PointKernelSpec spec =
            kernel_spec ? *kernel_spec : embedding::PointKernelSpec{};
        spec = embedding::resolve_kernel_spec(spec, data, seed);
        series.psi = 0;
        series.scores = gdk_interval_scores(data, w, spec);
    } else {
        series.psi = psi;
        series.scores = isolation_interval_scores(data, w, psi, t, seed,
                                                  scoring == Scoring::icid_mmd);
    }
    return series;
}

std::pair<std::size_t, ScoreSeries> select_psi(const Matrix& data, std::size_t w,
                                               std::vector<std::size_t> psi_list,
                                               std::size_t t, std::uint64_t seed,
                                               const InstabilityMeasure& measure,
                                               Scoring scoring) {
    if (scoring == Scoring::gcid_mmd)
        throw std::invalid_argument("selection requires an isolation-kernel scoring");
    if (psi_list.empty()) throw std::invalid_argument("psi_list must be nonempty");
    std::sort(psi_list.begin(), psi_list.end());
    psi_list.erase(std::unique(psi_list.begin(), psi_list.end()), psi_list.end());

    std::size_t best_psi = 0;
    ScoreSeries best_series;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t psi : psi_list) {
        ScoreSeries series = score_series(data, w, psi, t, seed, scoring, nullptr);
        double value = instability(series.scores, measure);
        if (value < best_value) {  // strict: ties keep the smallest psi
            best_value = value;
            best_psi = psi;
            best_series = std::move(series);
        }
    }
    return {best_psi, std::move(best_series)};
}

double threshold(std::span<const double> scores, double alpha) {
    if (scores.empty()) throw std::invalid_argument("threshold of an empty series");
    double sd = std::sqrt(population_variance(scores));
    double mean = 0.0;
    for (double v : scores) mean += v;
    mean /= static_cast<double>(scores.size());
    return mean + alpha * sd;
}

std::vector<std::size_t> flags_above(std::span<const double> scores, double tau) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > tau) out.push_back(i);
    return out;
}

DetectionResult detect_offline(const Matrix& data, std::size_t w,
                               const std::vector<std::size_t>& psi_list, double alpha,
                               std::size_t t, std::uint64_t seed,
                               const InstabilityMeasure& measure, Scoring scoring,
                               const embedding::PointKernelSpec* kernel_spec) {
    DetectionResult result;
    if (scoring == Scoring::gcid_mmd) {
        result.series = score_series(data, w, 0, t, seed, scoring, kernel_spec);
        result.psi_star = 0;
    } else {
        auto [psi_star, series] = select_psi(data, w, psi_list, t, seed, measure, scoring);
        result.series = std::move(series);
        result.psi_star = psi_star;
    }
    result.alpha = alpha;
    result.tau = threshold(result.series.scores, alpha);
    result.flagged = flags_above(result.series.scores, result.tau);
    return result;
}

OnlineState::OnlineState(Matrix storage, std::size_t w, std::size_t psi_star,
                         std::size_t t, std::uint64_t seed, InstabilityMeasure measure,
                         data::NormParams norm, double alpha, double tau_ref,
                         ScoreSeries reference_series)
    : storage_(std::move(storage)),
      capacity_(storage_.rows()),
      w_(w),
      psi_star_(psi_star),
      t_(t),
      seed_(seed),
      measure_(measure),
      norm_(std::move(norm)),
      alpha_(alpha),
      tau_ref_(tau_ref),
      reference_series_(std::move(reference_series)) {}

std::size_t OnlineState::physical(std::size_t logical) const {
    if (storage_.rows() < capacity_) return logical;
    return (head_ + logical) % capacity_;
}

void OnlineState::append(const Matrix& new_points) {
    if (new_points.cols() != storage_.cols())
        throw std::invalid_argument("new points dimension does not match the buffer");
    for (std::size_t r = 0; r < new_points.rows(); ++r) {
        if (storage_.rows() < capacity_) {
            storage_.push_row(new_points.row(r));
        } else {
            auto dst = storage_.row(head_);
            auto src = new_points.row(r);
            std::copy(src.begin(), src.end(), dst.begin());
            head_ = (head_ + 1) % capacity_;
        }
    }
}

Matrix OnlineState::last_two_intervals() const {
    const std::size_t size = storage_.rows();
    if (size < 2 * w_)
        throw std::runtime_error("warming up: buffer holds fewer than two intervals");
    Matrix out(2 * w_, storage_.cols());
    for (std::size_t i = 0; i < 2 * w_; ++i) {
        auto src = storage_.row(physical(size - 2 * w_ + i));
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

OnlineState init_online(const Matrix& reference, std::size_t w,
                        const std::vector<std::size_t>& psi_list, double alpha,
                        std::size_t t, std::uint64_t seed,
                        const InstabilityMeasure& measure) {
    if (reference.rows() / w < 2)
        throw std::invalid_argument("reference must span at least two intervals");
    data::NormParams norm = data::fit_norm(reference);
    auto [psi_star, series] = select_psi(reference, w, psi_list, t, seed, measure);
    double tau_ref = threshold(series.scores, alpha);
    return OnlineState(Matrix(reference), w, psi_star, t, seed, measure, std::move(norm),
                       alpha, tau_ref, std::move(series));
}

double online_step(OnlineState& state, const Matrix& new_points) {
    if (new_points.empty()) throw std::invalid_argument("online step with no points");
    state.append(new_points);
    if (state.size() < 2 * state.window())
        throw std::runtime_error("warming up: buffer holds fewer than two intervals");
    auto model = kernel::build_model(state.buffer(), state.psi_star(), state.t(),
                                     state.seed());
    Matrix tail = state.last_two_intervals();
    auto cx = embedding::cell_counts(model, tail, 0, state.window());
    auto cy = embedding::cell_counts(model, tail, state.window(), 2 * state.window());
    std::int64_t dxy = 0, dxx = 0, dyy = 0;
    for (std::size_t i = 0; i < cx.size(); ++i) {
        dxy += cx[i] * cy[i];
        dxx += cx[i] * cx[i];
        dyy += cy[i] * cy[i];
    }
    return 1.0 - embedding::cosine_from_dots(dxy, dxx, dyy);
}

std::vector<double> score_points_cpd(const Matrix& data, std::size_t w, std::size_t psi,
                                     std::size_t t, std::uint64_t seed) {
    if (w == 0) throw std::invalid_argument("window must be positive");
    if (data.rows() < 2 * w + 1)
        throw std::invalid_argument("series too short for point-level scoring");
    auto model = kernel::build_model(data, psi, t, seed);
    const std::size_t n = data.rows();
    std::vector<double> scores(n, 0.0);
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t i = static_cast<std::int64_t>(w);
         i < static_cast<std::int64_t>(n - w); ++i) {
        auto idx = static_cast<std::size_t>(i);
        auto cx = embedding::cell_counts(model, data, idx - w, idx);
        auto cy = embedding::cell_counts(model, data, idx, idx + w);
        std::int64_t dxy = 0, dxx = 0, dyy = 0;
        for (std::size_t c = 0; c < cx.size(); ++c) {
            dxy += cx[c] * cy[c];
            dxx += cx[c] * cx[c];
            dyy += cy[c] * cy[c];
        }
        scores[idx] = 1.0 - embedding::cosine_from_dots(dxy, dxx, dyy);
    }
    return scores;
}

}  // namespace icid::detector
