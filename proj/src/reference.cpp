#include "icid/reference.hpp"

#include <limits>
#include <stdexcept>

namespace icid::reference {

namespace {

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

std::size_t nearest_center(const kernel::Partitioning& p, std::span<const double> x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.centers.rows(); ++j) {
        double d = squared_distance(p.centers.row(j), x);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

}  // namespace

kernel::IsolationModel build_model(const Matrix& data, std::size_t psi, std::size_t t,
                                   std::uint64_t seed) {
    if (data.empty()) throw std::invalid_argument("cannot fit a model on empty data");
    if (t == 0) throw std::invalid_argument("t must be positive");
    if (psi == 0) throw std::invalid_argument("psi must be positive");
    if (psi > data.rows()) throw std::invalid_argument("insufficient data for subsample");
    kernel::IsolationModel m;
    m.psi = psi;
    m.t = t;
    m.dim = data.cols();
    m.seed = seed;
    m.partitionings.resize(t);
    for (std::size_t i = 0; i < t; ++i) {
        Rng rng(derive_seed(seed, i));
        m.partitionings[i] = kernel::sample_partitioning(data, psi, rng);
        m.partitionings[i].index = i;
    }
    return m;
}

std::vector<std::int64_t> cell_counts(const kernel::IsolationModel& m, const Matrix& X) {
    std::vector<std::int64_t> counts(m.t * m.psi, 0);
    for (std::size_t p = 0; p < m.t; ++p)
        for (std::size_t r = 0; r < X.rows(); ++r)
            ++counts[p * m.psi + nearest_center(m.partitionings[p], X.row(r))];
    return counts;
}

detector::ScoreSeries score_series(const Matrix& data, std::size_t w, std::size_t psi,
                                   std::size_t t, std::uint64_t seed) {
    if (w == 0) throw std::invalid_argument("window must be positive");
    const std::size_t n_intervals = data.rows() / w;
    if (n_intervals < 2) throw std::invalid_argument("need at least two intervals");
    auto model = build_model(data, psi, t, seed);

    detector::ScoreSeries series;
    series.window = w;
    series.psi = psi;
    series.scoring = detector::Scoring::icid;
    series.scores.assign(n_intervals, 0.0);

    std::vector<std::int64_t> prev, cur;
    std::int64_t prev_xx = 0;
    for (std::size_t i = 0; i < n_intervals; ++i) {
        cur = cell_counts(model, data.slice_rows(i * w, (i + 1) * w));
        std::int64_t xx = 0, xy = 0;
        for (std::size_t c = 0; c < cur.size(); ++c) {
            xx += cur[c] * cur[c];
            if (i > 0) xy += prev[c] * cur[c];
        }
        if (i > 0)
            series.scores[i] = 1.0 - embedding::cosine_from_dots(xy, prev_xx, xx);
        prev = cur;
        prev_xx = xx;
    }
    return series;
}

}  // namespace icid::reference
