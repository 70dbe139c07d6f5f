#include "icid/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "icid/data.hpp"
#include "icid/detector.hpp"

namespace icid::bench {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

BenchResult run_bench(const std::vector<std::size_t>& sizes, std::size_t w,
                      const std::vector<std::size_t>& psi_list, std::size_t t,
                      std::uint64_t seed) {
    if (sizes.size() < 2) throw std::invalid_argument("bench needs at least two sizes");
    detector::InstabilityMeasure measure;  // approximate entropy defaults
    BenchResult result;

    // The online leg holds the buffer and cell count fixed while the stream
    // grows, so the per-step cost depends on k, w, psi and t alone. k is half
    // of the smallest stream, rounded down to a whole number of intervals.
    const std::size_t min_n = *std::min_element(sizes.begin(), sizes.end());
    const std::size_t k = (min_n / 2 / w) * w;
    const std::size_t online_psi = 16;

    for (std::size_t n : sizes) {
        auto [ts, labels] = data::gen_s1(seed, n / 5);
        auto [scaled, params] = data::minmax_normalize(ts);

        BenchRow row;
        row.n = scaled.values.rows();

        double t0 = now_seconds();
        auto offline =
            detector::detect_offline(scaled.values, w, psi_list, 2.0, t, seed, measure);
        row.offline_seconds = now_seconds() - t0;

        // Online loop: the remainder past the fixed-size reference streams in
        // w-sized steps. Init (selection) is excluded from the per-step time.
        Matrix reference = scaled.values.slice_rows(0, k);
        auto state =
            detector::init_online(reference, w, {online_psi}, 2.0, t, seed, measure);
        std::size_t steps = (scaled.values.rows() - k) / w;
        double t1 = now_seconds();
        for (std::size_t s = 0; s < steps; ++s) {
            Matrix block = scaled.values.slice_rows(k + s * w, k + (s + 1) * w);
            detector::online_step(state, block);
        }
        double elapsed = now_seconds() - t1;
        row.online_steps = steps;
        row.online_step_seconds = steps > 0 ? elapsed / static_cast<double>(steps) : 0.0;
        (void)offline;
        result.rows.push_back(row);
    }

    // Affine least squares of offline time against n.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(result.rows.size());
    for (const auto& r : result.rows) {
        double x = static_cast<double>(r.n);
        sx += x;
        sy += r.offline_seconds;
        sxx += x * x;
        sxy += x * r.offline_seconds;
    }
    double denom = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / m;
    double ss_res = 0, ss_tot = 0, mean_y = sy / m;
    for (const auto& r : result.rows) {
        double fit = slope * static_cast<double>(r.n) + intercept;
        ss_res += (r.offline_seconds - fit) * (r.offline_seconds - fit);
        ss_tot += (r.offline_seconds - mean_y) * (r.offline_seconds - mean_y);
    }
    result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    result.max_doubling_factor = 0.0;
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        double ratio = result.rows[i].offline_seconds / result.rows[i - 1].offline_seconds;
        result.max_doubling_factor = std::max(result.max_doubling_factor, ratio);
    }

    double min_step = std::numeric_limits<double>::infinity(), max_step = 0.0;
    for (const auto& r : result.rows) {
        min_step = std::min(min_step, r.online_step_seconds);
        max_step = std::max(max_step, r.online_step_seconds);
    }
    result.online_step_spread = min_step > 0.0 ? max_step / min_step : 0.0;
    return result;
}

std::string format_table(const BenchResult& result) {
    std::ostringstream out;
    out << "       n   offline_s   online_step_ms   steps\n";
    char buf[128];
    for (const auto& r : result.rows) {
        std::snprintf(buf, sizeof(buf), "%8zu   %9.3f   %14.4f   %5zu\n", r.n,
                      r.offline_seconds, r.online_step_seconds * 1e3, r.online_steps);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "fit R^2 = %.4f, max consecutive ratio = %.2f, online spread = %.2f\n",
                  result.r_squared, result.max_doubling_factor, result.online_step_spread);
    out << buf;
    return out.str();
}

}  // namespace icid::bench
