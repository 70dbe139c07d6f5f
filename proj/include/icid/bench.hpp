#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace icid::bench {

struct BenchRow {
    std::size_t n{};
    double offline_seconds{};
    double online_step_seconds{};  // mean per step
    std::size_t online_steps{};
};

struct BenchResult {
    std::vector<BenchRow> rows;
    double r_squared{};          // affine fit of offline time vs n
    double max_doubling_factor{};  // max ratio of consecutive offline times
    double online_step_spread{};   // max/min of mean per-step times
};

// Times the offline pipeline (full psi grid) and the online loop on synthetic
// streams of the given sizes. The online loop uses a fixed-size reference
// (half of the smallest stream) and a fixed psi of 16 so that its per-step
// cost is comparable across stream lengths.
BenchResult run_bench(const std::vector<std::size_t>& sizes, std::size_t w,
                      const std::vector<std::size_t>& psi_list, std::size_t t,
                      std::uint64_t seed);

std::string format_table(const BenchResult& result);

}  // namespace icid::bench
