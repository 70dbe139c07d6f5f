#include "icid/instability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace icid::detector {

Instability parse_measure(const std::string& name) {
    if (name == "approx_entropy" || name == "apen") return Instability::approx_entropy;
    if (name == "variance") return Instability::variance;
    if (name == "gini") return Instability::gini;
    throw std::invalid_argument("unknown instability measure: " + name);
}

std::string measure_name(Instability m) {
    switch (m) {
        case Instability::approx_entropy: return "approx_entropy";
        case Instability::variance: return "variance";
        case Instability::gini: return "gini";
    }
    throw std::logic_error("unreachable");
}

namespace {

// log of the fraction of m-windows within Chebyshev distance r of window i,
// self-match included.
double phi(std::span<const double> s, int m, double r) {
    const std::size_t nm = s.size() - static_cast<std::size_t>(m) + 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < nm; ++i) {
        std::size_t close = 0;
        for (std::size_t j = 0; j < nm; ++j) {
            double dist = 0.0;
            for (int k = 0; k < m; ++k)
                dist = std::max(dist, std::abs(s[i + k] - s[j + k]));
            if (dist <= r) ++close;
        }
        sum += std::log(static_cast<double>(close) / static_cast<double>(nm));
    }
    return sum / static_cast<double>(nm);
}

}  // namespace

double approx_entropy(std::span<const double> s, int m, double r) {
    if (m < 1) throw std::invalid_argument("approximate entropy needs m >= 1");
    if (s.size() < static_cast<std::size_t>(m) + 1)
        throw std::invalid_argument("approximate entropy needs at least m+1 values");
    if (r < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
    return phi(s, m, r) - phi(s, m + 1, r);
}

double population_variance(std::span<const double> s) {
    if (s.empty()) throw std::invalid_argument("variance of an empty series");
    // An identical-value series has variance 0 by definition; computing it
    // through the rounded mean would leave ~1e-33 of noise instead.
    if (std::all_of(s.begin(), s.end(), [&](double v) { return v == s[0]; })) return 0.0;
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    return var / static_cast<double>(s.size());
}

double gini_coefficient(std::span<const double> s) {
    if (s.empty()) throw std::invalid_argument("gini of an empty series");
    double total = 0.0;
    for (double v : s) {
        if (v < 0.0) throw std::invalid_argument("gini requires nonnegative values");
        total += v;
    }
    if (total <= 0.0) return 0.0;
    if (std::all_of(s.begin(), s.end(), [&](double v) { return v == s[0]; })) return 0.0;
    std::vector<double> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        weighted += static_cast<double>(i + 1) * sorted[i];
    return (2.0 * weighted - (n + 1.0) * total) / (n * total);
}

double instability(std::span<const double> scores, const InstabilityMeasure& measure) {
    switch (measure.kind) {
        case Instability::variance: {
            // Variance as a selection criterion has to be scale-free, like the
            // other two measures: raw variance would always prefer the psi
            // whose scores are uniformly closest to zero, regardless of shape.
            // Rescaling by the series maximum keeps only the relative spread.
            if (scores.empty()) throw std::invalid_argument("variance of an empty series");
            double peak = *std::max_element(scores.begin(), scores.end());
            if (peak <= 0.0) return 0.0;
            std::vector<double> scaled(scores.begin(), scores.end());
            for (double& v : scaled) v /= peak;
            return population_variance(scaled);
        }
        case Instability::gini:
            return gini_coefficient(scores);
        case Instability::approx_entropy: {
            double sd = std::sqrt(population_variance(scores));
            if (sd == 0.0) return 0.0;  // constant series carries no irregularity
            return approx_entropy(scores, measure.apen_m, measure.apen_r_factor * sd);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace icid::detector
