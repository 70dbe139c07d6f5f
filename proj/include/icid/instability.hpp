#pragma once

#include <span>
#include <string>

namespace icid::detector {

enum class Instability { approx_entropy, variance, gini };

Instability parse_measure(const std::string& name);
std::string measure_name(Instability m);

struct InstabilityMeasure {
    Instability kind = Instability::approx_entropy;
    int apen_m = 2;            // embedding length
    double apen_r_factor = 0.2;  // tolerance as a fraction of the std deviation
};

// Approximate entropy with self-matches included (Chebyshev distance between
// m-length windows). A constant series has entropy 0 by convention.
double approx_entropy(std::span<const double> s, int m, double r);

double population_variance(std::span<const double> s);

// Gini coefficient of a nonnegative series; 0 when the mean is 0.
double gini_coefficient(std::span<const double> s);

double instability(std::span<const double> scores, const InstabilityMeasure& measure);

}  // namespace icid::detector
