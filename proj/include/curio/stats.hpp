#pragma once

#include <cstdint>
#include <vector>

namespace curio::harness {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper-tail probability of a chi-square variate.
double chi_square_sf(double x, double dof);

// Goodness-of-fit p-value for observed counts against expected cell
// probabilities (dof = cells - 1).
double chi_square_gof_p(const std::vector<std::uint64_t>& observed,
                        const std::vector<double>& expected_probs);

// Independence test p-value for a contingency table.
double chi_square_independence_p(const std::vector<std::vector<std::uint64_t>>& table);

struct MannWhitneyResult {
    double u = 0.0;  // U statistic of the first sample
    double p = 1.0;  // two-sided
    bool exact = false;
};

// Two-sided Mann-Whitney U test. Small samples get an exact permutation
// p-value (tie-safe); larger samples fall back to the normal approximation
// with tie correction.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

double median(std::vector<double> values);
// Interpolated quantile of a sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

} // namespace curio::harness
