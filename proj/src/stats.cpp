#include "curio/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curio/errors.hpp"

namespace curio::harness {

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

std::uint64_t binomial_or_cap(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        if (result > cap) return cap + 1;
        result = result * (n - k + i) / i;
    }
    return result;
}

// Midranks of the combined sample; returns (ranks_a_sum as needed by caller).
std::vector<double> midranks(const std::vector<double>& combined) {
    const std::size_t n = combined.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return combined[i] < combined[j]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && combined[order[j + 1]] == combined[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0; // average of 1-based ranks
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

// Counts size-n subsets of `ranks` whose rank sum deviates from the null
// mean at least as much as `dev`.
void count_extreme_subsets(const std::vector<double>& ranks, std::size_t pick, std::size_t from,
                           double sum, std::size_t n, double mean_sum, double dev,
                           std::uint64_t& hits, std::uint64_t& total) {
    if (pick == 0) {
        ++total;
        if (std::fabs(sum - mean_sum) >= dev - 1e-9) ++hits;
        return;
    }
    if (ranks.size() - from < pick) return;
    // Prune nothing: sums are not monotone in index once ties enter; the
    // subset counts stay small enough to enumerate fully.
    count_extreme_subsets(ranks, pick - 1, from + 1, sum + ranks[from], n, mean_sum, dev, hits, total);
    count_extreme_subsets(ranks, pick, from + 1, sum, n, mean_sum, dev, hits, total);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("gamma_p domain: a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("gamma_q domain: a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_sf(double x, double dof) {
    if (dof <= 0.0) throw DomainError("chi-square dof must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(dof / 2.0, x / 2.0);
}

double chi_square_gof_p(const std::vector<std::uint64_t>& observed,
                        const std::vector<double>& expected_probs) {
    if (observed.size() != expected_probs.size() || observed.size() < 2)
        throw AnalysisError("need matching observed/expected with >= 2 cells");
    std::uint64_t total = 0;
    for (auto c : observed) total += c;
    if (total == 0) throw AnalysisError("no observations");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = expected_probs[i] * static_cast<double>(total);
        if (expected <= 0.0) throw AnalysisError("expected cell probability must be positive");
        const double diff = static_cast<double>(observed[i]) - expected;
        stat += diff * diff / expected;
    }
    return chi_square_sf(stat, static_cast<double>(observed.size() - 1));
}

double chi_square_independence_p(const std::vector<std::vector<std::uint64_t>>& table) {
    const std::size_t rows = table.size();
    if (rows < 2 || table[0].size() < 2) throw AnalysisError("contingency table must be at least 2x2");
    const std::size_t cols = table[0].size();
    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (table[r].size() != cols) throw AnalysisError("ragged contingency table");
        for (std::size_t c = 0; c < cols; ++c) {
            row_sum[r] += static_cast<double>(table[r][c]);
            col_sum[c] += static_cast<double>(table[r][c]);
            total += static_cast<double>(table[r][c]);
        }
    }
    if (total == 0.0) throw AnalysisError("empty contingency table");
    double stat = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double expected = row_sum[r] * col_sum[c] / total;
            if (expected == 0.0) continue;
            const double diff = static_cast<double>(table[r][c]) - expected;
            stat += diff * diff / expected;
        }
    }
    return chi_square_sf(stat, static_cast<double>((rows - 1) * (cols - 1)));
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (n == 0 || m == 0) throw AnalysisError("mann-whitney needs nonempty samples");

    std::vector<double> combined = a;
    combined.insert(combined.end(), b.begin(), b.end());
    const auto ranks = midranks(combined);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < n; ++i) rank_sum_a += ranks[i];
    const double u = rank_sum_a - static_cast<double>(n) * (n + 1) / 2.0;
    const double mean_u = static_cast<double>(n) * static_cast<double>(m) / 2.0;

    MannWhitneyResult res;
    res.u = u;

    const std::uint64_t combos = binomial_or_cap(n + m, n, 2'000'000);
    if (combos <= 2'000'000) {
        const double mean_rank_sum = static_cast<double>(n) * (n + m + 1) / 2.0;
        std::uint64_t hits = 0, total = 0;
        count_extreme_subsets(ranks, n, 0, 0.0, n, mean_rank_sum, std::fabs(u - mean_u), hits, total);
        res.p = static_cast<double>(hits) / static_cast<double>(total);
        res.exact = true;
        return res;
    }

    // Normal approximation with tie correction and continuity correction.
    const double big_n = static_cast<double>(n + m);
    std::vector<double> sorted = combined;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double var =
        (static_cast<double>(n) * m / 12.0) * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if (var <= 0.0) {
        res.p = 1.0; // every value tied
        return res;
    }
    const double z = (std::fabs(u - mean_u) - 0.5) / std::sqrt(var);
    res.p = std::min(1.0, 2.0 * normal_sf(std::max(0.0, z)));
    return res;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw AnalysisError("quantile of empty sample");
    if (q < 0.0 || q > 1.0) throw DomainError("quantile q must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return values[lo]; // avoid 0 * inf when a neighbour is infinite
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

} // namespace curio::harness
