#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace decaymap::stats {

enum class TestMethod : std::uint8_t { fisher_exact, mann_whitney_u, wilcoxon_signed_rank, t_test };

struct TestResult {
    TestMethod method = TestMethod::fisher_exact;
    double statistic = 0;
    double p_value = 1;   // two-sided, in [0,1]
    bool degenerate = false;
    std::string note;     // set when degenerate or corrected
};

// Two-sided Fisher exact test on the 2x2 table [[a,b],[c,d]] with margins
// fixed: p sums hypergeometric probabilities not exceeding the observed
// table's. Inclusion decisions use exact integer numerators for small totals
// and log-space factorials (lgamma) beyond, so totals up to 1e6 are fine.
// The statistic is the observed table probability. A zero margin is the
// degenerate p = 1 case.
TestResult fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

// Two-sided Mann-Whitney U with midrank ties. Exact permutation enumeration
// when n+m <= 20, else normal approximation with tie and continuity
// correction. The statistic is U for the first sample.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y);

// Two-sided Wilcoxon signed-rank over (pre, post) pairs; zero differences are
// dropped (count in note). Exact sign-pattern enumeration for <= 15 nonzero
// pairs, else normal approximation with tie and continuity correction.
// The statistic is W+ (rank sum of positive differences, post - pre).
TestResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs);

// Welch two-sample t-test (two-sided).
TestResult t_test(std::span<const double> x, std::span<const double> y);

// Elementwise natural log; a nonpositive value is fatal and the error names
// the offending index.
std::vector<double> log_transform(std::span<const double> sample);

// Midranks of a sample (average rank for ties), 1-based.
std::vector<double> midranks(std::span<const double> values);

double normal_sf(double z); // P(Z >= z) for standard normal

} // namespace decaymap::stats
