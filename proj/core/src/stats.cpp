#include "decaymap/stats.hpp"

#include "decaymap/types.hpp"
#include "decaymap/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace decaymap::stats {

double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

double log_choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
           std::lgamma(static_cast<double>(n - k) + 1);
}

// C(n,k) in 128-bit; n must stay small enough that intermediate products fit.
unsigned __int128 choose_u128(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

// Tie-correction term sum(t^3 - t) over ties of the pooled sample.
double tie_term(std::span<const double> pooled) {
    std::vector<double> v(pooled.begin(), pooled.end());
    std::sort(v.begin(), v.end());
    double total = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        total += t * t * t - t;
        i = j + 1;
    }
    return total;
}

} // namespace

TestResult fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    const std::uint64_t r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    const std::uint64_t n = r1 + r2;
    if (n == 0) throw Error("fisher_exact: empty table");

    TestResult res;
    res.method = TestMethod::fisher_exact;

    const double log_denom = log_choose(n, c1);
    auto log_pmf = [&](std::uint64_t k) {
        return log_choose(r1, k) + log_choose(r2, c1 - k) - log_denom;
    };
    res.statistic = std::exp(log_pmf(a));

    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) {
        res.p_value = 1.0;
        res.degenerate = true;
        res.note = "degenerate margin";
        return res;
    }

    const std::uint64_t k_min = c1 > r2 ? c1 - r2 : 0;
    const std::uint64_t k_max = std::min(r1, c1);

    double p = 0.0;
    if (n <= 60) {
        // Exact inclusion via integer numerators: pmf(k) ~ C(r1,k)*C(r2,c1-k).
        const unsigned __int128 obs = choose_u128(r1, a) * choose_u128(r2, c1 - a);
        unsigned __int128 acc = 0, denom = choose_u128(n, c1);
        for (std::uint64_t k = k_min; k <= k_max; ++k) {
            unsigned __int128 num = choose_u128(r1, k) * choose_u128(r2, c1 - k);
            if (num <= obs) acc += num;
        }
        p = static_cast<double>(static_cast<long double>(acc) / static_cast<long double>(denom));
    } else {
        const double log_obs = log_pmf(a);
        for (std::uint64_t k = k_min; k <= k_max; ++k) {
            double lp = log_pmf(k);
            if (lp <= log_obs + 1e-7) p += std::exp(lp);
        }
    }
    res.p_value = std::clamp(p, 0.0, 1.0);
    return res;
}

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y) {
    const std::size_t n1 = x.size(), n2 = y.size();
    if (n1 == 0 || n2 == 0) throw Error("mann_whitney_u: both samples must be non-empty");

    TestResult res;
    res.method = TestMethod::mann_whitney_u;

    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::vector<double> ranks = midranks(pooled);

    double r1 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);
    const double u1 = r1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1) / 2.0;
    res.statistic = u1;

    auto [mn, mx] = std::minmax_element(pooled.begin(), pooled.end());
    if (*mn == *mx) {
        res.p_value = 1.0;
        res.degenerate = true;
        res.note = "all values identical";
        return res;
    }

    const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    const std::size_t total = n1 + n2;

    if (total <= 20) {
        // Enumerate all C(n, n1) assignments of pooled ranks to the first sample.
        const double target = std::fabs(u1 - mu) - 1e-9;
        const double base = static_cast<double>(n1) * (static_cast<double>(n1) + 1) / 2.0;
        std::vector<char> mask(total, 0);
        std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n1), 1);
        std::uint64_t hits = 0, count = 0;
        do {
            double rs = 0;
            for (std::size_t i = 0; i < total; ++i)
                if (mask[i]) rs += ranks[i];
            if (std::fabs(rs - base - mu) >= target) ++hits;
            ++count;
        } while (std::prev_permutation(mask.begin(), mask.end()));
        res.p_value = static_cast<double>(hits) / static_cast<double>(count);
        return res;
    }

    const double nt = static_cast<double>(total);
    double sigma2 = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                    ((nt + 1.0) - tie_term(pooled) / (nt * (nt - 1.0)));
    if (sigma2 <= 0) {
        res.p_value = 1.0;
        res.degenerate = true;
        res.note = "zero variance under ties";
        return res;
    }
    double z = (std::fabs(u1 - mu) - 0.5) / std::sqrt(sigma2);
    if (z < 0) z = 0;
    res.p_value = std::min(1.0, 2.0 * normal_sf(z));
    return res;
}

TestResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs) {
    TestResult res;
    res.method = TestMethod::wilcoxon_signed_rank;

    std::vector<double> diffs;
    std::size_t zeros = 0;
    for (const auto& [pre, post] : pairs) {
        double d = post - pre;
        if (d == 0.0) ++zeros;
        else diffs.push_back(d);
    }
    if (zeros > 0) res.note = std::to_string(zeros) + " zero differences dropped";
    if (diffs.empty()) {
        res.p_value = 1.0;
        res.degenerate = true;
        res.note = "all differences zero";
        return res;
    }

    const std::size_t n = diffs.size();
    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::fabs(diffs[i]);
    std::vector<double> ranks = midranks(abs_d);

    double w_plus = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (diffs[i] > 0) w_plus += ranks[i];
    res.statistic = w_plus;

    const double mu = static_cast<double>(n) * (static_cast<double>(n) + 1) / 4.0;

    if (n <= 15) {
        const double target = std::fabs(w_plus - mu) - 1e-9;
        const std::uint32_t patterns = 1u << n;
        std::uint32_t hits = 0;
        for (std::uint32_t s = 0; s < patterns; ++s) {
            double w = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (s & (1u << i)) w += ranks[i];
            if (std::fabs(w - mu) >= target) ++hits;
        }
        res.p_value = static_cast<double>(hits) / static_cast<double>(patterns);
        return res;
    }

    const double nn = static_cast<double>(n);
    double sigma2 = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term(abs_d) / 48.0;
    if (sigma2 <= 0) {
        res.p_value = 1.0;
        res.degenerate = true;
        res.note = "zero variance under ties";
        return res;
    }
    double z = (std::fabs(w_plus - mu) - 0.5) / std::sqrt(sigma2);
    if (z < 0) z = 0;
    res.p_value = std::min(1.0, 2.0 * normal_sf(z));
    return res;
}

namespace {

// Regularized incomplete beta via Lentz continued fraction.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double cc = 1.0;
    double dd = 1.0 - qab * x / qap;
    if (std::fabs(dd) < kFpMin) dd = kFpMin;
    dd = 1.0 / dd;
    double h = dd;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        dd = 1.0 + aa * dd;
        if (std::fabs(dd) < kFpMin) dd = kFpMin;
        cc = 1.0 + aa / cc;
        if (std::fabs(cc) < kFpMin) cc = kFpMin;
        dd = 1.0 / dd;
        h *= dd * cc;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        dd = 1.0 + aa * dd;
        if (std::fabs(dd) < kFpMin) dd = kFpMin;
        cc = 1.0 + aa / cc;
        if (std::fabs(cc) < kFpMin) cc = kFpMin;
        dd = 1.0 / dd;
        double del = dd * cc;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

} // namespace

TestResult t_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw Error("t_test: need at least 2 values per sample");

    TestResult res;
    res.method = TestMethod::t_test;

    auto mean_var = [](std::span<const double> s) {
        double m = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
        double v = 0;
        for (double val : s) v += (val - m) * (val - m);
        v /= static_cast<double>(s.size() - 1);
        return std::pair{m, v};
    };
    auto [m1, v1] = mean_var(x);
    auto [m2, v2] = mean_var(y);
    const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
    double se2 = v1 / n1 + v2 / n2;
    if (se2 == 0) {
        res.p_value = 1.0;
        res.degenerate = true;
        res.note = "zero pooled variance";
        return res;
    }
    double t = (m1 - m2) / std::sqrt(se2);
    double df = se2 * se2 / ((v1 / n1) * (v1 / n1) / (n1 - 1) + (v2 / n2) * (v2 / n2) / (n2 - 1));
    res.statistic = t;
    res.p_value = reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
    return res;
}

std::vector<double> log_transform(std::span<const double> sample) {
    std::vector<double> out;
    out.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!(sample[i] > 0))
            throw Error("log_transform: nonpositive value at index " + std::to_string(i));
        out.push_back(std::log(sample[i]));
    }
    return out;
}

} // namespace decaymap::stats
