#pragma once

#include <ccde/types.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ccde {

/// Aggregate of repeated automatic random groupings.
struct GroupStats {
    Index dimension = 0;
    std::int64_t runs = 0;
    std::map<Index, std::int64_t> count_histogram; // group count -> runs
    Scalar count_mean = 0;
    Scalar size_mean = 0; // mean over runs of dimension / group count
    Index size_min = 0;   // smallest group seen in any run
    Index size_max = 0;   // largest group seen in any run

    /// Most frequent group count; ties resolved towards the smaller count.
    Index modal_count() const;
};

GroupStats simulate_arg(Index dimension, std::int64_t runs, Rng& rng);

/// (k, P_k) for k = 0..k_max.
std::vector<std::pair<int, Scalar>> probability_curve(int cycles, Scalar group_count, int k_max);

/// Explicit averaging of repeated noisy evaluations.
struct AverageEstimate {
    Scalar mean = 0;
    std::optional<Scalar> std_dev;        // undefined for fewer than two samples
    std::optional<Scalar> standard_error; // std_dev / sqrt(count)
    std::size_t count = 0;
};

AverageEstimate explicit_average(std::span<const Scalar> samples);

enum class TestMethod { kruskal_wallis, mann_whitney_u };
enum class Alternative { two_sided, less, greater };

std::string to_string(TestMethod m);

struct TestResult {
    Scalar statistic = 0;
    Scalar p_value = 1;
    TestMethod method = TestMethod::mann_whitney_u;
    bool exact = false;
};

/// Midranks (1-based) of `values` in pooled order.
std::vector<Scalar> midranks(std::span<const Scalar> values);

/// Mann-Whitney U for `a` against `b`; the statistic is U of `a`.
///
/// `less` tests whether `a` tends to be smaller than `b`. When the smaller
/// sample has at most eight values the p-value comes from the exact
/// permutation distribution of the (mid)rank sum; otherwise from the normal
/// approximation with tie and continuity corrections.
TestResult mann_whitney_u(std::span<const Scalar> a, std::span<const Scalar> b, Alternative alternative = Alternative::two_sided);

/// Kruskal-Wallis H with tie correction, p from chi-squared(g - 1).
TestResult kruskal_wallis(const std::vector<std::vector<Scalar>>& groups);

/// Holm step-down adjustment; output in input order.
std::vector<Scalar> holm_adjust(std::span<const Scalar> p_values);

/// Upper regularised incomplete gamma Q(a, x).
Scalar gamma_q(Scalar a, Scalar x);

/// Survival function of the chi-squared distribution.
Scalar chi_squared_sf(Scalar x, Scalar dof);

/// Standard normal CDF.
Scalar normal_cdf(Scalar z);

} // namespace ccde
