#include <ccde/analysis.hpp>
#include <ccde/grouping.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace ccde {

Index GroupStats::modal_count() const
{
    Index mode = 0;
    std::int64_t best = -1;
    for (const auto& [count, freq] : count_histogram)
        if (freq > best) {
            best = freq;
            mode = count;
        }
    return mode;
}

GroupStats simulate_arg(Index dimension, std::int64_t runs, Rng& rng)
{
    if (runs < 1)
        throw ConfigError("simulate_arg: runs must be positive");
    GroupStats stats;
    stats.dimension = dimension;
    stats.runs = runs;
    stats.size_min = dimension;
    stats.size_max = 0;
    Scalar count_sum = 0;
    Scalar size_sum = 0;
    for (std::int64_t r = 0; r < runs; ++r) {
        const Grouping g = arg_decompose(dimension, rng);
        const Index count = static_cast<Index>(g.size());
        ++stats.count_histogram[count];
        count_sum += static_cast<Scalar>(count);
        size_sum += static_cast<Scalar>(dimension) / static_cast<Scalar>(count);
        for (const auto& group : g.groups) {
            stats.size_min = std::min(stats.size_min, static_cast<Index>(group.size()));
            stats.size_max = std::max(stats.size_max, static_cast<Index>(group.size()));
        }
    }
    stats.count_mean = count_sum / static_cast<Scalar>(runs);
    stats.size_mean = size_sum / static_cast<Scalar>(runs);
    return stats;
}

std::vector<std::pair<int, Scalar>> probability_curve(int cycles, Scalar group_count, int k_max)
{
    if (k_max < 0 || k_max > cycles)
        throw std::domain_error("probability_curve: k_max must lie in [0, cycles]");
    std::vector<std::pair<int, Scalar>> curve;
    curve.reserve(static_cast<std::size_t>(k_max + 1));
    for (int k = 0; k <= k_max; ++k)
        curve.emplace_back(k, grouping_probability(cycles, k, group_count));
    return curve;
}

AverageEstimate explicit_average(std::span<const Scalar> samples)
{
    if (samples.empty())
        throw ContractViolation("explicit_average: need at least one sample");
    AverageEstimate est;
    est.count = samples.size();
    const Scalar m = static_cast<Scalar>(samples.size());
    est.mean = std::accumulate(samples.begin(), samples.end(), Scalar{0}) / m;
    if (samples.size() >= 2) {
        Scalar ss = 0;
        for (Scalar v : samples)
            ss += (v - est.mean) * (v - est.mean);
        est.std_dev = std::sqrt(ss / (m - 1));
        est.standard_error = *est.std_dev / std::sqrt(m);
    }
    return est;
}

std::string to_string(TestMethod m)
{
    return m == TestMethod::kruskal_wallis ? "kruskal_wallis" : "mann_whitney_u";
}

std::vector<Scalar> midranks(std::span<const Scalar> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Scalar> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]])
            ++j;
        const Scalar rank = 0.5 * static_cast<Scalar>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

// Sum over tie blocks of t^3 - t.
Scalar tie_term(std::span<const Scalar> values)
{
    std::vector<Scalar> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Scalar total = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i])
            ++j;
        const Scalar t = static_cast<Scalar>(j - i + 1);
        total += t * t * t - t;
        i = j + 1;
    }
    return total;
}

// Exact tail probabilities of the rank sum of a size-k subset drawn from
// `doubled_ranks` (midranks times two, so all integers).
std::pair<Scalar, Scalar> exact_rank_sum_tails(const std::vector<long long>& doubled_ranks, std::size_t k, long long observed)
{
    std::vector<long long> sorted = doubled_ranks;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const long long max_sum = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), 0LL);
    std::vector<std::vector<Scalar>> ways(k + 1, std::vector<Scalar>(static_cast<std::size_t>(max_sum + 1), 0.0));
    ways[0][0] = 1.0;
    std::size_t seen = 0;
    for (long long r : doubled_ranks) {
        ++seen;
        for (std::size_t j = std::min(seen, k); j >= 1; --j)
            for (long long s = max_sum; s >= r; --s)
                ways[j][static_cast<std::size_t>(s)] += ways[j - 1][static_cast<std::size_t>(s - r)];
    }
    Scalar total = 0, lower = 0, upper = 0;
    for (long long s = 0; s <= max_sum; ++s) {
        const Scalar w = ways[k][static_cast<std::size_t>(s)];
        total += w;
        if (s <= observed)
            lower += w;
        if (s >= observed)
            upper += w;
    }
    return {lower / total, upper / total};
}

} // namespace

Scalar normal_cdf(Scalar z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

TestResult mann_whitney_u(std::span<const Scalar> a, std::span<const Scalar> b, Alternative alternative)
{
    if (a.empty() || b.empty())
        throw ContractViolation("mann_whitney_u: both samples must be nonempty");
    const std::size_t n = a.size(), m = b.size();
    std::vector<Scalar> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    const Scalar rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n), Scalar{0});
    const Scalar nn = static_cast<Scalar>(n), mm = static_cast<Scalar>(m);
    const Scalar u = rank_sum_a - nn * (nn + 1) / 2;

    TestResult res;
    res.method = TestMethod::mann_whitney_u;
    res.statistic = u;

    const Scalar ties = tie_term(pooled);
    const Scalar big_n = nn + mm;
    if (ties == big_n * big_n * big_n - big_n) {
        res.p_value = 1.0; // every observation equal
        return res;
    }

    if (std::min(n, m) <= 8) {
        const bool a_small = n <= m;
        const std::size_t k = a_small ? n : m;
        std::vector<long long> doubled(ranks.size());
        for (std::size_t t = 0; t < ranks.size(); ++t)
            doubled[t] = std::llround(2.0 * ranks[t]);
        long long observed = 0;
        for (std::size_t t = a_small ? 0 : n; t < (a_small ? n : n + m); ++t)
            observed += doubled[t];
        auto [lower, upper] = exact_rank_sum_tails(doubled, k, observed);
        // express the tails in terms of sample a
        const Scalar a_low = a_small ? lower : upper;
        const Scalar a_high = a_small ? upper : lower;
        switch (alternative) {
        case Alternative::two_sided:
            res.p_value = std::min(1.0, 2.0 * std::min(a_low, a_high));
            break;
        case Alternative::less:
            res.p_value = a_low;
            break;
        case Alternative::greater:
            res.p_value = a_high;
            break;
        }
        res.exact = true;
        return res;
    }

    const Scalar mean = nn * mm / 2;
    const Scalar var = nn * mm / 12.0 * ((big_n + 1) - ties / (big_n * (big_n - 1)));
    const Scalar sd = std::sqrt(var);
    switch (alternative) {
    case Alternative::two_sided: {
        const Scalar z = std::max(0.0, std::abs(u - mean) - 0.5) / sd;
        res.p_value = std::erfc(z / std::sqrt(2.0));
        break;
    }
    case Alternative::less:
        res.p_value = normal_cdf((u - mean + 0.5) / sd);
        break;
    case Alternative::greater:
        res.p_value = 1.0 - normal_cdf((u - mean - 0.5) / sd);
        break;
    }
    res.p_value = std::clamp(res.p_value, 0.0, 1.0);
    return res;
}

Scalar gamma_q(Scalar a, Scalar x)
{
    if (!(a > 0) || x < 0)
        throw std::domain_error("gamma_q: need a > 0 and x >= 0");
    if (x == 0)
        return 1.0;
    constexpr int max_iter = 1000;
    constexpr Scalar eps = 1e-15;
    const Scalar log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1) {
        // series for P(a, x)
        Scalar ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < max_iter; ++i) {
            ap += 1;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * eps)
                break;
        }
        return std::clamp(1.0 - sum * std::exp(log_prefix), 0.0, 1.0);
    }
    // Lentz continued fraction for Q(a, x)
    constexpr Scalar tiny = 1e-300;
    Scalar b = x + 1 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < max_iter; ++i) {
        const Scalar an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const Scalar del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            break;
    }
    return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

Scalar chi_squared_sf(Scalar x, Scalar dof)
{
    if (x <= 0)
        return 1.0;
    return gamma_q(dof / 2, x / 2);
}

TestResult kruskal_wallis(const std::vector<std::vector<Scalar>>& groups)
{
    if (groups.size() < 2)
        throw ContractViolation("kruskal_wallis: need at least two groups");
    std::vector<Scalar> pooled;
    for (const auto& g : groups) {
        if (g.empty())
            throw ContractViolation("kruskal_wallis: empty group");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const auto ranks = midranks(pooled);
    const Scalar n = static_cast<Scalar>(pooled.size());

    TestResult res;
    res.method = TestMethod::kruskal_wallis;
    const Scalar correction = 1.0 - tie_term(pooled) / (n * n * n - n);
    if (!(correction > 0)) {
        res.statistic = 0;
        res.p_value = 1;
        return res;
    }

    Scalar weighted = 0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        const Scalar r = std::accumulate(ranks.begin() + static_cast<std::ptrdiff_t>(offset),
                                         ranks.begin() + static_cast<std::ptrdiff_t>(offset + g.size()), Scalar{0});
        weighted += r * r / static_cast<Scalar>(g.size());
        offset += g.size();
    }
    const Scalar h = (12.0 / (n * (n + 1)) * weighted - 3.0 * (n + 1)) / correction;
    res.statistic = std::max(0.0, h);
    res.p_value = chi_squared_sf(res.statistic, static_cast<Scalar>(groups.size() - 1));
    return res;
}

std::vector<Scalar> holm_adjust(std::span<const Scalar> p_values)
{
    const std::size_t k = p_values.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<Scalar> adjusted(k);
    Scalar running = 0;
    for (std::size_t rank = 0; rank < k; ++rank) {
        const Scalar p = p_values[order[rank]];
        if (!(p >= 0 && p <= 1))
            throw ContractViolation("holm_adjust: p-values must lie in [0, 1]");
        running = std::max(running, std::min(1.0, static_cast<Scalar>(k - rank) * p));
        adjusted[order[rank]] = running;
    }
    return adjusted;
}

} // namespace ccde
