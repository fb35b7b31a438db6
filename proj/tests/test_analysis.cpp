#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <ccde/analysis.hpp>
#include <ccde/grouping.hpp>

#include <cmath>

using namespace ccde;

namespace {

// Brute-force exact two-sided Mann-Whitney p by enumerating every subset:
// twice the smaller tail of the rank-sum distribution.
double brute_mw_two_sided(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto r = midranks(pooled);
    const int n = static_cast<int>(pooled.size()), k = static_cast<int>(a.size());
    double observed = 0;
    for (int i = 0; i < k; ++i)
        observed += r[static_cast<std::size_t>(i)];
    long total = 0, low = 0, high = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k)
            continue;
        double s = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i))
                s += r[static_cast<std::size_t>(i)];
        ++total;
        low += s <= observed + 1e-9;
        high += s >= observed - 1e-9;
    }
    return std::min(1.0, 2.0 * double(std::min(low, high)) / double(total));
}

} // namespace

TEST_CASE("midranks average ties")
{
    const std::vector<double> v{3, 1, 3, 2};
    const auto r = midranks(v);
    CHECK(r == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("mann-whitney exact small samples")
{
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    const TestResult t = mann_whitney_u(a, b);
    CHECK(t.exact);
    CHECK(t.statistic == 0);
    CHECK(t.p_value == doctest::Approx(0.1));
    CHECK(mann_whitney_u(a, b, Alternative::less).p_value == doctest::Approx(0.05));
    CHECK(mann_whitney_u(a, b, Alternative::greater).p_value == doctest::Approx(1.0));
    CHECK(mann_whitney_u(b, a).statistic == 9);
}

TEST_CASE("mann-whitney exact agrees with brute force, ties included")
{
    const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases{
        {{1, 4, 6, 8}, {2, 3, 5, 7, 9}},
        {{1, 2, 2, 3}, {2, 3, 3, 4, 5}},
        {{0.5, 0.1, 0.9}, {0.2, 0.8, 0.3, 0.4}},
        {{1, 1, 1, 2}, {1, 2, 2, 2}},
    };
    for (const auto& [a, b] : cases)
        CHECK(mann_whitney_u(a, b).p_value == doctest::Approx(brute_mw_two_sided(a, b)).epsilon(1e-9));
}

TEST_CASE("mann-whitney identical samples")
{
    const std::vector<double> a{1, 2, 3, 4, 5}, b{1, 2, 3, 4, 5};
    CHECK(mann_whitney_u(a, b).p_value == doctest::Approx(1.0));
    const std::vector<double> c(12, 2.0), d(12, 2.0);
    CHECK(mann_whitney_u(c, d).p_value == 1.0);
}

TEST_CASE("mann-whitney normal approximation")
{
    // 10 vs 10 fully separated: U = 0, mu = 50, sigma = sqrt(175)
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(i);
        b.push_back(100 + i);
    }
    const TestResult t = mann_whitney_u(a, b);
    CHECK(!t.exact);
    const double z = (50 - 0.5) / std::sqrt(175.0);
    CHECK(t.p_value == doctest::Approx(2 * (1 - normal_cdf(z))).epsilon(1e-9));
    CHECK(t.p_value == doctest::Approx(0.000182672).epsilon(1e-3));
}

TEST_CASE("kruskal-wallis")
{
    const std::vector<std::vector<double>> groups{{1, 2, 3, 4, 5}, {11, 12, 13, 14, 15}, {21, 22, 23, 24, 25}};
    const TestResult t = kruskal_wallis(groups);
    CHECK(t.statistic == doctest::Approx(12.5));
    CHECK(t.p_value == doctest::Approx(std::exp(-6.25)).epsilon(1e-9));

    const std::vector<std::vector<double>> same{{1, 2, 3}, {1, 2, 3}};
    CHECK(kruskal_wallis(same).p_value == doctest::Approx(1.0));
    CHECK_THROWS_AS(kruskal_wallis({{1, 2}}), ContractViolation);
}

TEST_CASE("kruskal-wallis with ties uses the correction")
{
    // ranks {1.5,1.5,3}, {4,5.5,5.5}; H0 = 12/42 (3*2^2 + 3*5^2) - 21 = 3.857142...
    // correction 1 - 12 / 210
    const std::vector<std::vector<double>> g{{1, 1, 2}, {3, 4, 4}};
    const double h0 = 12.0 / 42.0 * (3 * 4.0 + 3 * 25.0) - 21;
    CHECK(kruskal_wallis(g).statistic == doctest::Approx(h0 / (1 - 12.0 / 210.0)));
}

TEST_CASE("holm adjustment")
{
    const std::vector<double> p{0.01, 0.04};
    const auto adj = holm_adjust(p);
    CHECK(adj[0] == doctest::Approx(0.02));
    CHECK(adj[1] == doctest::Approx(0.04));
    const std::vector<double> q{0.04, 0.01, 0.03};
    const auto h = holm_adjust(q);
    CHECK(h[1] == doctest::Approx(0.03));
    CHECK(h[2] == doctest::Approx(0.06));
    CHECK(h[0] == doctest::Approx(0.06));
    const std::vector<double> big{0.6, 0.7};
    CHECK(holm_adjust(big)[0] == 1.0);
}

TEST_CASE("special functions")
{
    CHECK(gamma_q(1.0, 2.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(chi_squared_sf(2 * 3.0, 2) == doctest::Approx(std::exp(-3.0)));
    // dof 1: 2 (1 - Phi(sqrt(x)))
    CHECK(chi_squared_sf(3.84, 1) == doctest::Approx(2 * (1 - normal_cdf(std::sqrt(3.84)))));
    CHECK(chi_squared_sf(50, 3) == doctest::Approx(7.98918e-11).epsilon(1e-3));
    CHECK(normal_cdf(0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975));
}

TEST_CASE("explicit averaging")
{
    const std::vector<double> s{1, 2, 3, 4};
    const AverageEstimate e = explicit_average(s);
    CHECK(e.mean == doctest::Approx(2.5));
    CHECK(*e.std_dev == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(*e.standard_error == doctest::Approx(*e.std_dev / 2.0));
    const std::vector<double> one{7};
    const AverageEstimate o = explicit_average(one);
    CHECK(o.mean == 7);
    CHECK(!o.std_dev);
    CHECK_THROWS_AS(explicit_average(std::span<const double>{}), ContractViolation);
}

TEST_CASE("simulate_arg")
{
    Rng rng(1);
    const GroupStats one = simulate_arg(1, 100, rng);
    CHECK(one.modal_count() == 1);
    CHECK(one.size_min == 1);
    CHECK(one.size_max == 1);

    const GroupStats s = simulate_arg(200, 5000, rng);
    std::int64_t total = 0;
    for (const auto& [count, freq] : s.count_histogram)
        total += freq;
    CHECK(total == 5000);
    CHECK(s.count_mean == doctest::Approx(std::sqrt(400.0)).epsilon(0.06));
}

TEST_CASE("probability curve")
{
    const auto c = probability_curve(60, 10, 5);
    REQUIRE(c.size() == 6);
    CHECK(c[0].second == 1.0);
    CHECK(c[1].second == doctest::Approx(grouping_probability(60, 1, 10)));
}
