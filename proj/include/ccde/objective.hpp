#pragma once

#include <ccde/types.hpp>

#include <atomic>
#include <deque>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace ccde {

/// Axis-aligned search box.
struct Bounds {
    Vector lower;
    Vector upper;

    Bounds() = default;
    Bounds(Vector lo, Vector hi);

    /// Uniform box [lo, hi]^dimension.
    static Bounds uniform(Index dimension, Scalar lo, Scalar hi);

    Index dimension() const { return lower.size(); }
    bool contains(const Eigen::Ref<const Vector>& x) const;

    /// Box restricted to the coordinates listed in `indices`, in that order.
    Bounds restrict(const std::vector<Index>& indices) const;
};

/// Projects each coordinate onto [lower_j, upper_j].
template <typename Derived>
Vector clamp_to_bounds(const Eigen::MatrixBase<Derived>& x, const Bounds& b)
{
    if (x.size() != b.dimension())
        throw ContractViolation("clamp_to_bounds: length mismatch");
    return x.derived().cwiseMax(b.lower).cwiseMin(b.upper);
}

enum class NoiseKind { none, additive, multiplicative };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view s);

struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    Scalar sigma = 0.1;

    /// Corrupts a clean value; draws from `rng` only when kind != none.
    Scalar apply(Scalar clean, Rng& rng) const;
};

// Closed-form benchmarks. All are minimised with optimum value 0.
namespace bench {

template <typename Derived>
typename Derived::Scalar sphere(const Eigen::MatrixBase<Derived>& x)
{
    return x.squaredNorm();
}

template <typename Derived>
typename Derived::Scalar rastrigin(const Eigen::MatrixBase<Derived>& x)
{
    using S = typename Derived::Scalar;
    const S two_pi = S(2) * std::numbers::pi_v<S>;
    return S(10) * S(x.size()) + (x.array().square() - S(10) * (two_pi * x.array()).cos()).sum();
}

template <typename Derived>
typename Derived::Scalar ackley(const Eigen::MatrixBase<Derived>& x)
{
    using S = typename Derived::Scalar;
    const S n = S(x.size());
    const S two_pi = S(2) * std::numbers::pi_v<S>;
    const S quad = std::sqrt(x.squaredNorm() / n);
    const S cosine = (two_pi * x.array()).cos().sum() / n;
    const S value = S(-20) * std::exp(S(-0.2) * quad) - std::exp(cosine) + S(20) + std::numbers::e_v<S>;
    // exp(1) round-off can leave -4e-16 at the optimum
    return value < S(0) ? S(0) : value;
}

template <typename Derived>
typename Derived::Scalar rosenbrock(const Eigen::MatrixBase<Derived>& x)
{
    using S = typename Derived::Scalar;
    const Index n = x.size();
    const auto head = x.head(n - 1).array();
    const auto tail = x.tail(n - 1).array();
    return (S(100) * (tail - head.square()).square() + (head - S(1)).square()).sum();
}

template <typename Derived>
typename Derived::Scalar dixon_price(const Eigen::MatrixBase<Derived>& x)
{
    using S = typename Derived::Scalar;
    S sum = (x(0) - S(1)) * (x(0) - S(1));
    for (Index i = 1; i < x.size(); ++i) {
        const S t = S(2) * x(i) * x(i) - x(i - 1);
        sum += S(i + 1) * t * t;
    }
    return sum;
}

/// Known minimiser of Dixon-Price: x_i = 2^{-(2^i - 2) / 2^i}, i = 1..D.
Vector dixon_price_optimum(Index dimension);

} // namespace bench

using Evaluator = std::function<Scalar(const Eigen::Ref<const Vector>&)>;

/// A registered benchmark: closed-form evaluator plus its default box.
struct Benchmark {
    std::string id;
    Evaluator evaluate;
    Scalar lower = -100;
    Scalar upper = 100;
    Index min_dimension = 1;
};

/// Lower-case id -> benchmark. Preloaded with the five classic functions;
/// extension suites register additional entries at startup.
class BenchmarkRegistry {
public:
    static BenchmarkRegistry& global();

    void add(Benchmark benchmark);
    const Benchmark& get(std::string_view id) const;
    bool contains(std::string_view id) const;
    std::vector<std::string> ids() const;

private:
    BenchmarkRegistry();
    std::deque<Benchmark> entries_;
};

/// Exact noiseless value of a registered benchmark. No FE accounting.
Scalar evaluate_base(std::string_view id, const Eigen::Ref<const Vector>& x);

/// Benchmark composed with a noise model and an FE budget.
///
/// Every successful `evaluate` consumes exactly one FE. Once the budget is
/// spent, `evaluate` returns std::nullopt and leaves the counter unchanged;
/// callers treat that as the stop signal. The counter is atomic so that
/// concurrent workers (each owning its own Rng) see a linearizable count.
class Objective {
public:
    Objective(const Benchmark& benchmark, Index dimension, NoiseModel noise, std::int64_t budget);
    Objective(std::string_view id, Index dimension, NoiseModel noise, std::int64_t budget);

    Objective(const Objective&) = delete;
    Objective& operator=(const Objective&) = delete;

    std::optional<Scalar> evaluate(const Eigen::Ref<const Vector>& x, Rng& rng);

    /// Noiseless oracle, never counted. Used for reporting true progress.
    Scalar true_value(const Eigen::Ref<const Vector>& x) const;

    const std::string& id() const { return id_; }
    Index dimension() const { return bounds_.dimension(); }
    const Bounds& bounds() const { return bounds_; }
    const NoiseModel& noise() const { return noise_; }

    std::int64_t budget() const { return budget_; }
    std::int64_t consumed() const { return consumed_.load(std::memory_order_acquire); }
    std::int64_t remaining() const { return budget_ - consumed(); }
    bool exhausted() const { return remaining() <= 0; }

private:
    std::string id_;
    Evaluator base_;
    Bounds bounds_;
    NoiseModel noise_;
    std::int64_t budget_;
    std::atomic<std::int64_t> consumed_{0};
};

} // namespace ccde
