#include <ccde/objective.hpp>

#include <algorithm>
#include <mutex>

namespace ccde {

namespace {
std::mutex registry_mutex;
}

Bounds::Bounds(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size())
        throw ConfigError("bounds: lower and upper have different lengths");
    if (lower.size() == 0)
        throw ConfigError("bounds: dimension must be positive");
    if (!(lower.array() < upper.array()).all())
        throw ConfigError("bounds: lower must be strictly below upper in every coordinate");
}

Bounds Bounds::uniform(Index dimension, Scalar lo, Scalar hi)
{
    return Bounds(Vector::Constant(dimension, lo), Vector::Constant(dimension, hi));
}

bool Bounds::contains(const Eigen::Ref<const Vector>& x) const
{
    return x.size() == dimension() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Bounds Bounds::restrict(const std::vector<Index>& indices) const
{
    Vector lo(static_cast<Index>(indices.size()));
    Vector hi(static_cast<Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        lo(static_cast<Index>(k)) = lower(indices[k]);
        hi(static_cast<Index>(k)) = upper(indices[k]);
    }
    return Bounds(std::move(lo), std::move(hi));
}

std::string to_string(NoiseKind kind)
{
    switch (kind) {
    case NoiseKind::none:
        return "none";
    case NoiseKind::additive:
        return "additive";
    case NoiseKind::multiplicative:
        return "multiplicative";
    }
    return "none";
}

NoiseKind noise_kind_from_string(std::string_view s)
{
    if (s == "none")
        return NoiseKind::none;
    if (s == "additive")
        return NoiseKind::additive;
    if (s == "multiplicative")
        return NoiseKind::multiplicative;
    throw ConfigError("unknown noise kind '" + std::string(s) + "'");
}

Scalar NoiseModel::apply(Scalar clean, Rng& rng) const
{
    if (kind == NoiseKind::none)
        return clean;
    std::normal_distribution<Scalar> gauss(0.0, sigma);
    const Scalar draw = sigma > 0 ? gauss(rng) : 0.0;
    if (kind == NoiseKind::additive)
        return clean + draw;
    return clean * (1.0 + draw);
}

namespace bench {

Vector dixon_price_optimum(Index dimension)
{
    Vector x(dimension);
    for (Index i = 0; i < dimension; ++i) {
        // exponent -(2^k - 2)/2^k == -(1 - 2^{1-k}) with k = i + 1
        x(i) = std::exp2(-(1.0 - std::exp2(-static_cast<Scalar>(i))));
    }
    return x;
}

} // namespace bench

BenchmarkRegistry::BenchmarkRegistry()
{
    auto wrap = [](auto fn) {
        return Evaluator([fn](const Eigen::Ref<const Vector>& x) { return fn(x); });
    };
    entries_.push_back({"sphere", wrap([](const auto& x) { return bench::sphere(x); }), -100.0, 100.0, 1});
    entries_.push_back({"rastrigin", wrap([](const auto& x) { return bench::rastrigin(x); }), -5.12, 5.12, 1});
    entries_.push_back({"ackley", wrap([](const auto& x) { return bench::ackley(x); }), -32.768, 32.768, 1});
    entries_.push_back({"rosenbrock", wrap([](const auto& x) { return bench::rosenbrock(x); }), -30.0, 30.0, 2});
    entries_.push_back({"dixonprice", wrap([](const auto& x) { return bench::dixon_price(x); }), -10.0, 10.0, 2});
}

BenchmarkRegistry& BenchmarkRegistry::global()
{
    static BenchmarkRegistry registry;
    return registry;
}

void BenchmarkRegistry::add(Benchmark benchmark)
{
    if (benchmark.id.empty() || !benchmark.evaluate)
        throw ConfigError("benchmark registration needs an id and an evaluator");
    if (!(benchmark.lower < benchmark.upper))
        throw ConfigError("benchmark '" + benchmark.id + "': lower bound must be below upper bound");
    std::lock_guard lock(registry_mutex);
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Benchmark& b) { return b.id == benchmark.id; });
    if (it != entries_.end())
        *it = std::move(benchmark);
    else
        entries_.push_back(std::move(benchmark));
}

const Benchmark& BenchmarkRegistry::get(std::string_view id) const
{
    std::lock_guard lock(registry_mutex);
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Benchmark& b) { return b.id == id; });
    if (it == entries_.end())
        throw ConfigError("unknown benchmark '" + std::string(id) + "'");
    return *it;
}

bool BenchmarkRegistry::contains(std::string_view id) const
{
    std::lock_guard lock(registry_mutex);
    return std::any_of(entries_.begin(), entries_.end(), [&](const Benchmark& b) { return b.id == id; });
}

std::vector<std::string> BenchmarkRegistry::ids() const
{
    std::lock_guard lock(registry_mutex);
    std::vector<std::string> out;
    for (const auto& b : entries_)
        out.push_back(b.id);
    return out;
}

Scalar evaluate_base(std::string_view id, const Eigen::Ref<const Vector>& x)
{
    const Benchmark& b = BenchmarkRegistry::global().get(id);
    if (x.size() < std::max<Index>(1, b.min_dimension))
        throw ConfigError("benchmark '" + b.id + "' needs dimension >= " + std::to_string(b.min_dimension));
    return b.evaluate(x);
}

Objective::Objective(const Benchmark& benchmark, Index dimension, NoiseModel noise, std::int64_t budget)
    : id_(benchmark.id), base_(benchmark.evaluate), noise_(noise), budget_(budget)
{
    if (dimension < std::max<Index>(1, benchmark.min_dimension))
        throw ConfigError("benchmark '" + benchmark.id + "' needs dimension >= " + std::to_string(benchmark.min_dimension));
    if (budget < 0)
        throw ConfigError("budget must be nonnegative");
    if (noise.sigma < 0)
        throw ConfigError("noise sigma must be nonnegative");
    bounds_ = Bounds::uniform(dimension, benchmark.lower, benchmark.upper);
}

Objective::Objective(std::string_view id, Index dimension, NoiseModel noise, std::int64_t budget)
    : Objective(BenchmarkRegistry::global().get(id), dimension, noise, budget)
{
}

std::optional<Scalar> Objective::evaluate(const Eigen::Ref<const Vector>& x, Rng& rng)
{
    if (x.size() != dimension())
        throw ContractViolation("objective: expected a " + std::to_string(dimension()) + "-D point, got " + std::to_string(x.size()));
    if (!bounds_.contains(x))
        throw ContractViolation("objective: point outside the search box");

    std::int64_t used = consumed_.load(std::memory_order_relaxed);
    do {
        if (used >= budget_)
            return std::nullopt;
    } while (!consumed_.compare_exchange_weak(used, used + 1, std::memory_order_acq_rel));

    return noise_.apply(base_(x), rng);
}

Scalar Objective::true_value(const Eigen::Ref<const Vector>& x) const
{
    if (x.size() != dimension())
        throw ContractViolation("objective: dimension mismatch in true_value");
    return base_(x);
}

} // namespace ccde
