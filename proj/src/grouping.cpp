#include <ccde/grouping.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccde {

bool is_partition(const Grouping& g, Index dimension)
{
    std::vector<char> seen(static_cast<std::size_t>(std::max<Index>(dimension, 0)), 0);
    Index total = 0;
    for (const auto& group : g.groups) {
        if (group.empty())
            return false;
        for (Index v : group) {
            if (v < 0 || v >= dimension || seen[static_cast<std::size_t>(v)])
                return false;
            seen[static_cast<std::size_t>(v)] = 1;
            ++total;
        }
    }
    return total == dimension;
}

Grouping single_group(Index dimension)
{
    if (dimension < 1)
        throw ConfigError("grouping: dimension must be positive");
    std::vector<Index> all(static_cast<std::size_t>(dimension));
    std::iota(all.begin(), all.end(), Index{0});
    return Grouping{{std::move(all)}};
}

std::string to_string(Strategy s)
{
    switch (s) {
    case Strategy::arg:
        return "arg";
    case Strategy::random:
        return "random";
    case Strategy::delta:
        return "delta";
    case Strategy::multilevel:
        return "multilevel";
    case Strategy::dg:
        return "dg";
    case Strategy::vil:
        return "vil";
    case Strategy::single:
        return "single";
    }
    return "arg";
}

Strategy strategy_from_string(std::string_view s)
{
    for (Strategy st : {Strategy::arg, Strategy::random, Strategy::delta, Strategy::multilevel, Strategy::dg, Strategy::vil, Strategy::single})
        if (to_string(st) == s)
            return st;
    throw ConfigError("unknown grouping strategy '" + std::string(s) + "'");
}

void DecomposerConfig::validate(Index dimension) const
{
    if (dimension < 1)
        throw ConfigError("decomposer: dimension must be positive");
    switch (strategy) {
    case Strategy::random:
    case Strategy::delta:
        if (group_count < 1 || dimension % group_count != 0)
            throw ConfigError("decomposer.group_count: " + std::to_string(group_count) + " does not divide dimension " + std::to_string(dimension));
        break;
    case Strategy::multilevel:
        if (candidate_counts.empty())
            throw ConfigError("decomposer.candidate_counts: must not be empty");
        for (Index c : candidate_counts)
            if (c < 1 || dimension % c != 0)
                throw ConfigError("decomposer.candidate_counts: " + std::to_string(c) + " does not divide dimension " + std::to_string(dimension));
        break;
    case Strategy::dg:
        if (!(epsilon > 0))
            throw ConfigError("decomposer.epsilon: must be positive");
        break;
    case Strategy::vil:
        if (vil_samples < 1)
            throw ConfigError("decomposer.vil_samples: must be positive");
        break;
    case Strategy::arg:
    case Strategy::single:
        break;
    }
}

namespace {

std::vector<Index> shuffled_indices(Index dimension, Rng& rng)
{
    std::vector<Index> order(static_cast<std::size_t>(dimension));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

Grouping chunk(const std::vector<Index>& order, Index group_count)
{
    const Index size = static_cast<Index>(order.size()) / group_count;
    Grouping g;
    g.groups.reserve(static_cast<std::size_t>(group_count));
    for (Index k = 0; k < group_count; ++k)
        g.groups.emplace_back(order.begin() + k * size, order.begin() + (k + 1) * size);
    return g;
}

void check_divides(Index dimension, Index group_count)
{
    if (dimension < 1)
        throw ConfigError("grouping: dimension must be positive");
    if (group_count < 1 || dimension % group_count != 0)
        throw ConfigError("grouping: group count " + std::to_string(group_count) + " does not divide dimension " + std::to_string(dimension));
}

class DisjointSets {
public:
    explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n))
    {
        std::iota(parent_.begin(), parent_.end(), Index{0});
    }

    Index find(Index v)
    {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    void unite(Index a, Index b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<Index> parent_;
};

} // namespace

Grouping arg_decompose(Index dimension, Rng& rng)
{
    if (dimension < 1)
        throw ConfigError("arg_decompose: dimension must be positive");
    const auto order = shuffled_indices(dimension, rng);
    Grouping g;
    for (Index v : order) {
        const auto open = g.groups.size();
        std::uniform_int_distribution<std::size_t> pick(0, open);
        const auto r = pick(rng);
        if (r == open)
            g.groups.push_back({v});
        else
            g.groups[r].push_back(v);
    }
    return g;
}

Grouping random_grouping(Index dimension, Index group_count, Rng& rng)
{
    check_divides(dimension, group_count);
    return chunk(shuffled_indices(dimension, rng), group_count);
}

Grouping delta_grouping(const Eigen::Ref<const Vector>& delta, Index group_count)
{
    check_divides(delta.size(), group_count);
    std::vector<Index> order(static_cast<std::size_t>(delta.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(delta(a)) > std::abs(delta(b)); });
    return chunk(order, group_count);
}

Index multilevel_select(std::span<const Index> candidates, std::span<const Scalar> scores, Rng& rng)
{
    if (candidates.empty())
        throw ConfigError("multilevel_select: no candidates");
    if (scores.size() != candidates.size())
        throw ContractViolation("multilevel_select: scores and candidates differ in length");
    std::vector<Scalar> weights(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (!(scores[k] >= 0))
            throw ContractViolation("multilevel_select: scores must be nonnegative");
        weights[k] = scores[k] + 1.0;
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return candidates[pick(rng)];
}

Decomposition dg_decompose(Objective& f, Scalar epsilon, Rng& rng)
{
    if (!(epsilon > 0))
        throw ConfigError("dg_decompose: epsilon must be positive");
    const Bounds& box = f.bounds();
    const Index n = f.dimension();
    const Vector centre = 0.5 * (box.lower + box.upper);
    const std::int64_t start = f.consumed();

    Decomposition out;
    std::vector<Index> remaining(static_cast<std::size_t>(n));
    std::iota(remaining.begin(), remaining.end(), Index{0});

    while (!remaining.empty()) {
        const Index i = remaining.front();
        std::vector<Index> group{i};
        bool ran_out = false;

        for (std::size_t k = 1; k < remaining.size() && !ran_out; ++k) {
            const Index j = remaining[k];
            Vector s = box.lower;
            Vector s_i = s;
            s_i(i) = centre(i);
            Vector s_j = s;
            s_j(j) = box.upper(j);
            Vector s_ij = s_i;
            s_ij(j) = box.upper(j);

            const auto fs = f.evaluate(s, rng);
            const auto fsi = fs ? f.evaluate(s_i, rng) : std::nullopt;
            const auto fsj = fsi ? f.evaluate(s_j, rng) : std::nullopt;
            const auto fsij = fsj ? f.evaluate(s_ij, rng) : std::nullopt;
            if (!fsij) {
                ran_out = true;
                break;
            }
            ++out.pairs_examined;
            const Scalar d1 = *fsi - *fs;
            const Scalar d2 = *fsij - *fsj;
            if (std::abs(d2 - d1) >= epsilon) {
                ++out.pairs_interacting;
                group.push_back(j);
            }
        }

        std::erase_if(remaining, [&](Index v) { return std::find(group.begin(), group.end(), v) != group.end(); });
        out.grouping.groups.push_back(std::move(group));

        if (ran_out) {
            out.truncated = true;
            for (Index v : remaining)
                out.grouping.groups.push_back({v});
            break;
        }
    }

    out.evaluations = f.consumed() - start;
    return out;
}

PairCheck vil_pair_check(Objective& f, Index i, Index j, int samples, Rng& rng)
{
    if (i == j)
        throw ContractViolation("vil_pair_check: i and j must differ");
    if (i < 0 || j < 0 || i >= f.dimension() || j >= f.dimension())
        throw ContractViolation("vil_pair_check: index out of range");
    if (samples < 1)
        throw ConfigError("vil_pair_check: samples must be positive");

    const Bounds& box = f.bounds();
    std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
    auto draw = [&](Index k) { return box.lower(k) + unit(rng) * (box.upper(k) - box.lower(k)); };

    PairCheck out;
    const std::int64_t start = f.consumed();
    for (int t = 0; t < samples; ++t) {
        Vector s(f.dimension());
        for (Index k = 0; k < s.size(); ++k)
            s(k) = draw(k);
        const Scalar xi = draw(i);
        const Scalar xj = draw(j);
        Vector s_i = s;
        s_i(i) = xi;
        Vector s_j = s;
        s_j(j) = xj;
        Vector s_ij = s_i;
        s_ij(j) = xj;

        const auto fs = f.evaluate(s, rng);
        const auto fsi = fs ? f.evaluate(s_i, rng) : std::nullopt;
        const auto fsj = fsi ? f.evaluate(s_j, rng) : std::nullopt;
        const auto fsij = fsj ? f.evaluate(s_ij, rng) : std::nullopt;
        if (!fsij) {
            out.separable = true;
            out.truncated = true;
            break;
        }
        if (*fs > *fsi && *fsj < *fsij) {
            out.separable = false;
            break;
        }
    }
    out.evaluations = f.consumed() - start;
    return out;
}

Decomposition vil_decompose(Objective& f, int samples, Rng& rng)
{
    const Index n = f.dimension();
    const std::int64_t start = f.consumed();
    DisjointSets sets(n);
    Decomposition out;

    for (Index i = 0; i < n && !out.truncated; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (sets.find(i) == sets.find(j))
                continue;
            const PairCheck check = vil_pair_check(f, i, j, samples, rng);
            if (check.truncated) {
                out.truncated = true;
                break;
            }
            ++out.pairs_examined;
            if (!check.separable) {
                ++out.pairs_interacting;
                sets.unite(i, j);
            }
        }
    }

    // components in order of their smallest member; members ascending
    std::vector<Index> slot(static_cast<std::size_t>(n), -1);
    for (Index v = 0; v < n; ++v) {
        const Index root = sets.find(v);
        if (slot[root] < 0) {
            slot[root] = static_cast<Index>(out.grouping.groups.size());
            out.grouping.groups.emplace_back();
        }
        out.grouping.groups[slot[root]].push_back(v);
    }
    out.evaluations = f.consumed() - start;
    return out;
}

Scalar grouping_probability(int cycles, int k, Scalar group_count)
{
    if (cycles < 0 || k < 0)
        throw std::domain_error("grouping_probability: cycles and k must be nonnegative");
    if (k > cycles)
        throw std::domain_error("grouping_probability: k exceeds the number of cycles");
    if (!(group_count >= 1))
        throw std::domain_error("grouping_probability: group count must be at least 1");
    if (k == 0 || group_count == 1)
        return 1.0;

    const Scalar log_p = -std::log(group_count);
    const Scalar log_q = std::log1p(-1.0 / group_count);
    const Scalar log_n_fact = std::lgamma(cycles + 1.0);
    Scalar sum = 0;
    for (int r = k; r <= cycles; ++r) {
        const Scalar log_binom = log_n_fact - std::lgamma(r + 1.0) - std::lgamma(cycles - r + 1.0);
        sum += std::exp(log_binom + r * log_p + (cycles - r) * log_q);
    }
    return std::clamp(sum, 0.0, 1.0);
}

} // namespace ccde
