#pragma once

#include <ccde/objective.hpp>
#include <ccde/types.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ccde {

/// Ordered partition of {0..D-1} into non-empty, disjoint sub-problems.
struct Grouping {
    std::vector<std::vector<Index>> groups;

    std::size_t size() const { return groups.size(); }
    bool operator==(const Grouping&) const = default;
};

/// True when `g` is a partition of {0..dimension-1} with no empty group.
bool is_partition(const Grouping& g, Index dimension);

/// One group holding every variable.
Grouping single_group(Index dimension);

enum class Strategy { arg, random, delta, multilevel, dg, vil, single };

std::string to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct DecomposerConfig {
    Strategy strategy = Strategy::arg;
    Index group_count = 10;                        // random / delta
    std::vector<Index> candidate_counts{5, 10, 25, 50}; // multilevel
    Scalar epsilon = 1e-3;                         // dg
    int vil_samples = 10;

    /// Throws ConfigError when the settings cannot produce a grouping of `dimension` variables.
    void validate(Index dimension) const;

    /// True for strategies that pay FEs once up front and reuse the result.
    bool is_static() const { return strategy == Strategy::dg || strategy == Strategy::vil || strategy == Strategy::single; }
};

/// Result of an evaluation-based decomposer.
struct Decomposition {
    Grouping grouping;
    std::int64_t evaluations = 0;
    bool truncated = false; // budget ran out before all variables were examined
    std::int64_t pairs_examined = 0;
    std::int64_t pairs_interacting = 0;
};

/// Automatic random grouping. The shuffled variables are dealt one at a
/// time; with s groups open, the variable joins each existing group or a
/// fresh one with equal probability 1/(s+1).
Grouping arg_decompose(Index dimension, Rng& rng);

/// Random permutation chunked into `group_count` equal groups.
Grouping random_grouping(Index dimension, Index group_count, Rng& rng);

/// Variables sorted by descending |delta| (ties by index) and chunked
/// into `group_count` equal groups.
Grouping delta_grouping(const Eigen::Ref<const Vector>& delta, Index group_count);

/// Picks a group count with probability proportional to (score + 1).
Index multilevel_select(std::span<const Index> candidates, std::span<const Scalar> scores, Rng& rng);

/// Differential grouping via the pairwise nonlinearity check
/// |(f(s_ij) - f(s_j)) - (f(s_i) - f(s))| >= epsilon.
///
/// The base point s is the lower corner of the box, s_i moves coordinate i
/// to the box centre and s_j moves coordinate j to its upper bound. Each
/// pair test costs four counted evaluations. Variables that link to nothing
/// become singleton groups.
Decomposition dg_decompose(Objective& f, Scalar epsilon, Rng& rng);

struct PairCheck {
    bool separable = true;
    bool truncated = false;
    std::int64_t evaluations = 0;
};

/// Monotonicity check on one pair: nonseparable as soon as a sampled
/// context shows f(s) > f(s_i) while f(s_j) < f(s_ij).
PairCheck vil_pair_check(Objective& f, Index i, Index j, int samples, Rng& rng);

/// Runs vil_pair_check over all pairs not already linked and merges
/// nonseparable pairs with union-find.
Decomposition vil_decompose(Objective& f, int samples, Rng& rng);

/// Probability that two given variables share a group in at least `k` of
/// `cycles` independent random groupings into `group_count` groups.
Scalar grouping_probability(int cycles, int k, Scalar group_count);

} // namespace ccde
