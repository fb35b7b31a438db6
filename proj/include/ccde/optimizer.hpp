#pragma once

#include <ccde/objective.hpp>
#include <ccde/types.hpp>

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace ccde {

inline constexpr Scalar unevaluated = std::numeric_limits<Scalar>::infinity();

/// A genome together with its latest observed (noisy) fitness.
struct Individual {
    Vector genome;
    Scalar fitness = unevaluated;
    bool valid = false;
};

/// Column-per-member population over one sub-problem.
struct Population {
    Matrix genomes;  // rows: sub-problem coordinates, cols: members
    Vector fitness;  // observed fitness per member
    Index best_index = 0;

    Index size() const { return genomes.cols(); }
    Index dimension() const { return genomes.rows(); }

    Individual member(Index i) const { return {genomes.col(i), fitness(i), fitness(i) < unevaluated}; }
    void refresh_best();
};

/// Members drawn uniformly inside `bounds`; fitness left unevaluated.
Population random_population(const Bounds& bounds, Index size, Rng& rng);

enum class Variant { canonical, mde_ds };

std::string to_string(Variant v);
Variant variant_from_string(std::string_view s);

struct DeParams {
    Variant variant = Variant::mde_ds;
    Scalar F = 0.7;  // canonical only
    Scalar Cr = 0.9; // canonical only
};

/// A sub-problem seen through the cooperative context: genomes of length
/// |group| are written into a copy of the context before every evaluation.
struct SubProblemView {
    std::vector<Index> group;
    std::reference_wrapper<const Vector> context;
    Bounds bounds; // restricted to `group`

    SubProblemView(std::vector<Index> group, const Vector& context, const Bounds& full_bounds);

    Vector compose(const Eigen::Ref<const Vector>& genome) const;
    Vector extract(const Eigen::Ref<const Vector>& full) const;
};

// ---------------------------------------------------------------------------
// MDE-DS building blocks

/// Parameter ranges of MDE-DS.
inline constexpr Scalar mdeds_f_min = 0.5;
inline constexpr Scalar mdeds_f_max = 2.0;
inline constexpr Scalar mdeds_cr_min = 0.3;
inline constexpr Scalar mdeds_cr_max = 1.0;
inline constexpr std::array<Scalar, 3> mdeds_blend_rates{0.1, 0.5, 0.9};

/// Indices of the ceil(s/2) members with the lowest observed fitness.
std::vector<Index> elite_indices(const Population& pop);

/// Arithmetic mean of the elite members.
Vector elite_centroid(const Population& pop);

template <typename A, typename B, typename C>
Vector centroid_donor(const Eigen::MatrixBase<A>& x_r1, const Eigen::MatrixBase<B>& centroid, const Eigen::MatrixBase<C>& x_r2, Scalar F)
{
    return x_r1 + F * (centroid - x_r2);
}

/// Step from x_i along `direction` (unit length) by mean(x_best) - mean(x_i).
template <typename A, typename B, typename C>
Vector dmp_donor(const Eigen::MatrixBase<A>& x_i, const Eigen::MatrixBase<B>& x_best, const Eigen::MatrixBase<C>& direction)
{
    const Scalar step = x_best.mean() - x_i.mean();
    return x_i + step * direction;
}

/// Uniformly distributed direction on the unit sphere (normalised Gaussian).
Vector random_unit_vector(Index dimension, Rng& rng);

/// Centroid-based mutation: X_r1 + F (centroid_elite - X_r2), F ~ U(0.5, 2).
Vector mdeds_mutate_centroid(const Population& pop, Index i, Rng& rng);

/// DMP mutation around member i, scaled by the dimension-wise mean gap to the best member.
Vector mdeds_mutate_dmp(const Population& pop, Index i, Rng& rng);

/// Blending crossover with fixed Cr and b. Coordinate `forced` is always blended.
Vector blend_crossover(const Eigen::Ref<const Vector>& target, const Eigen::Ref<const Vector>& donor, Scalar cr, Scalar b, Index forced, Rng& rng);

/// Blending crossover with Cr ~ U(0.3, 1) and b drawn from {0.1, 0.5, 0.9}.
Vector mdeds_crossover(const Eigen::Ref<const Vector>& target, const Eigen::Ref<const Vector>& donor, Rng& rng);

/// Survival probability of a trial under distance-based selection:
/// 1 when the trial is not worse, exp(-|df| / manhattan) otherwise (0 when the distance is 0).
Scalar survival_probability(Scalar trial_fitness, Scalar parent_fitness, Scalar manhattan);

/// Distance-based selection between a parent and its trial.
const Individual& mdeds_select(const Individual& parent, const Individual& trial, Rng& rng);

struct GenerationResult {
    std::int64_t evaluations = 0;
    bool partial = false; // budget ran out part-way
};

/// One MDE-DS generation over `pop`, evaluating trials through `view`.
GenerationResult mdeds_generation(Population& pop, const SubProblemView& view, Objective& f, Rng& rng);

// ---------------------------------------------------------------------------
// Canonical DE/rand/1/bin

Vector de_rand1_donor(const Population& pop, Index i, Scalar F, Rng& rng);
Vector binomial_crossover(const Eigen::Ref<const Vector>& target, const Eigen::Ref<const Vector>& donor, Scalar cr, Rng& rng);

GenerationResult de_generation(Population& pop, const SubProblemView& view, Objective& f, const DeParams& params, Rng& rng);

/// Dispatches on params.variant.
GenerationResult run_generation(Population& pop, const SubProblemView& view, Objective& f, const DeParams& params, Rng& rng);

/// Evaluates every member through `view` in order; stops early on budget exhaustion.
GenerationResult evaluate_population(Population& pop, const SubProblemView& view, Objective& f, Rng& rng);

// ---------------------------------------------------------------------------

/// One convergence sample: FEs so far, best observed fitness, best true fitness (NaN when not tracked).
struct TracePoint {
    std::int64_t evaluations = 0;
    Scalar best_observed = unevaluated;
    Scalar best_true = std::numeric_limits<Scalar>::quiet_NaN();
};

/// Appends (consumed, observed, true) unless the FE count has not advanced.
void append_trace(std::vector<TracePoint>& trace, std::int64_t evaluations, Scalar best_observed, Scalar best_true);

struct OptimizerRun {
    std::vector<TracePoint> trace;
    Individual best;
};

/// Plain (non-cooperative) optimisation of the full problem until the budget runs out.
OptimizerRun run_optimizer(Objective& f, const DeParams& params, Index population_size, bool track_true, Rng& rng);

} // namespace ccde
