#pragma once

#include <ccde/grouping.hpp>
#include <ccde/objective.hpp>
#include <ccde/optimizer.hpp>

#include <optional>
#include <vector>

namespace ccde {

/// The cooperative solution every sub-problem candidate is completed with.
struct ContextVector {
    Vector values;
    Scalar fitness = unevaluated; // observed
    std::optional<Scalar> true_fitness;
};

/// What a sub-population looks like when its group gets its turn and the
/// stored fitness values no longer describe the current context.
enum class SubpopulationPolicy {
    reevaluate,   // keep genomes, re-evaluate them against the current context
    reinitialize, // redraw the group's coordinates uniformly when the grouping changed
};

std::string to_string(SubpopulationPolicy p);
SubpopulationPolicy subpopulation_policy_from_string(std::string_view s);

/// How a group's best genome enters the context after its turn.
enum class ContextUpdate {
    replace, // always; the stored fitness is then a fresh observation of the context
    improve, // only when it beats the stored observed fitness
};

std::string to_string(ContextUpdate u);
ContextUpdate context_update_from_string(std::string_view s);

struct CcConfig {
    DecomposerConfig decomposer;
    DeParams optimizer;
    Index population_size = 50;
    int generations_per_cycle = 1;
    bool scale_generations = false; // a group of k variables gets k * generations_per_cycle
    SubpopulationPolicy subpopulation = SubpopulationPolicy::reevaluate;
    ContextUpdate context_update = ContextUpdate::replace;
    bool track_true = false;
    bool record_groupings = false;

    void validate(Index dimension) const;
};

struct GroupingSummary {
    std::int64_t cycles = 0;
    Scalar mean_group_count = 0;
    Index min_group_count = 0;
    Index max_group_count = 0;
    Scalar mean_group_size = 0;
    std::int64_t decomposition_evaluations = 0;
    bool decomposition_truncated = false;
    std::vector<Grouping> history; // only when CcConfig::record_groupings
};

struct CcResult {
    std::vector<TracePoint> trace;
    ContextVector context; // working context at the end of the run
    ContextVector best;    // lowest observed fitness seen at any point; what the trace reports
    std::int64_t evaluations = 0;
    std::int64_t generations = 0; // sub-problem generations, summed over groups
    GroupingSummary groupings;
};

/// Writes `genome` into the group's coordinates when `observed` is strictly
/// better than the stored context fitness. Returns whether it did.
bool update_context(ContextVector& cv, const std::vector<Index>& group, const Eigen::Ref<const Vector>& genome, Scalar observed);

/// |current - previous| per coordinate.
Vector compute_delta(const Eigen::Ref<const Vector>& previous, const Eigen::Ref<const Vector>& current);

/// Cooperative coevolution until the objective's budget is spent.
///
/// Each cycle produces a grouping (adaptive strategies regroup every cycle,
/// DG/VIL/single decompose once), then gives every group
/// `generations_per_cycle` optimizer generations in turn against the shared
/// context. A persistent full-dimensional population supplies each group's
/// sub-population. The context starts at the clamped origin with unknown
/// fitness and adopts the best member of the initial population.
///
/// Under noise the stored context fitness is a single draw; with
/// ContextUpdate::improve a lucky draw can freeze the context for the rest
/// of the run, hence replace is the default.
CcResult cc_optimize(Objective& f, const CcConfig& cfg, Rng& rng);

} // namespace ccde
