#include <ccde/cc.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ccde {

std::string to_string(SubpopulationPolicy p)
{
    return p == SubpopulationPolicy::reinitialize ? "reinitialize" : "reevaluate";
}

SubpopulationPolicy subpopulation_policy_from_string(std::string_view s)
{
    if (s == "reevaluate")
        return SubpopulationPolicy::reevaluate;
    if (s == "reinitialize")
        return SubpopulationPolicy::reinitialize;
    throw ConfigError("unknown subpopulation policy '" + std::string(s) + "'");
}

std::string to_string(ContextUpdate u)
{
    return u == ContextUpdate::improve ? "improve" : "replace";
}

ContextUpdate context_update_from_string(std::string_view s)
{
    if (s == "replace")
        return ContextUpdate::replace;
    if (s == "improve")
        return ContextUpdate::improve;
    throw ConfigError("unknown context update rule '" + std::string(s) + "'");
}

void CcConfig::validate(Index dimension) const
{
    decomposer.validate(dimension);
    if (population_size < 4)
        throw ConfigError("population_size: must be at least 4");
    if (generations_per_cycle < 1)
        throw ConfigError("generations_per_cycle: must be positive");
}

bool update_context(ContextVector& cv, const std::vector<Index>& group, const Eigen::Ref<const Vector>& genome, Scalar observed)
{
    if (genome.size() != static_cast<Index>(group.size()))
        throw ContractViolation("update_context: genome length differs from group size");
    if (!(observed < cv.fitness))
        return false;
    for (std::size_t k = 0; k < group.size(); ++k)
        cv.values(group[k]) = genome(static_cast<Index>(k));
    cv.fitness = observed;
    cv.true_fitness.reset();
    return true;
}

Vector compute_delta(const Eigen::Ref<const Vector>& previous, const Eigen::Ref<const Vector>& current)
{
    if (previous.size() != current.size())
        throw ContractViolation("compute_delta: length mismatch");
    return (current - previous).cwiseAbs();
}

namespace {

constexpr Scalar not_tracked = std::numeric_limits<Scalar>::quiet_NaN();

class GroupingTally {
public:
    void add(const Grouping& g, bool keep, GroupingSummary& summary)
    {
        const Index count = static_cast<Index>(g.size());
        if (summary.cycles == 0) {
            summary.min_group_count = count;
            summary.max_group_count = count;
        }
        summary.min_group_count = std::min(summary.min_group_count, count);
        summary.max_group_count = std::max(summary.max_group_count, count);
        count_sum_ += static_cast<Scalar>(count);
        size_sum_ += static_cast<Scalar>(dimension_of(g)) / static_cast<Scalar>(count);
        ++summary.cycles;
        summary.mean_group_count = count_sum_ / static_cast<Scalar>(summary.cycles);
        summary.mean_group_size = size_sum_ / static_cast<Scalar>(summary.cycles);
        if (keep)
            summary.history.push_back(g);
    }

private:
    static std::size_t dimension_of(const Grouping& g)
    {
        std::size_t n = 0;
        for (const auto& group : g.groups)
            n += group.size();
        return n;
    }

    Scalar count_sum_ = 0;
    Scalar size_sum_ = 0;
};

} // namespace

CcResult cc_optimize(Objective& f, const CcConfig& cfg, Rng& rng)
{
    const Index n = f.dimension();
    cfg.validate(n);

    CcResult out;
    ContextVector& ctx = out.context;
    ContextVector& best = out.best;
    ctx.values = clamp_to_bounds(Vector::Zero(n), f.bounds());
    best.values = ctx.values;
    if (f.exhausted()) {
        out.evaluations = f.consumed();
        return out;
    }

    auto record = [&]() {
        const Scalar truth = cfg.track_true && best.fitness < unevaluated ? f.true_value(best.values) : not_tracked;
        append_trace(out.trace, f.consumed(), best.fitness, truth);
    };
    auto offer = [&](const Vector& point, Scalar observed) {
        if (observed < best.fitness) {
            best.values = point;
            best.fitness = observed;
        }
    };

    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});

    Population full = random_population(f.bounds(), cfg.population_size, rng);
    {
        const SubProblemView whole(all, ctx.values, f.bounds());
        evaluate_population(full, whole, f, rng);
    }
    update_context(ctx, all, full.genomes.col(full.best_index), full.fitness(full.best_index));
    offer(ctx.values, ctx.fitness);
    record();

    Grouping grouping;
    GroupingTally tally;
    const auto& dc = cfg.decomposer;

    if (dc.strategy == Strategy::dg || dc.strategy == Strategy::vil) {
        Decomposition d = dc.strategy == Strategy::dg ? dg_decompose(f, dc.epsilon, rng) : vil_decompose(f, dc.vil_samples, rng);
        grouping = std::move(d.grouping);
        out.groupings.decomposition_evaluations = d.evaluations;
        out.groupings.decomposition_truncated = d.truncated;
        record();
    } else if (dc.strategy == Strategy::single) {
        grouping = single_group(n);
    }

    Vector previous_context = ctx.values;
    std::vector<Scalar> ml_scores(dc.candidate_counts.size(), 0.0);
    bool first_cycle = true;

    while (!f.exhausted()) {
        Grouping previous = grouping;
        std::size_t ml_choice = 0;
        switch (dc.strategy) {
        case Strategy::arg:
            grouping = arg_decompose(n, rng);
            break;
        case Strategy::random:
            grouping = random_grouping(n, dc.group_count, rng);
            break;
        case Strategy::delta:
            grouping = delta_grouping(compute_delta(previous_context, ctx.values), dc.group_count);
            break;
        case Strategy::multilevel: {
            const Index m = multilevel_select(dc.candidate_counts, ml_scores, rng);
            ml_choice = static_cast<std::size_t>(std::find(dc.candidate_counts.begin(), dc.candidate_counts.end(), m) - dc.candidate_counts.begin());
            grouping = random_grouping(n, m, rng);
            break;
        }
        case Strategy::dg:
        case Strategy::vil:
        case Strategy::single:
            break;
        }
        previous_context = ctx.values;
        const bool changed = first_cycle || !(grouping == previous);
        first_cycle = false;
        tally.add(grouping, cfg.record_groupings, out.groupings);

        const Scalar cycle_start_fitness = ctx.fitness;
        // With one group spanning every variable the stored fitness is exact.
        const bool covers_all = grouping.size() == 1;

        for (const auto& group : grouping.groups) {
            if (f.exhausted())
                break;
            const SubProblemView view(group, ctx.values, f.bounds());

            Population sub;
            sub.genomes = full.genomes(group, Eigen::all);
            sub.fitness = full.fitness;
            sub.refresh_best();

            if (!covers_all) {
                if (cfg.subpopulation == SubpopulationPolicy::reinitialize && changed)
                    sub.genomes = random_population(view.bounds, cfg.population_size, rng).genomes;
                // the context's own slice competes, so the group's best is never
                // worse than the context as observed now
                Index worst = 0;
                sub.fitness.maxCoeff(&worst);
                sub.genomes.col(worst) = ctx.values(group);
                sub.fitness.setConstant(unevaluated);
                evaluate_population(sub, view, f, rng);
            }

            const std::int64_t turns = cfg.generations_per_cycle * (cfg.scale_generations ? static_cast<std::int64_t>(group.size()) : 1);
            for (std::int64_t g = 0; g < turns && !f.exhausted(); ++g) {
                run_generation(sub, view, f, cfg.optimizer, rng);
                ++out.generations;
                if (sub.fitness(sub.best_index) < best.fitness)
                    offer(view.compose(sub.genomes.col(sub.best_index)), sub.fitness(sub.best_index));
                record();
            }

            const Scalar sub_best = sub.fitness(sub.best_index);
            if (cfg.context_update == ContextUpdate::replace && sub_best < unevaluated)
                ctx.fitness = unevaluated; // the group's best was observed against this very context
            update_context(ctx, group, sub.genomes.col(sub.best_index), sub_best);
            full.genomes(group, Eigen::all) = sub.genomes;
            full.fitness = sub.fitness;
            record();
        }

        if (dc.strategy == Strategy::multilevel && std::isfinite(cycle_start_fitness) && cycle_start_fitness != 0) {
            const Scalar gain = (cycle_start_fitness - ctx.fitness) / std::abs(cycle_start_fitness);
            ml_scores[ml_choice] = std::max<Scalar>(gain, 0.0);
        }
    }

    record();
    if (cfg.track_true) {
        if (ctx.fitness < unevaluated)
            ctx.true_fitness = f.true_value(ctx.values);
        if (best.fitness < unevaluated)
            best.true_fitness = f.true_value(best.values);
    }
    out.evaluations = f.consumed();
    return out;
}

} // namespace ccde
