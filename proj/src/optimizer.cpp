#include <ccde/optimizer.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccde {

void Population::refresh_best()
{
    if (size() == 0)
        return;
    Index best = 0;
    for (Index i = 1; i < size(); ++i)
        if (fitness(i) < fitness(best))
            best = i;
    best_index = best;
}

Population random_population(const Bounds& bounds, Index size, Rng& rng)
{
    if (size < 1)
        throw ConfigError("population size must be positive");
    std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
    Population pop;
    pop.genomes.resize(bounds.dimension(), size);
    for (Index i = 0; i < size; ++i)
        for (Index j = 0; j < bounds.dimension(); ++j)
            pop.genomes(j, i) = bounds.lower(j) + unit(rng) * (bounds.upper(j) - bounds.lower(j));
    pop.fitness = Vector::Constant(size, unevaluated);
    pop.best_index = 0;
    return pop;
}

std::string to_string(Variant v)
{
    return v == Variant::canonical ? "canonical" : "mde_ds";
}

Variant variant_from_string(std::string_view s)
{
    if (s == "canonical" || s == "de")
        return Variant::canonical;
    if (s == "mde_ds" || s == "mdeds")
        return Variant::mde_ds;
    throw ConfigError("unknown optimizer variant '" + std::string(s) + "'");
}

SubProblemView::SubProblemView(std::vector<Index> g, const Vector& ctx, const Bounds& full_bounds)
    : group(std::move(g)), context(ctx), bounds(full_bounds.restrict(group))
{
    if (ctx.size() != full_bounds.dimension())
        throw ContractViolation("sub-problem view: context length differs from problem dimension");
}

Vector SubProblemView::compose(const Eigen::Ref<const Vector>& genome) const
{
    if (genome.size() != static_cast<Index>(group.size()))
        throw ContractViolation("sub-problem view: genome length differs from group size");
    Vector full = context.get();
    for (std::size_t k = 0; k < group.size(); ++k)
        full(group[k]) = genome(static_cast<Index>(k));
    return full;
}

Vector SubProblemView::extract(const Eigen::Ref<const Vector>& full) const
{
    Vector out(static_cast<Index>(group.size()));
    for (std::size_t k = 0; k < group.size(); ++k)
        out(static_cast<Index>(k)) = full(group[k]);
    return out;
}

namespace {

Index pick_other(Index size, std::initializer_list<Index> taken, Rng& rng)
{
    std::uniform_int_distribution<Index> pick(0, size - 1);
    for (;;) {
        const Index r = pick(rng);
        if (std::find(taken.begin(), taken.end(), r) == taken.end())
            return r;
    }
}

void require_members(const Population& pop, Index at_least, const char* what)
{
    if (pop.size() < at_least)
        throw ConfigError(std::string(what) + " needs a population of at least " + std::to_string(at_least));
}

Scalar manhattan(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b)
{
    return (a - b).cwiseAbs().sum();
}

} // namespace

std::vector<Index> elite_indices(const Population& pop)
{
    std::vector<Index> order(static_cast<std::size_t>(pop.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return pop.fitness(a) < pop.fitness(b); });
    order.resize(static_cast<std::size_t>((pop.size() + 1) / 2));
    return order;
}

Vector elite_centroid(const Population& pop)
{
    Vector sum = Vector::Zero(pop.dimension());
    const auto elite = elite_indices(pop);
    for (Index k : elite)
        sum += pop.genomes.col(k);
    return sum / static_cast<Scalar>(elite.size());
}

Vector random_unit_vector(Index dimension, Rng& rng)
{
    std::normal_distribution<Scalar> gauss(0.0, 1.0);
    Vector m(dimension);
    Scalar norm = 0;
    while (!(norm > 0)) {
        for (Index j = 0; j < dimension; ++j)
            m(j) = gauss(rng);
        norm = m.norm();
    }
    return m / norm;
}

Vector mdeds_mutate_centroid(const Population& pop, Index i, Rng& rng)
{
    require_members(pop, 4, "centroid mutation");
    const Vector centroid = elite_centroid(pop);
    std::uniform_real_distribution<Scalar> draw_f(mdeds_f_min, mdeds_f_max);
    const Scalar F = draw_f(rng);
    const Index r1 = pick_other(pop.size(), {i}, rng);
    const Index r2 = pick_other(pop.size(), {i, r1}, rng);
    return centroid_donor(pop.genomes.col(r1), centroid, pop.genomes.col(r2), F);
}

Vector mdeds_mutate_dmp(const Population& pop, Index i, Rng& rng)
{
    require_members(pop, 1, "DMP mutation");
    const Vector direction = random_unit_vector(pop.dimension(), rng);
    return dmp_donor(pop.genomes.col(i), pop.genomes.col(pop.best_index), direction);
}

Vector blend_crossover(const Eigen::Ref<const Vector>& target, const Eigen::Ref<const Vector>& donor, Scalar cr, Scalar b, Index forced, Rng& rng)
{
    if (target.size() != donor.size())
        throw ContractViolation("crossover: target and donor lengths differ");
    std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
    Vector trial = target;
    for (Index j = 0; j < target.size(); ++j) {
        const bool blend = unit(rng) < cr || j == forced;
        if (blend)
            trial(j) = b * target(j) + (1.0 - b) * donor(j);
    }
    return trial;
}

Vector mdeds_crossover(const Eigen::Ref<const Vector>& target, const Eigen::Ref<const Vector>& donor, Rng& rng)
{
    if (target.size() != donor.size())
        throw ContractViolation("crossover: target and donor lengths differ");
    std::uniform_real_distribution<Scalar> draw_cr(mdeds_cr_min, mdeds_cr_max);
    std::uniform_int_distribution<std::size_t> draw_b(0, mdeds_blend_rates.size() - 1);
    std::uniform_int_distribution<Index> draw_forced(0, target.size() - 1);
    const Scalar cr = draw_cr(rng);
    const Scalar b = mdeds_blend_rates[draw_b(rng)];
    const Index forced = draw_forced(rng);
    return blend_crossover(target, donor, cr, b, forced, rng);
}

Scalar survival_probability(Scalar trial_fitness, Scalar parent_fitness, Scalar distance)
{
    // ratio test when both are positive, plain ordering otherwise
    const bool not_worse = (trial_fitness > 0 && parent_fitness > 0) ? trial_fitness / parent_fitness <= 1.0
                                                                      : trial_fitness <= parent_fitness;
    if (not_worse)
        return 1.0;
    if (!(distance > 0))
        return 0.0;
    return std::exp(-std::abs(trial_fitness - parent_fitness) / distance);
}

const Individual& mdeds_select(const Individual& parent, const Individual& trial, Rng& rng)
{
    const Scalar p = survival_probability(trial.fitness, parent.fitness, manhattan(trial.genome, parent.genome));
    if (p >= 1.0)
        return trial;
    if (p <= 0.0)
        return parent;
    std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
    return unit(rng) <= p ? trial : parent;
}

GenerationResult evaluate_population(Population& pop, const SubProblemView& view, Objective& f, Rng& rng)
{
    GenerationResult out;
    for (Index i = 0; i < pop.size(); ++i) {
        const auto value = f.evaluate(view.compose(pop.genomes.col(i)), rng);
        if (!value) {
            out.partial = true;
            break;
        }
        pop.fitness(i) = *value;
        ++out.evaluations;
    }
    pop.refresh_best();
    return out;
}

GenerationResult mdeds_generation(Population& pop, const SubProblemView& view, Objective& f, Rng& rng)
{
    require_members(pop, 4, "MDE-DS");
    if (pop.dimension() != view.bounds.dimension())
        throw ContractViolation("MDE-DS: population and view dimensions differ");

    const Population current = pop;
    std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
    GenerationResult out;

    for (Index i = 0; i < current.size(); ++i) {
        const Vector donor = unit(rng) <= 0.5 ? mdeds_mutate_centroid(current, i, rng) : mdeds_mutate_dmp(current, i, rng);
        const Vector trial_genome = clamp_to_bounds(mdeds_crossover(current.genomes.col(i), donor, rng), view.bounds);

        const auto value = f.evaluate(view.compose(trial_genome), rng);
        if (!value) {
            out.partial = true;
            break;
        }
        ++out.evaluations;

        const Individual parent = current.member(i);
        const Individual trial{trial_genome, *value, true};
        const Individual& survivor = mdeds_select(parent, trial, rng);
        pop.genomes.col(i) = survivor.genome;
        pop.fitness(i) = survivor.fitness;
    }
    pop.refresh_best();
    return out;
}

Vector de_rand1_donor(const Population& pop, Index i, Scalar F, Rng& rng)
{
    require_members(pop, 4, "DE/rand/1");
    const Index r1 = pick_other(pop.size(), {i}, rng);
    const Index r2 = pick_other(pop.size(), {i, r1}, rng);
    const Index r3 = pick_other(pop.size(), {i, r1, r2}, rng);
    return pop.genomes.col(r1) + F * (pop.genomes.col(r2) - pop.genomes.col(r3));
}

Vector binomial_crossover(const Eigen::Ref<const Vector>& target, const Eigen::Ref<const Vector>& donor, Scalar cr, Rng& rng)
{
    if (target.size() != donor.size())
        throw ContractViolation("crossover: target and donor lengths differ");
    std::uniform_int_distribution<Index> draw_forced(0, target.size() - 1);
    std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
    const Index forced = draw_forced(rng);
    Vector trial = target;
    for (Index j = 0; j < target.size(); ++j)
        if (unit(rng) < cr || j == forced)
            trial(j) = donor(j);
    return trial;
}

GenerationResult de_generation(Population& pop, const SubProblemView& view, Objective& f, const DeParams& params, Rng& rng)
{
    require_members(pop, 4, "DE/rand/1");
    if (pop.dimension() != view.bounds.dimension())
        throw ContractViolation("DE: population and view dimensions differ");

    const Population current = pop;
    GenerationResult out;
    for (Index i = 0; i < current.size(); ++i) {
        const Vector donor = de_rand1_donor(current, i, params.F, rng);
        const Vector trial = clamp_to_bounds(binomial_crossover(current.genomes.col(i), donor, params.Cr, rng), view.bounds);
        const auto value = f.evaluate(view.compose(trial), rng);
        if (!value) {
            out.partial = true;
            break;
        }
        ++out.evaluations;
        if (*value <= current.fitness(i)) {
            pop.genomes.col(i) = trial;
            pop.fitness(i) = *value;
        }
    }
    pop.refresh_best();
    return out;
}

GenerationResult run_generation(Population& pop, const SubProblemView& view, Objective& f, const DeParams& params, Rng& rng)
{
    if (params.variant == Variant::mde_ds)
        return mdeds_generation(pop, view, f, rng);
    return de_generation(pop, view, f, params, rng);
}

void append_trace(std::vector<TracePoint>& trace, std::int64_t evaluations, Scalar best_observed, Scalar best_true)
{
    if (evaluations <= 0 || (!trace.empty() && trace.back().evaluations >= evaluations))
        return;
    trace.push_back({evaluations, best_observed, best_true});
}

OptimizerRun run_optimizer(Objective& f, const DeParams& params, Index population_size, bool track_true, Rng& rng)
{
    const Vector origin = clamp_to_bounds(Vector::Zero(f.dimension()), f.bounds());
    std::vector<Index> all(static_cast<std::size_t>(f.dimension()));
    std::iota(all.begin(), all.end(), Index{0});
    const SubProblemView view(all, origin, f.bounds());

    OptimizerRun run;
    run.best.genome = origin;
    auto note = [&](const Population& pop) {
        if (pop.fitness(pop.best_index) < run.best.fitness)
            run.best = pop.member(pop.best_index);
        const Scalar truth = track_true && run.best.valid ? f.true_value(run.best.genome) : std::numeric_limits<Scalar>::quiet_NaN();
        append_trace(run.trace, f.consumed(), run.best.fitness, truth);
    };

    if (f.exhausted())
        return run;
    Population pop = random_population(f.bounds(), population_size, rng);
    evaluate_population(pop, view, f, rng);
    note(pop);
    while (!f.exhausted()) {
        run_generation(pop, view, f, params, rng);
        note(pop);
    }
    return run;
}

} // namespace ccde
