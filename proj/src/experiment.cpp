#include <ccde/experiment.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace ccde {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what)
{
    throw ConfigError("config field '" + field + "': " + what);
}

template <typename T>
T read_field(const json& j, const std::string& key, const std::string& path, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        field_error(path + key, "has the wrong type");
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& path)
{
    for (const auto& [key, value] : j.items())
        if (!known.contains(key))
            field_error(path + key, "unknown field");
}

json scalar_or_null(Scalar v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

Scalar scalar_from(const json& j, Scalar if_null)
{
    return j.is_null() ? if_null : j.get<Scalar>();
}

std::string sanitize(const std::string& s)
{
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

} // namespace

std::string format_scalar(Scalar v)
{
    if (std::isnan(v))
        return "";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return mix_seed(master, index);
}

void apply_algorithm_label(const std::string& label, Index dimension, CcConfig& cc)
{
    const auto cut = label.find("CC-");
    if (cut == std::string::npos)
        field_error("algorithm", "expected '<optimizer>CC-<grouping>', got '" + label + "'");
    const std::string opt = label.substr(0, cut);
    const std::string grp = label.substr(cut + 3);

    if (opt == "DE")
        cc.optimizer.variant = Variant::canonical;
    else if (opt == "MDE-DS")
        cc.optimizer.variant = Variant::mde_ds;
    else
        field_error("algorithm", "unknown optimizer '" + opt + "'");

    static const std::map<std::string, Strategy> groupings{
        {"aRG", Strategy::arg}, {"G", Strategy::random}, {"D", Strategy::delta}, {"ML", Strategy::multilevel},
        {"DG", Strategy::dg},   {"VIL", Strategy::vil},  {"single", Strategy::single}};
    auto it = groupings.find(grp);
    if (it == groupings.end())
        field_error("algorithm", "unknown grouping '" + grp + "'");
    cc.decomposer.strategy = it->second;

    // sub-problems of 100 variables where the dimension allows it
    if ((it->second == Strategy::random || it->second == Strategy::delta) && dimension >= 100 && dimension % 100 == 0)
        cc.decomposer.group_count = dimension / 100;
}

ExperimentConfig parse_experiment_config(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config: top level must be a JSON object");
    reject_unknown(j,
                   {"benchmark", "dimension", "noise", "algorithm", "budget", "population_size", "generations_per_cycle", "scale_generations",
                    "subpopulation", "context_update", "decomposer", "optimizer", "seeds", "master_seed", "trial_runs", "output_dir",
                    "track_true", "record_groupings", "record_timing"},
                   "");

    ExperimentConfig cfg;
    cfg.benchmark = read_field<std::string>(j, "benchmark", "", cfg.benchmark);
    if (!BenchmarkRegistry::global().contains(cfg.benchmark))
        field_error("benchmark", "unknown benchmark '" + cfg.benchmark + "'");
    cfg.dimension = read_field<Index>(j, "dimension", "", cfg.dimension);
    if (cfg.dimension < std::max<Index>(1, BenchmarkRegistry::global().get(cfg.benchmark).min_dimension))
        field_error("dimension", "too small for benchmark '" + cfg.benchmark + "'");

    if (j.contains("noise")) {
        const json& n = j.at("noise");
        if (!n.is_object())
            field_error("noise", "must be an object");
        reject_unknown(n, {"kind", "sigma"}, "noise.");
        try {
            cfg.noise.kind = noise_kind_from_string(read_field<std::string>(n, "kind", "noise.", "multiplicative"));
        } catch (const ConfigError& e) {
            field_error("noise.kind", e.what());
        }
        cfg.noise.sigma = read_field<Scalar>(n, "sigma", "noise.", 0.1);
        if (!(cfg.noise.sigma >= 0))
            field_error("noise.sigma", "must be nonnegative");
    }

    cfg.algorithm = read_field<std::string>(j, "algorithm", "", cfg.algorithm);
    apply_algorithm_label(cfg.algorithm, cfg.dimension, cfg.cc);

    cfg.budget = read_field<std::int64_t>(j, "budget", "", cfg.budget);
    if (cfg.budget < 0)
        field_error("budget", "must be nonnegative");
    cfg.cc.population_size = read_field<Index>(j, "population_size", "", cfg.cc.population_size);
    if (cfg.cc.population_size < 4)
        field_error("population_size", "must be at least 4");
    cfg.cc.generations_per_cycle = read_field<int>(j, "generations_per_cycle", "", cfg.cc.generations_per_cycle);
    if (cfg.cc.generations_per_cycle < 1)
        field_error("generations_per_cycle", "must be positive");
    cfg.cc.scale_generations = read_field<bool>(j, "scale_generations", "", false);
    try {
        cfg.cc.subpopulation = subpopulation_policy_from_string(read_field<std::string>(j, "subpopulation", "", to_string(cfg.cc.subpopulation)));
    } catch (const ConfigError& e) {
        field_error("subpopulation", e.what());
    }
    try {
        cfg.cc.context_update = context_update_from_string(read_field<std::string>(j, "context_update", "", to_string(cfg.cc.context_update)));
    } catch (const ConfigError& e) {
        field_error("context_update", e.what());
    }
    cfg.cc.track_true = read_field<bool>(j, "track_true", "", false);
    cfg.cc.record_groupings = read_field<bool>(j, "record_groupings", "", false);
    cfg.record_timing = read_field<bool>(j, "record_timing", "", false);

    if (j.contains("decomposer")) {
        const json& d = j.at("decomposer");
        if (!d.is_object())
            field_error("decomposer", "must be an object");
        reject_unknown(d, {"strategy", "group_count", "candidate_counts", "epsilon", "vil_samples"}, "decomposer.");
        auto& dc = cfg.cc.decomposer;
        if (d.contains("strategy")) {
            try {
                dc.strategy = strategy_from_string(read_field<std::string>(d, "strategy", "decomposer.", ""));
            } catch (const ConfigError& e) {
                field_error("decomposer.strategy", e.what());
            }
        }
        dc.group_count = read_field<Index>(d, "group_count", "decomposer.", dc.group_count);
        dc.candidate_counts = read_field<std::vector<Index>>(d, "candidate_counts", "decomposer.", dc.candidate_counts);
        dc.epsilon = read_field<Scalar>(d, "epsilon", "decomposer.", dc.epsilon);
        dc.vil_samples = read_field<int>(d, "vil_samples", "decomposer.", dc.vil_samples);
    }
    try {
        cfg.cc.decomposer.validate(cfg.dimension);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config field '") + e.what());
    }

    if (j.contains("optimizer")) {
        const json& o = j.at("optimizer");
        if (!o.is_object())
            field_error("optimizer", "must be an object");
        reject_unknown(o, {"variant", "F", "Cr"}, "optimizer.");
        if (o.contains("variant")) {
            try {
                cfg.cc.optimizer.variant = variant_from_string(read_field<std::string>(o, "variant", "optimizer.", ""));
            } catch (const ConfigError& e) {
                field_error("optimizer.variant", e.what());
            }
        }
        cfg.cc.optimizer.F = read_field<Scalar>(o, "F", "optimizer.", cfg.cc.optimizer.F);
        cfg.cc.optimizer.Cr = read_field<Scalar>(o, "Cr", "optimizer.", cfg.cc.optimizer.Cr);
        if (!(cfg.cc.optimizer.Cr >= 0 && cfg.cc.optimizer.Cr <= 1))
            field_error("optimizer.Cr", "must lie in [0, 1]");
    }

    cfg.master_seed = read_field<std::uint64_t>(j, "master_seed", "", cfg.master_seed);
    const bool explicit_runs = j.contains("trial_runs");
    cfg.trial_runs = read_field<int>(j, "trial_runs", "", cfg.trial_runs);
    if (j.contains("seeds")) {
        auto seeds = read_field<std::vector<std::uint64_t>>(j, "seeds", "", {});
        if (seeds.empty())
            field_error("seeds", "must not be empty");
        if (!explicit_runs)
            cfg.trial_runs = static_cast<int>(seeds.size());
        if (static_cast<int>(seeds.size()) < cfg.trial_runs)
            field_error("seeds", "has fewer entries than trial_runs");
        seeds.resize(static_cast<std::size_t>(cfg.trial_runs));
        cfg.seeds = std::move(seeds);
    } else {
        for (int i = 0; i < cfg.trial_runs; ++i)
            cfg.seeds.push_back(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i)));
    }
    if (cfg.trial_runs < 1)
        field_error("trial_runs", "must be positive");

    cfg.output_dir = read_field<std::string>(j, "output_dir", "", cfg.output_dir.string());
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_experiment_config(j);
}

json to_json(const ExperimentConfig& cfg)
{
    const auto& dc = cfg.cc.decomposer;
    return json{
        {"benchmark", cfg.benchmark},
        {"dimension", cfg.dimension},
        {"noise", {{"kind", to_string(cfg.noise.kind)}, {"sigma", cfg.noise.sigma}}},
        {"algorithm", cfg.algorithm},
        {"budget", cfg.budget},
        {"population_size", cfg.cc.population_size},
        {"generations_per_cycle", cfg.cc.generations_per_cycle},
        {"scale_generations", cfg.cc.scale_generations},
        {"subpopulation", to_string(cfg.cc.subpopulation)},
        {"context_update", to_string(cfg.cc.context_update)},
        {"decomposer",
         {{"strategy", to_string(dc.strategy)},
          {"group_count", dc.group_count},
          {"candidate_counts", dc.candidate_counts},
          {"epsilon", dc.epsilon},
          {"vil_samples", dc.vil_samples}}},
        {"optimizer", {{"variant", to_string(cfg.cc.optimizer.variant)}, {"F", cfg.cc.optimizer.F}, {"Cr", cfg.cc.optimizer.Cr}}},
        {"master_seed", cfg.master_seed},
        {"trial_runs", cfg.trial_runs},
        {"seeds", cfg.seeds},
        {"output_dir", cfg.output_dir.string()},
        {"track_true", cfg.cc.track_true},
        {"record_groupings", cfg.cc.record_groupings},
        {"record_timing", cfg.record_timing},
    };
}

RunRecord execute_run(const ExperimentConfig& cfg, std::uint64_t seed)
{
    const auto started = std::chrono::steady_clock::now();
    Objective f(cfg.benchmark, cfg.dimension, cfg.noise, cfg.budget);
    Rng rng(seed);
    CcResult result = cc_optimize(f, cfg.cc, rng);

    RunRecord r;
    r.config = to_json(cfg);
    r.config.erase("output_dir");
    r.config.erase("record_timing");
    r.algorithm = cfg.algorithm;
    r.seed = seed;
    r.budget = cfg.budget;
    r.evaluations = result.evaluations;
    r.generations = result.generations;
    r.trace = std::move(result.trace);
    r.final_context = result.best.values;
    r.final_observed = result.best.fitness;
    r.final_true = result.best.true_fitness;
    r.groupings = std::move(result.groupings);
    if (cfg.record_timing)
        r.wall_clock_seconds = std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - started).count();
    return r;
}

json to_json(const RunRecord& r)
{
    json trace = json::array();
    for (const auto& p : r.trace)
        trace.push_back(json::array({p.evaluations, scalar_or_null(p.best_observed), scalar_or_null(p.best_true)}));

    json groupings{
        {"cycles", r.groupings.cycles},
        {"mean_group_count", r.groupings.mean_group_count},
        {"min_group_count", r.groupings.min_group_count},
        {"max_group_count", r.groupings.max_group_count},
        {"mean_group_size", r.groupings.mean_group_size},
        {"decomposition_evaluations", r.groupings.decomposition_evaluations},
        {"decomposition_truncated", r.groupings.decomposition_truncated},
    };
    if (!r.groupings.history.empty()) {
        json history = json::array();
        for (const auto& g : r.groupings.history)
            history.push_back(g.groups);
        groupings["history"] = std::move(history);
    }

    std::vector<Scalar> context(r.final_context.data(), r.final_context.data() + r.final_context.size());
    json out{
        {"algorithm", r.algorithm},
        {"seed", r.seed},
        {"budget", r.budget},
        {"evaluations", r.evaluations},
        {"generations", r.generations},
        {"config", r.config},
        {"trace", std::move(trace)},
        {"final",
         {{"best_observed", scalar_or_null(r.final_observed)},
          {"best_true", r.final_true ? scalar_or_null(*r.final_true) : json(nullptr)},
          {"context", context}}},
        {"groupings", std::move(groupings)},
    };
    if (r.wall_clock_seconds)
        out["wall_clock_seconds"] = *r.wall_clock_seconds;
    return out;
}

RunRecord run_record_from_json(const json& j)
{
    RunRecord r;
    try {
        r.algorithm = j.at("algorithm").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.budget = j.at("budget").get<std::int64_t>();
        r.evaluations = j.at("evaluations").get<std::int64_t>();
        r.generations = j.at("generations").get<std::int64_t>();
        r.config = j.at("config");
        for (const auto& p : j.at("trace"))
            r.trace.push_back({p.at(0).get<std::int64_t>(), scalar_from(p.at(1), unevaluated), scalar_from(p.at(2), std::numeric_limits<Scalar>::quiet_NaN())});
        const json& fin = j.at("final");
        r.final_observed = scalar_from(fin.at("best_observed"), unevaluated);
        if (!fin.at("best_true").is_null())
            r.final_true = fin.at("best_true").get<Scalar>();
        const auto context = fin.at("context").get<std::vector<Scalar>>();
        r.final_context = Eigen::Map<const Vector>(context.data(), static_cast<Index>(context.size()));
        const json& g = j.at("groupings");
        r.groupings.cycles = g.at("cycles").get<std::int64_t>();
        r.groupings.mean_group_count = g.at("mean_group_count").get<Scalar>();
        r.groupings.min_group_count = g.at("min_group_count").get<Index>();
        r.groupings.max_group_count = g.at("max_group_count").get<Index>();
        r.groupings.mean_group_size = g.at("mean_group_size").get<Scalar>();
        r.groupings.decomposition_evaluations = g.at("decomposition_evaluations").get<std::int64_t>();
        r.groupings.decomposition_truncated = g.at("decomposition_truncated").get<bool>();
        if (g.contains("history"))
            for (const auto& h : g.at("history"))
                r.groupings.history.push_back(Grouping{h.get<std::vector<std::vector<Index>>>()});
        if (j.contains("wall_clock_seconds"))
            r.wall_clock_seconds = j.at("wall_clock_seconds").get<Scalar>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run record is malformed: ") + e.what());
    }
    validate_run_record(r);
    return r;
}

void validate_run_record(const RunRecord& r)
{
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        if (r.trace[i].evaluations <= r.trace[i - 1].evaluations)
            throw ConfigError("run record: trace FEs are not strictly increasing");
    if (!r.trace.empty() && r.trace.back().evaluations > r.budget)
        throw ConfigError("run record: trace exceeds the budget");
    if (r.evaluations > r.budget)
        throw ConfigError("run record: evaluations exceed the budget");
    if (!r.trace.empty() && r.trace.back().evaluations != r.evaluations)
        throw ConfigError("run record: last trace point does not match the FE total");
}

std::string record_file_name(const std::string& algorithm, std::uint64_t seed)
{
    return sanitize(algorithm) + "_seed" + std::to_string(seed) + ".json";
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, int jobs)
{
    std::filesystem::create_directories(cfg.output_dir);
    std::vector<RunRecord> records(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.seeds.size())
                return;
            try {
                records[i] = execute_run(cfg, cfg.seeds[i]);
                std::ofstream out(cfg.output_dir / record_file_name(cfg.algorithm, cfg.seeds[i]));
                out << to_json(records[i]).dump(1) << '\n';
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };

    const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(cfg.seeds.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);

    write_convergence_csv(cfg.output_dir / convergence_csv_name, records);
    return records;
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << convergence_csv_header << '\n';
    for (const auto& r : records)
        for (const auto& p : r.trace)
            out << r.algorithm << ',' << r.seed << ',' << p.evaluations << ',' << format_scalar(p.best_observed) << ','
                << format_scalar(p.best_true) << '\n';
}

std::vector<ConvergenceRow> read_convergence_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != convergence_csv_header)
        throw ConfigError("'" + path.string() + "' does not start with the convergence header");

    auto parse_scalar = [&](const std::string& s) -> Scalar {
        if (s.empty())
            return std::numeric_limits<Scalar>::quiet_NaN();
        if (s == "inf")
            return std::numeric_limits<Scalar>::infinity();
        return std::stod(s);
    };

    std::vector<ConvergenceRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.emplace_back();
        if (cells.size() != 5)
            throw ConfigError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected 5 columns");
        try {
            rows.push_back({cells[0], std::stoull(cells[1]), std::stoll(cells[2]), parse_scalar(cells[3]), parse_scalar(cells[4])});
        } catch (const std::logic_error&) {
            throw ConfigError("'" + path.string() + "' line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

std::vector<AlgorithmSummary> final_fitness_by_algorithm(const std::vector<ConvergenceRow>& rows)
{
    // algorithm -> seed -> (FEs, observed) of the last row
    std::map<std::string, std::map<std::uint64_t, std::pair<std::int64_t, Scalar>>> last;
    std::vector<std::string> order;
    for (const auto& row : rows) {
        if (!last.contains(row.algorithm))
            order.push_back(row.algorithm);
        auto& slot = last[row.algorithm];
        auto it = slot.find(row.seed);
        if (it == slot.end() || row.evaluations >= it->second.first)
            slot[row.seed] = {row.evaluations, row.best_observed};
    }
    std::vector<AlgorithmSummary> out;
    for (const auto& name : order) {
        AlgorithmSummary s;
        s.algorithm = name;
        for (const auto& [seed, fin] : last[name])
            s.finals.push_back(fin.second);
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

Scalar median_of(std::vector<Scalar> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string marker_for(Scalar p, Scalar kruskal_p, const std::vector<Scalar>& alphas)
{
    for (std::size_t level = 0; level < alphas.size(); ++level)
        if (p < alphas[level] && kruskal_p < alphas[level])
            return std::string(level + 1, '*');
    return "";
}

} // namespace

Comparison compare_summaries(std::vector<AlgorithmSummary> algorithms, std::vector<Scalar> alphas)
{
    if (algorithms.size() < 2)
        throw ConfigError("compare: need at least two algorithms, found " + std::to_string(algorithms.size()));
    if (alphas.empty())
        alphas = {0.05, 0.10};
    std::sort(alphas.begin(), alphas.end());

    Comparison c;
    c.alphas = alphas;
    std::vector<std::vector<Scalar>> samples;
    for (auto& a : algorithms) {
        if (a.finals.size() < 2)
            throw ConfigError("compare: algorithm '" + a.algorithm + "' has fewer than 2 runs");
        const AverageEstimate est = explicit_average(a.finals);
        a.mean = est.mean;
        a.std_dev = *est.std_dev;
        a.median = median_of(a.finals);
        samples.push_back(a.finals);
    }
    c.kruskal = kruskal_wallis(samples);

    std::vector<Scalar> raw;
    for (std::size_t i = 0; i < algorithms.size(); ++i)
        for (std::size_t k = i + 1; k < algorithms.size(); ++k) {
            const TestResult mw = mann_whitney_u(algorithms[i].finals, algorithms[k].finals);
            PairwiseComparison pc;
            pc.first = algorithms[i].algorithm;
            pc.second = algorithms[k].algorithm;
            pc.statistic = mw.statistic;
            pc.p_value = mw.p_value;
            if (algorithms[i].median < algorithms[k].median)
                pc.better = pc.first;
            else if (algorithms[k].median < algorithms[i].median)
                pc.better = pc.second;
            raw.push_back(mw.p_value);
            c.pairs.push_back(std::move(pc));
        }
    const auto adjusted = holm_adjust(raw);
    for (std::size_t i = 0; i < c.pairs.size(); ++i) {
        c.pairs[i].p_holm = adjusted[i];
        c.pairs[i].marker = marker_for(adjusted[i], c.kruskal.p_value, c.alphas);
    }
    c.algorithms = std::move(algorithms);
    return c;
}

Comparison compare_records(const std::vector<std::filesystem::path>& directories, std::vector<Scalar> alphas)
{
    std::vector<ConvergenceRow> rows;
    for (const auto& dir : directories) {
        auto part = read_convergence_csv(dir / convergence_csv_name);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return compare_summaries(final_fitness_by_algorithm(rows), std::move(alphas));
}

json to_json(const Comparison& c)
{
    json algos = json::array();
    for (const auto& a : c.algorithms)
        algos.push_back({{"algorithm", a.algorithm}, {"runs", a.finals.size()}, {"mean", a.mean}, {"std", a.std_dev}, {"median", a.median}});
    json pairs = json::array();
    for (const auto& p : c.pairs)
        pairs.push_back({{"first", p.first},
                         {"second", p.second},
                         {"U", p.statistic},
                         {"p", p.p_value},
                         {"p_holm", p.p_holm},
                         {"better", p.better},
                         {"marker", p.marker}});
    return json{{"alphas", c.alphas},
                {"algorithms", std::move(algos)},
                {"kruskal_wallis", {{"H", c.kruskal.statistic}, {"p", c.kruskal.p_value}}},
                {"mann_whitney_holm", std::move(pairs)}};
}

std::string format_comparison(const Comparison& c)
{
    std::ostringstream os;
    os.setf(std::ios::scientific);
    os.precision(3);
    os << "algorithm                runs        mean         std      median\n";
    for (const auto& a : c.algorithms) {
        os << a.algorithm;
        for (std::size_t pad = a.algorithm.size(); pad < 24; ++pad)
            os << ' ';
        os << ' ' << std::setw(4) << a.finals.size() << ' ' << std::setw(11) << a.mean << ' ' << std::setw(11) << a.std_dev << ' '
           << std::setw(11) << a.median << '\n';
    }
    os << "Kruskal-Wallis H = " << c.kruskal.statistic << ", p = " << c.kruskal.p_value << '\n';
    os << "Mann-Whitney U (two-sided, Holm)";
    for (std::size_t i = 0; i < c.alphas.size(); ++i)
        os << (i ? ", " : ": ") << std::string(i + 1, '*') << " p_holm < " << std::defaultfloat << c.alphas[i] << std::scientific;
    os << '\n';
    for (const auto& p : c.pairs)
        os << "  " << p.first << " vs " << p.second << ": U = " << p.statistic << ", p = " << p.p_value << ", p_holm = " << p.p_holm
           << (p.better.empty() ? "" : ", better: " + p.better) << (p.marker.empty() ? "" : " " + p.marker) << '\n';
    return os.str();
}

void write_group_histogram_csv(const std::filesystem::path& path, const GroupStats& stats)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "group_count,frequency\n";
    for (const auto& [count, freq] : stats.count_histogram)
        out << count << ',' << freq << '\n';
}

json to_json(const GroupStats& stats)
{
    return json{{"dimension", stats.dimension},     {"runs", stats.runs},         {"modal_group_count", stats.modal_count()},
                {"mean_group_count", stats.count_mean}, {"mean_group_size", stats.size_mean}, {"min_group_size", stats.size_min},
                {"max_group_size", stats.size_max}};
}

std::string probability_curve_csv(const std::vector<std::pair<int, Scalar>>& curve)
{
    std::string out = "k,probability\n";
    for (const auto& [k, p] : curve)
        out += std::to_string(k) + ',' + format_scalar(p) + '\n';
    return out;
}

} // namespace ccde
