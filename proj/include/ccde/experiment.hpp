#pragma once

#include <ccde/analysis.hpp>
#include <ccde/cc.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ccde {

/// One experiment: a benchmark, a noise model, an algorithm and a set of seeds.
struct ExperimentConfig {
    std::string benchmark = "sphere";
    Index dimension = 100;
    NoiseModel noise{NoiseKind::multiplicative, 0.1};
    std::string algorithm = "MDE-DSCC-aRG";
    CcConfig cc;
    std::int64_t budget = 150000;
    std::uint64_t master_seed = 1;
    int trial_runs = 25;
    std::vector<std::uint64_t> seeds; // resolved: explicit list or derived from master_seed
    std::filesystem::path output_dir = "runs";
    bool record_timing = false;
};

/// Fills optimizer/decomposer settings implied by an algorithm label
/// ("DECC-aRG", "MDE-DSCC-aRG", "DECC-DG", "DECC-G", "DECC-D", "DECC-ML", "DECC-VIL").
void apply_algorithm_label(const std::string& label, Index dimension, CcConfig& cc);

/// Per-run seed `index` of a master seed. Adding runs never changes earlier seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Parses and validates a config. Errors are ConfigError naming the offending field.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct RunRecord {
    nlohmann::json config; // normalised echo
    std::string algorithm;
    std::uint64_t seed = 0;
    std::int64_t budget = 0;
    std::int64_t evaluations = 0;
    std::int64_t generations = 0;
    std::vector<TracePoint> trace;
    Vector final_context;
    Scalar final_observed = unevaluated;
    std::optional<Scalar> final_true;
    GroupingSummary groupings;
    std::optional<Scalar> wall_clock_seconds;
};

RunRecord execute_run(const ExperimentConfig& cfg, std::uint64_t seed);

nlohmann::json to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);

/// Trace FEs strictly increasing, last point within budget, FE total consistent.
void validate_run_record(const RunRecord& r);

std::string record_file_name(const std::string& algorithm, std::uint64_t seed);

/// Runs every seed, writes one JSON record per run and `convergence.csv`.
/// Runs execute on up to `jobs` threads; output is independent of `jobs`.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, int jobs = 1);

inline constexpr const char* convergence_csv_name = "convergence.csv";
inline constexpr const char* convergence_csv_header = "algorithm,seed,FEs,best_observed,best_true";

void write_convergence_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);

struct ConvergenceRow {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::int64_t evaluations = 0;
    Scalar best_observed = 0;
    Scalar best_true = 0; // NaN when not tracked
};

std::vector<ConvergenceRow> read_convergence_csv(const std::filesystem::path& path);

struct AlgorithmSummary {
    std::string algorithm;
    std::vector<Scalar> finals; // one per seed, ordered by seed
    Scalar mean = 0;
    Scalar std_dev = 0;
    Scalar median = 0;
};

struct PairwiseComparison {
    std::string first;
    std::string second;
    Scalar statistic = 0;
    Scalar p_value = 1;
    Scalar p_holm = 1;
    std::string better; // algorithm with the lower median, empty when equal
    std::string marker; // "*" for the first alpha level met, "**" for the second, ...
};

struct Comparison {
    std::vector<Scalar> alphas;
    std::vector<AlgorithmSummary> algorithms;
    TestResult kruskal;
    std::vector<PairwiseComparison> pairs;
};

/// Final observed fitness per (algorithm, seed), from the last row of each trace.
std::vector<AlgorithmSummary> final_fitness_by_algorithm(const std::vector<ConvergenceRow>& rows);

/// Kruskal-Wallis across algorithms, then pairwise two-sided Mann-Whitney
/// with Holm adjustment. Markers are only given when Kruskal-Wallis is
/// significant at the same level.
Comparison compare_records(const std::vector<std::filesystem::path>& directories, std::vector<Scalar> alphas);
Comparison compare_summaries(std::vector<AlgorithmSummary> algorithms, std::vector<Scalar> alphas);

nlohmann::json to_json(const Comparison& c);
std::string format_comparison(const Comparison& c);

void write_group_histogram_csv(const std::filesystem::path& path, const GroupStats& stats);
nlohmann::json to_json(const GroupStats& stats);

std::string probability_curve_csv(const std::vector<std::pair<int, Scalar>>& curve);

/// Shortest round-trip decimal form used in every CSV.
std::string format_scalar(Scalar v);

} // namespace ccde
