#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <ccde/experiment.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace ccde;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("ccde_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json minimal_config()
{
    return json{{"benchmark", "sphere"}, {"dimension", 10}, {"budget", 5000}, {"seeds", {1, 2}}, {"population_size", 10}};
}

int cli(const std::string& args)
{
    const std::string cmd = std::string(CCDE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<ConvergenceRow> synthetic_rows(const std::string& algorithm, std::vector<double> finals)
{
    std::vector<ConvergenceRow> rows;
    std::uint64_t seed = 1;
    for (double v : finals) {
        rows.push_back({algorithm, seed, 10, v * 2, std::nan("")});
        rows.push_back({algorithm, seed, 20, v, std::nan("")});
        ++seed;
    }
    return rows;
}

} // namespace

TEST_CASE("config parsing and defaults")
{
    const ExperimentConfig c = parse_experiment_config(minimal_config());
    CHECK(c.trial_runs == 2);
    CHECK(c.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(c.noise.kind == NoiseKind::multiplicative);
    CHECK(c.cc.optimizer.variant == Variant::mde_ds);
    CHECK(c.cc.decomposer.strategy == Strategy::arg);

    json j = minimal_config();
    j.erase("seeds");
    j["trial_runs"] = 3;
    j["master_seed"] = 9;
    const ExperimentConfig d = parse_experiment_config(j);
    REQUIRE(d.seeds.size() == 3);
    CHECK(d.seeds[2] == derive_seed(9, 2));
    // adding runs keeps earlier seeds
    j["trial_runs"] = 5;
    CHECK(parse_experiment_config(j).seeds[2] == d.seeds[2]);
}

TEST_CASE("algorithm labels resolve")
{
    CcConfig cc;
    apply_algorithm_label("DECC-DG", 1000, cc);
    CHECK(cc.optimizer.variant == Variant::canonical);
    CHECK(cc.decomposer.strategy == Strategy::dg);
    apply_algorithm_label("DECC-G", 1000, cc);
    CHECK(cc.decomposer.strategy == Strategy::random);
    CHECK(cc.decomposer.group_count == 10);
    apply_algorithm_label("MDE-DSCC-aRG", 1000, cc);
    CHECK(cc.optimizer.variant == Variant::mde_ds);
    CHECK(cc.decomposer.strategy == Strategy::arg);
    for (const char* bad : {"DECC", "PSOCC-aRG", "DECC-XYZ"})
        CHECK_THROWS_AS(apply_algorithm_label(bad, 100, cc), ConfigError);
}

TEST_CASE("config errors name the field")
{
    auto message_for = [](json j) -> std::string {
        try {
            parse_experiment_config(j);
        } catch (const ConfigError& e) {
            return e.what();
        }
        return "";
    };
    json j = minimal_config();
    j["benchmark"] = "griewank";
    CHECK(message_for(j).find("benchmark") != std::string::npos);
    j = minimal_config();
    j["algorithm"] = "DECC-Q";
    CHECK(message_for(j).find("algorithm") != std::string::npos);
    j = minimal_config();
    j["algorithm"] = "DECC-G";
    j["decomposer"] = {{"group_count", 3}};
    CHECK(message_for(j).find("group_count") != std::string::npos);
    j = minimal_config();
    j["colour"] = "red";
    CHECK(message_for(j).find("colour") != std::string::npos);
    j = minimal_config();
    j["dimension"] = "ten";
    CHECK(message_for(j).find("dimension") != std::string::npos);
    j = minimal_config();
    j["trial_runs"] = 3;
    CHECK(message_for(j).find("seeds") != std::string::npos);
    j = minimal_config();
    j["noise"] = {{"kind", "pink"}};
    CHECK(message_for(j).find("noise.kind") != std::string::npos);
}

TEST_CASE("run writes records and a convergence csv")
{
    const fs::path dir = scratch("run");
    ExperimentConfig cfg = parse_experiment_config(minimal_config());
    cfg.output_dir = dir;
    const auto records = run_experiment(cfg, 2);
    REQUIRE(records.size() == 2);
    CHECK(fs::exists(dir / record_file_name(cfg.algorithm, 1)));
    CHECK(fs::exists(dir / record_file_name(cfg.algorithm, 2)));
    CHECK(fs::exists(dir / convergence_csv_name));
    for (const auto& r : records) {
        CHECK(r.trace.back().evaluations == 5000);
        CHECK(r.evaluations == 5000);
    }

    const auto rows = read_convergence_csv(dir / convergence_csv_name);
    std::size_t expected = 0;
    for (const auto& r : records)
        expected += r.trace.size();
    CHECK(rows.size() == expected);
    CHECK(std::isnan(rows.front().best_true));
    CHECK(rows.front().best_observed == records.front().trace.front().best_observed);
}

TEST_CASE("records round-trip")
{
    ExperimentConfig cfg = parse_experiment_config(minimal_config());
    cfg.cc.track_true = true;
    cfg.cc.record_groupings = true;
    const RunRecord r = execute_run(cfg, 5);
    const json j = to_json(r);
    const RunRecord back = run_record_from_json(json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(back.final_true.has_value());
    CHECK(back.groupings.history.size() == static_cast<std::size_t>(back.groupings.cycles));

    RunRecord broken = r;
    std::swap(broken.trace[0], broken.trace[1]);
    CHECK_THROWS_AS(validate_run_record(broken), ConfigError);
}

TEST_CASE("same config, byte-identical records")
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    ExperimentConfig cfg = parse_experiment_config(minimal_config());
    cfg.output_dir = a;
    run_experiment(cfg, 1);
    cfg.output_dir = b;
    run_experiment(cfg, 2);
    for (std::uint64_t seed : {1, 2})
        CHECK(slurp(a / record_file_name(cfg.algorithm, seed)) == slurp(b / record_file_name(cfg.algorithm, seed)));
    CHECK(slurp(a / convergence_csv_name) == slurp(b / convergence_csv_name));
}

TEST_CASE("timing is opt-in")
{
    ExperimentConfig cfg = parse_experiment_config(minimal_config());
    CHECK(!execute_run(cfg, 1).wall_clock_seconds);
    cfg.record_timing = true;
    CHECK(execute_run(cfg, 1).wall_clock_seconds.has_value());
}

TEST_CASE("compare: identical sets give p = 1 and no markers")
{
    auto rows = synthetic_rows("A", {1, 2, 3, 4, 5});
    auto more = synthetic_rows("B", {1, 2, 3, 4, 5});
    rows.insert(rows.end(), more.begin(), more.end());
    const Comparison c = compare_summaries(final_fitness_by_algorithm(rows), {0.05, 0.10});
    CHECK(c.kruskal.p_value == doctest::Approx(1.0));
    REQUIRE(c.pairs.size() == 1);
    CHECK(c.pairs[0].p_value == doctest::Approx(1.0));
    CHECK(c.pairs[0].p_holm == doctest::Approx(1.0));
    CHECK(c.pairs[0].marker.empty());
}

TEST_CASE("compare: disjoint ranges give a marker")
{
    auto rows = synthetic_rows("A", {1, 2, 3, 4, 5, 6, 7, 8});
    auto more = synthetic_rows("B", {11, 12, 13, 14, 15, 16, 17, 18});
    rows.insert(rows.end(), more.begin(), more.end());
    const Comparison c = compare_summaries(final_fitness_by_algorithm(rows), {0.05, 0.10});
    REQUIRE(c.pairs.size() == 1);
    CHECK(c.pairs[0].p_holm < 0.05);
    CHECK(c.pairs[0].marker == "*");
    CHECK(c.pairs[0].better == "A");
    // mean and std equal a direct recomputation
    CHECK(c.algorithms[0].mean == doctest::Approx(4.5));
    CHECK(c.algorithms[0].std_dev == doctest::Approx(std::sqrt(42.0 / 7.0)));
    CHECK(c.algorithms[1].median == doctest::Approx(14.5));
    CHECK(format_comparison(c).find("A vs B") != std::string::npos);
}

TEST_CASE("compare refuses tiny groups")
{
    auto rows = synthetic_rows("A", {1});
    auto more = synthetic_rows("B", {2, 3});
    rows.insert(rows.end(), more.begin(), more.end());
    CHECK_THROWS_AS(compare_summaries(final_fitness_by_algorithm(rows), {0.05}), ConfigError);
    CHECK_THROWS_AS(compare_summaries(final_fitness_by_algorithm(more), {0.05}), ConfigError);
}

TEST_CASE("compare reads run directories")
{
    const fs::path a = scratch("cmp_a"), b = scratch("cmp_b");
    json j = minimal_config();
    j["algorithm"] = "DECC-aRG";
    j["budget"] = 2000;
    ExperimentConfig ca = parse_experiment_config(j);
    ca.output_dir = a;
    run_experiment(ca, 2);
    j["algorithm"] = "MDE-DSCC-aRG";
    ExperimentConfig cb = parse_experiment_config(j);
    cb.output_dir = b;
    const auto recs = run_experiment(cb, 2);
    const Comparison c = compare_records({a, b}, {0.05, 0.10});
    REQUIRE(c.algorithms.size() == 2);
    CHECK(c.algorithms[1].algorithm == "MDE-DSCC-aRG");
    CHECK(c.algorithms[1].finals[0] == recs[0].final_observed);
}

TEST_CASE("format_scalar round-trips")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5})
        CHECK(std::stod(format_scalar(v)) == v);
    CHECK(format_scalar(std::nan("")).empty());
    CHECK(format_scalar(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("command line")
{
    const fs::path dir = scratch("cli");
    json j = minimal_config();
    j["output_dir"] = (dir / "runs").string();
    {
        std::ofstream(dir / "ok.json") << j.dump();
    }
    CHECK(cli("run " + (dir / "ok.json").string()) == 0);
    CHECK(fs::exists(dir / "runs" / convergence_csv_name));

    j["algorithm"] = "DECC-nope";
    {
        std::ofstream(dir / "bad.json") << j.dump();
    }
    CHECK(cli("run " + (dir / "bad.json").string()) == 2);
    {
        std::ofstream(dir / "garbage.json") << "{not json";
    }
    CHECK(cli("run " + (dir / "garbage.json").string()) == 2);
    CHECK(cli("run " + (dir / "missing.json").string()) == 2);

    CHECK(cli("groupsim --dim 50 --runs 100 --out " + (dir / "hist.csv").string()) == 0);
    CHECK(slurp(dir / "hist.csv").rfind("group_count,frequency\n", 0) == 0);
    CHECK(cli("probcurve --cycles 60 --groups 10 --out " + (dir / "curve.csv").string()) == 0);
    CHECK(slurp(dir / "curve.csv").find("1,0.998") != std::string::npos);
    CHECK(cli("probcurve --cycles 5 --groups 10 --kmax 9") == 2);
    CHECK(cli("compare " + (dir / "runs").string()) == 2);
    CHECK(cli("bogus") == 2);
}
