// Experiment runner: run, compare, groupsim, probcurve.
#include <ccde/experiment.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

void write_or_print(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cooperative coevolution experiments on noisy large-scale problems"};
    app.require_subcommand(1);

    std::string config_path, run_out;
    int jobs = 1;
    auto* run = app.add_subcommand("run", "execute every seeded run of a JSON config");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", run_out, "output directory (overrides output_dir)");
    run->add_option("--jobs,-j", jobs, "parallel runs")->check(CLI::PositiveNumber);

    std::vector<std::string> dirs;
    std::vector<double> alphas{0.05, 0.10};
    std::string compare_out;
    bool compare_json = false;
    auto* compare = app.add_subcommand("compare", "rank tests on final fitness from convergence.csv files");
    compare->add_option("dirs", dirs, "run directories")->required();
    compare->add_option("--alpha", alphas, "significance levels")->expected(1, -1);
    compare->add_option("--out", compare_out, "write the table here instead of stdout");
    compare->add_flag("--json", compare_json, "emit JSON");

    long long dim = 1000, runs = 100000;
    std::uint64_t seed = 1;
    std::string groupsim_out;
    auto* groupsim = app.add_subcommand("groupsim", "group count histogram of automatic random grouping");
    groupsim->add_option("--dim", dim, "dimension")->required()->check(CLI::PositiveNumber);
    groupsim->add_option("--runs", runs, "repetitions")->required()->check(CLI::PositiveNumber);
    groupsim->add_option("--seed", seed, "rng seed");
    groupsim->add_option("--out", groupsim_out, "histogram CSV path; summary goes to stdout");

    int cycles = 60, kmax = 10;
    double groups = 10;
    std::string probcurve_out;
    auto* probcurve = app.add_subcommand("probcurve", "probability of grouping two variables together at least k times");
    probcurve->add_option("--cycles", cycles, "number of cycles N")->required()->check(CLI::NonNegativeNumber);
    probcurve->add_option("--groups", groups, "group count m")->required();
    probcurve->add_option("--kmax", kmax, "largest k")->check(CLI::NonNegativeNumber);
    probcurve->add_option("--out", probcurve_out, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            auto cfg = ccde::load_experiment_config(config_path);
            if (!run_out.empty())
                cfg.output_dir = run_out;
            const auto records = ccde::run_experiment(cfg, jobs);
            for (const auto& r : records)
                std::cout << r.algorithm << " seed " << r.seed << ": best observed " << ccde::format_scalar(r.final_observed) << " after "
                          << r.evaluations << " FEs\n";
            std::cout << "wrote " << records.size() << " records to " << cfg.output_dir.string() << '\n';
        } else if (*compare) {
            std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
            const auto c = ccde::compare_records(paths, alphas);
            write_or_print(compare_out, compare_json ? ccde::to_json(c).dump(2) + "\n" : ccde::format_comparison(c));
        } else if (*groupsim) {
            ccde::Rng rng(seed);
            const auto stats = ccde::simulate_arg(dim, runs, rng);
            if (!groupsim_out.empty())
                ccde::write_group_histogram_csv(groupsim_out, stats);
            std::cout << ccde::to_json(stats).dump(2) << '\n';
        } else if (*probcurve) {
            write_or_print(probcurve_out, ccde::probability_curve_csv(ccde::probability_curve(cycles, groups, kmax)));
        }
    } catch (const ccde::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
