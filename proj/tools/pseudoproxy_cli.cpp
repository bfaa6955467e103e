#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pseudoproxy/cli.hpp"

namespace {

using pseudoproxy::io::RunConfig;

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> workers;
    std::vector<std::string> holdout;
};

RunConfig resolve_config(const Overrides& o)
{
    RunConfig cfg;
    if (!o.config_path.empty()) {
        try {
            cfg = pseudoproxy::io::load_config(o.config_path);
        }
        catch (const std::exception& e) {
            throw pseudoproxy::cli::CommandError("config", e.what());
        }
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.reps) cfg.replications = *o.reps;
    if (o.workers) cfg.workers = *o.workers;
    if (!o.holdout.empty()) {
        cfg.holdout.clear();
        for (const auto& h : o.holdout) {
            try {
                cfg.holdout.push_back(pseudoproxy::parse_holdout(h));
            }
            catch (const std::exception& e) {
                throw pseudoproxy::cli::CommandError("usage", e.what());
            }
        }
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lasso vs. composite regression on surrogate proxy data"};
    app.require_subcommand(1);

    Overrides run_opts;
    std::string run_out = "out";
    auto* run = app.add_subcommand("run", "Run the experiment grid and write results, summary and boxplots");
    run->add_option("--config", run_opts.config_path, "JSON config file (defaults apply to absent keys)");
    run->add_option("--out", run_out, "Output directory")->capture_default_str();
    run->add_option("--seed", run_opts.seed, "Master seed");
    run->add_option("--reps", run_opts.reps, "Replications per cell");
    run->add_option("--workers", run_opts.workers, "Worker threads (0 = all cores)");
    run->add_option("--holdout", run_opts.holdout, "Holdout scheme(s): end, interior")->delimiter(',');
    bool quiet = false;
    run->add_flag("--quiet", quiet, "No progress output");

    Overrides fit_opts;
    std::string fit_kind;
    std::string fit_out = "trace.csv";
    auto* example = app.add_subcommand("example-fit", "Trace one example fit over the whole series");
    example->add_option("--kind", fit_kind, "randomwalk-lasso or whitenoise-composite")->required();
    example->add_option("--config", fit_opts.config_path, "JSON config file");
    example->add_option("--seed", fit_opts.seed, "Master seed");
    example->add_option("--holdout", fit_opts.holdout, "Holdout scheme: end or interior");
    example->add_option("--out", fit_out, "Trace CSV path")->capture_default_str();

    std::string matrix_path;
    std::string response_path;
    double lambda_fraction = pseudoproxy::LassoParams{}.lambda_fraction;
    auto* solve = app.add_subcommand("solve", "Fit the Lasso to a CSV design and response");
    solve->add_option("matrix", matrix_path, "Design CSV, one predictor per column")->required();
    solve->add_option("response", response_path, "Response CSV, single column")->required();
    solve->add_option("--lambda-fraction", lambda_fraction, "Penalty as a fraction of lambda_max")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            const RunConfig cfg = resolve_config(run_opts);
            pseudoproxy::ProgressFn progress;
            if (!quiet) {
                progress = [](std::size_t done, std::size_t total) {
                    if (done % 100 == 0 || done == total) {
                        std::cerr << "\r" << done << "/" << total << std::flush;
                        if (done == total) {
                            std::cerr << '\n';
                        }
                    }
                };
            }
            pseudoproxy::cli::cmd_run(cfg, run_out, std::cout, progress);
        }
        else if (*example) {
            const RunConfig cfg = resolve_config(fit_opts);
            pseudoproxy::cli::cmd_example_fit(fit_kind, cfg, fit_out, std::cout);
        }
        else if (*solve) {
            pseudoproxy::LassoParams params;
            params.lambda_fraction = lambda_fraction;
            pseudoproxy::cli::cmd_solve(matrix_path, response_path, params, std::cout);
        }
    }
    catch (const pseudoproxy::cli::CommandError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.stage() == "usage" ? 2 : 1;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
