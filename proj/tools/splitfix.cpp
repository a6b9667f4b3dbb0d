#include "splitfix/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace splitfix;

namespace {

void add_overrides(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--gamma", o.gamma, "step size gamma");
    cmd->add_option("--lambda", o.lambda, "constant relaxation lambda");
    cmd->add_option("--seed", o.seed, "problem and start-point seed");
    cmd->add_option("--max-iter", o.max_iter, "iteration cap");
    cmd->add_option("--tol", o.tol, "fixed-point residual tolerance (<= 0 disables)");
    cmd->add_option("--out", o.out, "output directory");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"splitfix: monotone-operator splitting experiments"};
    app.require_subcommand(1);

    std::string run_config, sweep_config, suite;
    Overrides run_over, sweep_over;
    std::vector<double> gammas, lambdas;

    auto* run = app.add_subcommand("run", "run one configuration; writes trace.csv and summary.json");
    run->add_option("config", run_config, "JSON configuration file")->required();
    add_overrides(run, run_over);

    auto* sweep = app.add_subcommand("sweep", "run a gamma x lambda grid; writes sweep.csv");
    sweep->add_option("config", sweep_config, "JSON configuration file")->required();
    add_overrides(sweep, sweep_over);
    sweep->add_option("--gammas", gammas, "gamma grid (overrides the config)")->delimiter(',');
    sweep->add_option("--lambdas", lambdas, "lambda grid (overrides the config)")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "run a property suite");
    verify->add_option("suite", suite, "proxes | reductions | fejer | lemmas | bounds | all")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config_error;
    }

    try {
        if (*run) {
            ExperimentConfig cfg = load_config(run_config);
            apply_overrides(cfg, run_over);
            return cmd_run(cfg, std::cout, std::cerr);
        }
        if (*sweep) {
            ExperimentConfig cfg = load_config(sweep_config);
            if (!gammas.empty()) sweep_over.gamma_grid = gammas;
            if (!lambdas.empty()) sweep_over.lambda_grid = lambdas;
            apply_overrides(cfg, sweep_over);
            return cmd_sweep(cfg, std::cout, std::cerr);
        }
        return cmd_verify(suite, std::cout, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    }
}
