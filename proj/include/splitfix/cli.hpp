#pragma once

#include "splitfix/analysis.hpp"
#include "splitfix/problems.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace splitfix {

/* exit statuses shared by every subcommand */
enum ExitCode : int {
    exit_converged = 0,
    exit_config_error = 1,
    exit_iteration_cap = 2,
    exit_verify_failed = 3,
};

enum class Algorithm { GPPA, FBS, DRS, DYS, DRS_AS_PPA };

std::string to_string(Algorithm a);
Algorithm algorithm_from(const std::string& name);

/*=============================================================================
 * One experiment, read from a JSON document with "schema": 1:
 *
 *   {
 *     "schema": 1,
 *     "problem": {"kind": "L1L1", "m": 20, "n": 10, "seed": 13, "lambda_reg": 1},
 *     "algorithm": "drs",            gppa | fbs | drs | dys | drs_as_ppa
 *     "swap": false,                 exchange the roles of A and B
 *     "gamma": 1.0,
 *     "lambda": 1.0,                 or "schedule": {"family": "vanishing", "upper": 2, "c": 1}
 *     "tol": 1e-10, "max_iter": 10000,
 *     "kappa": 1.0,                  number or "exact"; enables the bound overlay
 *     "bound_case": "DRS_LIP_B",     defaults per algorithm
 *     "seed": 0,                     start-point stream (and problem seed when absent there)
 *     "start": "random",             random | zero
 *     "tail_fraction": 0.5,
 *     "reference_tol": 1e-8,
 *     "out": ".",
 *     "sweep": {"gamma": [...], "lambda": [...]}
 *   }
 *
 * "problem" may instead be {"instance": {...}} holding a serialized instance,
 * or a LINEAR_MONOTONE spec with "mu": M = mu I, q = 0.
 *===========================================================================*/
struct ExperimentConfig {
    nlohmann::json problem;
    Algorithm algorithm = Algorithm::DRS;
    bool swap = false;
    double gamma = 1.0;
    RelaxationSchedule schedule = RelaxationSchedule::constant(1.0);
    StopRule stop;
    std::optional<double> kappa;
    bool kappa_exact = false;
    std::optional<BoundCase> bound_case;
    std::uint64_t seed = 0;
    bool random_start = true;
    double tail_fraction = 0.5;
    double reference_tol = 1e-8;
    std::string out = ".";
    std::vector<double> gamma_grid;
    std::vector<double> lambda_grid;
};

struct Overrides {
    std::optional<double> gamma;
    std::optional<double> lambda;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_iter;
    std::optional<double> tol;
    std::optional<std::string> out;
    std::optional<std::vector<double>> gamma_grid;
    std::optional<std::vector<double>> lambda_grid;
};

/* ConfigError on unknown keys, wrong types or a missing/unsupported schema */
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

ProblemInstance build_problem(const ExperimentConfig& cfg);

/* the relaxation bound of the algorithm on this instance: 2 for GPPA and DRS,
 * delta for FBS, (4 theta - gamma)/(2 theta) for DYS */
double relaxation_upper_bound(const ExperimentConfig& cfg, const ProblemInstance& problem);

/* ConfigError unless every lambda_k lies in the open interval (0, ub) and
 * gamma satisfies the algorithm's step-size rule */
void check_experiment(const ExperimentConfig& cfg, const ProblemInstance& problem);

struct RunOutcome {
    IterateTrace trace;
    std::optional<EmpiricalRate> rate;
    std::optional<double> bound_factor;      // at lambda_0
    std::vector<std::optional<double>> row_bounds; // per record
};

/* runs one configuration; `stream` selects the start-point RNG stream */
RunOutcome run_experiment(const ExperimentConfig& cfg, const ProblemInstance& problem,
    const std::optional<Vector>& reference, std::uint64_t stream, std::ostream& log);

/* shortest representation that round-trips, "." decimal */
std::string format_double(double v);

std::string trace_csv(const RunOutcome& r);
nlohmann::json run_summary(const RunOutcome& r, double tail_fraction);

struct TraceRow {
    std::size_t k;
    double lambda;
    double residual;
    std::optional<double> dist;
    std::optional<double> bound;
};

std::vector<TraceRow> parse_trace_csv(const std::string& text);

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/* SPLITFIX_THREADS, defaulting to the hardware concurrency */
unsigned sweep_threads();

struct PropertyResult {
    std::string name;
    bool ok;
    std::string detail;
};

inline const std::vector<std::string> verify_suites = {"proxes", "reductions", "fejer", "lemmas", "bounds"};

/* ConfigError for an unknown suite */
std::vector<PropertyResult> run_verify_suite(const std::string& suite);

/* prints one line per property; exit_verify_failed if any fails */
int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err);

} // namespace splitfix
