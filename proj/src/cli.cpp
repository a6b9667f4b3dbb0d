#include "splitfix/cli.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace splitfix {

std::string to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::GPPA: return "gppa";
    case Algorithm::FBS: return "fbs";
    case Algorithm::DRS: return "drs";
    case Algorithm::DYS: return "dys";
    case Algorithm::DRS_AS_PPA: return "drs_as_ppa";
    }
    return "?";
}

Algorithm algorithm_from(const std::string& name)
{
    for (Algorithm a : {Algorithm::GPPA, Algorithm::FBS, Algorithm::DRS, Algorithm::DYS, Algorithm::DRS_AS_PPA})
        if (to_string(a) == name) return a;
    throw ConfigError("unknown algorithm '" + name + "' (expected gppa, fbs, drs, dys or drs_as_ppa)");
}

/**  configuration  **/

namespace {

void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

RelaxationSchedule parse_schedule(const nlohmann::json& s)
{
    if (!s.is_object()) throw ConfigError("config: \"schedule\" must be an object");
    const std::string family = s.at("family").get<std::string>();
    if (family == "constant") {
        reject_unknown_keys(s, {"family", "lambda"}, "config.schedule");
        return RelaxationSchedule::constant(s.at("lambda").get<double>());
    }
    if (family == "vanishing") {
        reject_unknown_keys(s, {"family", "upper", "c"}, "config.schedule");
        return RelaxationSchedule::vanishing(s.at("upper").get<double>(), s.at("c").get<double>());
    }
    if (family == "explicit") {
        reject_unknown_keys(s, {"family", "values"}, "config.schedule");
        return RelaxationSchedule::explicit_values(s.at("values").get<std::vector<double>>());
    }
    throw ConfigError("config: unknown schedule family '" + family + "' (expected constant, vanishing or explicit)");
}

std::vector<double> parse_grid(const nlohmann::json& g, const std::string& name)
{
    if (!g.is_array()) throw ConfigError("config.sweep." + name + " must be an array of numbers");
    return g.get<std::vector<double>>();
}

} // namespace

ExperimentConfig parse_config(const nlohmann::json& doc)
{
    try {
        if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
        if (!doc.contains("schema") || doc.at("schema") != 1)
            throw ConfigError("config: unsupported or missing schema (expected \"schema\": 1)");
        reject_unknown_keys(doc, {"schema", "problem", "algorithm", "swap", "gamma", "lambda", "schedule", "tol",
                                     "max_iter", "kappa", "bound_case", "seed", "start", "tail_fraction",
                                     "reference_tol", "out", "sweep"},
            "config");
        ExperimentConfig cfg;
        if (!doc.contains("problem") || !doc.at("problem").is_object()) throw ConfigError("config: \"problem\" object required");
        cfg.problem = doc.at("problem");
        if (doc.contains("algorithm")) cfg.algorithm = algorithm_from(doc.at("algorithm").get<std::string>());
        cfg.swap = doc.value("swap", false);
        cfg.gamma = doc.value("gamma", 1.0);
        if (doc.contains("lambda") && doc.contains("schedule")) throw ConfigError("config: give either \"lambda\" or \"schedule\"");
        if (doc.contains("lambda")) cfg.schedule = RelaxationSchedule::constant(doc.at("lambda").get<double>());
        if (doc.contains("schedule")) cfg.schedule = parse_schedule(doc.at("schedule"));
        cfg.stop.residual_tol = doc.value("tol", cfg.stop.residual_tol);
        cfg.stop.max_iter = doc.value("max_iter", cfg.stop.max_iter);
        if (doc.contains("kappa")) {
            const auto& k = doc.at("kappa");
            if (k.is_string()) {
                if (k.get<std::string>() != "exact") throw ConfigError("config: \"kappa\" must be a number or \"exact\"");
                cfg.kappa_exact = true;
            } else {
                cfg.kappa = k.get<double>();
            }
        }
        if (doc.contains("bound_case")) cfg.bound_case = bound_case_from(doc.at("bound_case").get<std::string>());
        cfg.seed = doc.value("seed", std::uint64_t{0});
        const std::string start = doc.value("start", std::string("random"));
        if (start != "random" && start != "zero") throw ConfigError("config: \"start\" must be random or zero");
        cfg.random_start = start == "random";
        cfg.tail_fraction = doc.value("tail_fraction", cfg.tail_fraction);
        cfg.reference_tol = doc.value("reference_tol", cfg.reference_tol);
        cfg.out = doc.value("out", cfg.out);
        if (doc.contains("sweep")) {
            const auto& s = doc.at("sweep");
            if (!s.is_object()) throw ConfigError("config: \"sweep\" must be an object");
            reject_unknown_keys(s, {"gamma", "lambda"}, "config.sweep");
            if (s.contains("gamma")) cfg.gamma_grid = parse_grid(s.at("gamma"), "gamma");
            if (s.contains("lambda")) cfg.lambda_grid = parse_grid(s.at("lambda"), "lambda");
        }
        if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0)) throw ConfigError("config: tail_fraction must lie in (0, 1]");
        if (!(cfg.reference_tol > 0.0)) throw ConfigError("config: reference_tol must be positive");
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o)
{
    if (o.gamma) cfg.gamma = *o.gamma;
    if (o.lambda) cfg.schedule = RelaxationSchedule::constant(*o.lambda);
    if (o.seed) {
        cfg.seed = *o.seed;
        if (!cfg.problem.contains("instance")) cfg.problem["seed"] = *o.seed;
    }
    if (o.max_iter) cfg.stop.max_iter = *o.max_iter;
    if (o.tol) cfg.stop.residual_tol = *o.tol;
    if (o.out) cfg.out = *o.out;
    if (o.gamma_grid) cfg.gamma_grid = *o.gamma_grid;
    if (o.lambda_grid) cfg.lambda_grid = *o.lambda_grid;
}

ProblemInstance build_problem(const ExperimentConfig& cfg)
{
    const auto& p = cfg.problem;
    try {
        if (p.contains("instance")) {
            reject_unknown_keys(p, {"instance"}, "config.problem");
            return instance_from_json(p.at("instance"));
        }
        reject_unknown_keys(p, {"kind", "m", "n", "seed", "lambda_reg", "p", "groups", "mu"}, "config.problem");
        const ProblemKind kind = problem_kind_from(p.at("kind").get<std::string>());
        const auto n = p.at("n").get<std::size_t>();
        if (kind == ProblemKind::LINEAR_MONOTONE && p.contains("mu")) {
            const double mu = p.at("mu").get<double>();
            if (!(mu > 0.0)) throw ConfigError("config.problem: mu must be positive");
            const auto dim = static_cast<Eigen::Index>(n);
            if (dim == 0) throw ConfigError("config.problem: n must be at least 1");
            return build_linear_monotone(mu * Matrix::Identity(dim, dim), Vector::Zero(dim));
        }
        const auto m = p.value("m", kind == ProblemKind::LINEAR_MONOTONE ? n : std::size_t{0});
        RandomExtras extras;
        extras.lambda_reg = p.value("lambda_reg", extras.lambda_reg);
        if (p.contains("p")) {
            const auto& pj = p.at("p");
            if (pj.is_string()) {
                if (pj.get<std::string>() != "inf") throw ConfigError("config.problem: p must be 1, 2 or \"inf\"");
                extras.p = std::numeric_limits<double>::infinity();
            } else {
                extras.p = pj.get<double>();
            }
        }
        if (p.contains("groups")) extras.groups = p.at("groups").get<Groups>();
        return random_instance(p.value("seed", cfg.seed), kind, m, n, extras);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config.problem: ") + e.what());
    }
}

namespace {

struct Form {
    const ProxOperator* a = nullptr;
    const ProxOperator* b = nullptr;
    const ForwardOperator* c = nullptr;
};

Form select_form(const ExperimentConfig& cfg, const ProblemInstance& p)
{
    auto missing = [&](const char* what) {
        return ConfigError(to_string(cfg.algorithm) + ": the " + to_string(p.kind) + " instance has no " + what);
    };
    Form f;
    switch (cfg.algorithm) {
    case Algorithm::GPPA:
        if (!p.whole) throw missing("single-operator form F for the proximal point algorithm");
        f.a = &*p.whole;
        break;
    case Algorithm::FBS:
        if (!p.fb) throw missing("forward-backward form (A, C)");
        f.a = &p.fb->a;
        f.c = &p.fb->c;
        break;
    case Algorithm::DRS:
    case Algorithm::DRS_AS_PPA:
        if (!p.dr) throw missing("Douglas-Rachford form (A, B)");
        f.a = &p.dr->a;
        f.b = &p.dr->b;
        break;
    case Algorithm::DYS:
        if (!p.dy) throw missing("three-operator form (A, B, C)");
        f.a = &p.dy->a;
        f.b = &p.dy->b;
        f.c = &p.dy->c;
        break;
    }
    if (cfg.swap) {
        if (!f.b) throw ConfigError(to_string(cfg.algorithm) + ": \"swap\" needs an algorithm with both A and B");
        std::swap(f.a, f.b);
    }
    return f;
}

double theta_of(const ForwardOperator& c, const std::string& algorithm)
{
    if (!c.cocoercivity()) throw ConfigError(algorithm + ": the forward operator needs a cocoercivity constant theta");
    return *c.cocoercivity();
}

BoundCase default_bound_case(const ExperimentConfig& cfg, const Form& f)
{
    auto lip = [](const ProxOperator* op) { return op && op->is_single_valued() && op->lipschitz(); };
    switch (cfg.algorithm) {
    case Algorithm::GPPA: return BoundCase::GPPA;
    case Algorithm::FBS: return BoundCase::FBS;
    case Algorithm::DRS_AS_PPA: return BoundCase::DRS_PPA;
    case Algorithm::DRS:
        if (lip(f.b)) return BoundCase::DRS_LIP_B;
        if (lip(f.a)) return BoundCase::DRS_LIP_A;
        return BoundCase::DRS_PPA;
    case Algorithm::DYS:
        if (lip(f.b)) return BoundCase::DYS_LIP_B;
        if (lip(f.a)) return BoundCase::DYS_LIP_A;
        throw ConfigError("dys: the bound overlay needs A or B single-valued with a known Lipschitz constant");
    }
    return BoundCase::GPPA;
}

RateInputs bound_inputs(BoundCase bc, const Form& f, double gamma, double kappa)
{
    RateInputs in;
    in.gamma = gamma;
    in.kappa = kappa;
    auto lipschitz_of = [&](const ProxOperator* op, const char* name) -> std::optional<double> {
        if (!op || !op->is_single_valued() || !op->lipschitz())
            throw ConfigError(to_string(bc) + ": operator " + name + " must be single-valued with a known Lipschitz constant");
        return op->lipschitz();
    };
    switch (bc) {
    case BoundCase::FBS:
    case BoundCase::DYS_LIP_A:
    case BoundCase::DYS_LIP_B:
        in.cocoercivity = f.c ? f.c->cocoercivity() : std::optional<double>(std::numeric_limits<double>::infinity());
        break;
    default: break;
    }
    if (bc == BoundCase::DRS_LIP_A || bc == BoundCase::DYS_LIP_A) in.lipschitz = lipschitz_of(f.a, "A");
    if (bc == BoundCase::DRS_LIP_B || bc == BoundCase::DYS_LIP_B) in.lipschitz = lipschitz_of(f.b, "B");
    return in;
}

} // namespace

double relaxation_upper_bound(const ExperimentConfig& cfg, const ProblemInstance& problem)
{
    const Form f = select_form(cfg, problem);
    switch (cfg.algorithm) {
    case Algorithm::FBS: return fbs_relaxation_bound(cfg.gamma, theta_of(*f.c, "fbs"));
    case Algorithm::DYS: return dys_relaxation_bound(cfg.gamma, theta_of(*f.c, "dys"));
    default: return 2.0;
    }
}

void check_experiment(const ExperimentConfig& cfg, const ProblemInstance& problem)
{
    const std::string name = to_string(cfg.algorithm);
    if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma))
        throw ConfigError(name + ": step size gamma must be positive and finite");
    const Form f = select_form(cfg, problem);
    if (cfg.algorithm == Algorithm::FBS || cfg.algorithm == Algorithm::DYS) {
        const double theta = theta_of(*f.c, name);
        if (!(cfg.gamma < 2.0 * theta)) {
            std::ostringstream msg;
            msg << name << ": gamma = " << cfg.gamma << " violates gamma in (0, 2*theta) with theta = " << theta;
            throw ConfigError(msg.str());
        }
    }
    const double ub = relaxation_upper_bound(cfg, problem);
    const RelaxationSchedule& s = cfg.schedule;
    std::ostringstream rule;
    rule << name << ": relaxation " << s.describe() << " must stay in the open interval (0, " << ub << ")";
    switch (s.family()) {
    case RelaxationSchedule::Family::Constant:
        if (!(s.lambda() > 0.0 && s.lambda() < ub)) throw ConfigError(rule.str());
        break;
    case RelaxationSchedule::Family::Vanishing: {
        if (!(s.inf() > 0.0) || !(s.upper() <= ub)) throw ConfigError(rule.str());
        const ScheduleCheck sc = schedule_validate(s, ub);
        if (!sc.ok) throw ConfigError(name + ": " + sc.diagnostic);
        break;
    }
    case RelaxationSchedule::Family::Explicit:
        for (double v : s.values())
            if (!(v > 0.0 && v < ub)) throw ConfigError(rule.str());
        break;
    }
    if (cfg.stop.residual_tol <= 0.0 && cfg.stop.max_iter == StopRule::unbounded)
        throw ConfigError(name + ": stop rule needs a residual tolerance or an iteration cap");
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const ProblemInstance& problem,
    const std::optional<Vector>& reference, std::uint64_t stream, std::ostream& log)
{
    const Form f = select_form(cfg, problem);
    Vector x0 = Vector::Zero(static_cast<Eigen::Index>(problem.dim));
    if (cfg.random_start) {
        Rng rng = Rng(cfg.seed).split(stream);
        x0 = rng_gaussian_vector(rng, problem.dim);
    }

    AlgorithmConfig ac;
    ac.gamma = cfg.gamma;
    ac.schedule = cfg.schedule;
    ac.stop = cfg.stop;
    ac.reference = reference;

    // resolve the bound overlay before computing
    std::optional<double> kappa = cfg.kappa;
    if (cfg.kappa_exact) {
        if (!problem.kappa) throw ConfigError("config: \"kappa\": \"exact\" needs an instance with a known modulus");
        kappa = problem.kappa;
    }
    std::optional<BoundCase> bc;
    std::optional<RateInputs> inputs;
    if (kappa) {
        bc = cfg.bound_case ? *cfg.bound_case : default_bound_case(cfg, f);
        inputs = bound_inputs(*bc, f, cfg.gamma, *kappa);
        inputs->lambda = cfg.schedule.at(0);
        (void)rate_bound(*bc, *inputs); // surface ConfigErrors before the run
    }

    RunOutcome out;
    switch (cfg.algorithm) {
    case Algorithm::GPPA: out.trace = gppa_run(*f.a, ac, x0); break;
    case Algorithm::FBS: out.trace = fbs_run(*f.a, *f.c, ac, x0); break;
    case Algorithm::DRS: out.trace = drs_run(*f.a, *f.b, ac, x0); break;
    case Algorithm::DYS: out.trace = dys_run(*f.a, *f.b, *f.c, ac, x0); break;
    case Algorithm::DRS_AS_PPA: out.trace = drs_as_ppa_run(*f.a, *f.b, ac, x0); break;
    }

    if (bc) {
        std::optional<double> last_lambda;
        double last_factor = 0.0;
        for (const auto& rec : out.trace.records) {
            if (!last_lambda || *last_lambda != rec.lambda) {
                inputs->lambda = rec.lambda;
                last_factor = rate_bound(*bc, *inputs).factor;
                last_lambda = rec.lambda;
            }
            out.row_bounds.push_back(last_factor);
        }
        inputs->lambda = cfg.schedule.at(0);
        out.bound_factor = rate_bound(*bc, *inputs).factor;
    } else {
        out.row_bounds.assign(out.trace.records.size(), std::nullopt);
    }

    if (reference) {
        try {
            out.rate = empirical_rate(out.trace, cfg.tail_fraction);
        } catch (const Error& e) {
            log << "warning: no empirical rate: " << e.what() << '\n';
        }
    }
    return out;
}

/**  output  **/

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trace_csv(const RunOutcome& r)
{
    std::string s = "k,lambda_k,fp_residual,dist_to_ref,bound_factor\n";
    const auto& recs = r.trace.records;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        s += std::to_string(recs[i].k);
        s += ',';
        s += format_double(recs[i].lambda);
        s += ',';
        s += format_double(recs[i].residual);
        s += ',';
        if (!std::isnan(recs[i].dist_to_ref)) s += format_double(recs[i].dist_to_ref);
        s += ',';
        if (i < r.row_bounds.size() && r.row_bounds[i]) s += format_double(*r.row_bounds[i]);
        s += '\n';
    }
    return s;
}

namespace {

nlohmann::json number_or_null(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json();
}

std::string status_of(const IterateTrace& t)
{
    return t.reason == StopReason::Converged ? "converged" : "iteration_cap";
}

std::optional<double> parse_field(std::string_view f, std::size_t line)
{
    if (f.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw ConfigError("trace csv: malformed number '" + std::string(f) + "' on line " + std::to_string(line));
    return v;
}

} // namespace

nlohmann::json run_summary(const RunOutcome& r, double tail_fraction)
{
    nlohmann::json s;
    s["algorithm"] = r.trace.algorithm;
    s["status"] = status_of(r.trace);
    s["empirical_rate"] = r.rate ? nlohmann::json(r.rate->rate) : nlohmann::json();
    s["r_squared"] = r.rate ? nlohmann::json(r.rate->r_squared) : nlohmann::json();
    s["window"] = r.rate ? nlohmann::json::array({r.rate->first, r.rate->last}) : nlohmann::json();
    s["tail_fraction"] = tail_fraction;
    s["iterations"] = r.trace.iterations();
    s["final_residual"] = r.trace.final_residual();
    s["bound_factor"] = number_or_null(r.bound_factor);
    return s;
}

std::vector<TraceRow> parse_trace_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "k,lambda_k,fp_residual,dist_to_ref,bound_factor")
        throw ConfigError("trace csv: unexpected header");
    std::vector<TraceRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string_view> f;
        std::string_view rest(line);
        for (;;) {
            const auto pos = rest.find(',');
            f.push_back(rest.substr(0, pos));
            if (pos == std::string_view::npos) break;
            rest.remove_prefix(pos + 1);
        }
        if (f.size() != 5) throw ConfigError("trace csv: line " + std::to_string(lineno) + " does not have 5 fields");
        TraceRow row;
        std::size_t k = 0;
        const auto res = std::from_chars(f[0].data(), f[0].data() + f[0].size(), k);
        if (res.ec != std::errc()) throw ConfigError("trace csv: bad iteration index on line " + std::to_string(lineno));
        row.k = k;
        const auto lam = parse_field(f[1], lineno);
        const auto resid = parse_field(f[2], lineno);
        if (!lam || !resid) throw ConfigError("trace csv: missing lambda_k or fp_residual on line " + std::to_string(lineno));
        row.lambda = *lam;
        row.residual = *resid;
        row.dist = parse_field(f[3], lineno);
        row.bound = parse_field(f[4], lineno);
        rows.push_back(row);
    }
    return rows;
}

/**  subcommands  **/

namespace {

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

std::filesystem::path prepare_out_dir(const std::string& out)
{
    std::filesystem::path dir(out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out + "': " + ec.message());
    return dir;
}

std::optional<Vector> obtain_reference(const ExperimentConfig& cfg, const ProblemInstance& problem, std::ostream& err)
{
    if (problem.reference) return problem.reference->z_star;
    try {
        return reference_solve(problem, cfg.reference_tol).z_star;
    } catch (const Error& e) {
        err << "warning: no reference solution, dist_to_ref left blank: " << e.what() << '\n';
        return std::nullopt;
    }
}

} // namespace

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        const ProblemInstance problem = build_problem(cfg);
        check_experiment(cfg, problem);
        const auto dir = prepare_out_dir(cfg.out);
        const std::optional<Vector> reference = obtain_reference(cfg, problem, err);
        const RunOutcome r = run_experiment(cfg, problem, reference, 0, err);
        write_file(dir / "trace.csv", trace_csv(r));
        write_file(dir / "summary.json", run_summary(r, cfg.tail_fraction).dump(2) + "\n");
        out << to_string(cfg.algorithm) << ": " << status_of(r.trace) << " after " << r.trace.iterations()
            << " iterations, residual " << format_double(r.trace.final_residual());
        if (r.rate) out << ", empirical rate " << format_double(r.rate->rate);
        if (r.bound_factor) out << ", bound factor " << format_double(*r.bound_factor);
        out << '\n';
        return r.trace.reason == StopReason::Converged ? exit_converged : exit_iteration_cap;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_config_error;
    }
}

unsigned sweep_threads()
{
    const char* env = std::getenv("SPLITFIX_THREADS");
    if (env && *env) {
        unsigned v = 0;
        const std::string_view s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0)
            throw ConfigError("SPLITFIX_THREADS must be a positive integer, got '" + std::string(s) + "'");
        return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        if (cfg.gamma_grid.empty() || cfg.lambda_grid.empty()) {
            err << "configuration error: sweep needs nonempty gamma and lambda grids\n";
            return exit_config_error;
        }
        const unsigned threads = sweep_threads();
        const ProblemInstance problem = build_problem(cfg);
        const auto dir = prepare_out_dir(cfg.out);
        const std::optional<Vector> reference = obtain_reference(cfg, problem, err);

        struct Point {
            double gamma, lambda;
            std::string status;
            std::optional<RunOutcome> outcome;
            std::string log;
        };
        std::vector<Point> points;
        for (double g : cfg.gamma_grid)
            for (double l : cfg.lambda_grid) points.push_back({g, l, "", std::nullopt, ""});

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < points.size(); i = next++) {
                Point& pt = points[i];
                ExperimentConfig sub = cfg;
                sub.gamma = pt.gamma;
                sub.schedule = RelaxationSchedule::constant(pt.lambda);
                std::ostringstream log;
                try {
                    check_experiment(sub, problem);
                } catch (const ConfigError& e) {
                    pt.status = "skipped";
                    log << "skipped (gamma " << format_double(pt.gamma) << ", lambda " << format_double(pt.lambda)
                        << "): " << e.what() << '\n';
                    pt.log = log.str();
                    continue;
                }
                try {
                    pt.outcome = run_experiment(sub, problem, reference, i, log);
                    pt.status = status_of(pt.outcome->trace);
                } catch (const Error& e) {
                    pt.status = "failed";
                    log << "failed (gamma " << format_double(pt.gamma) << ", lambda " << format_double(pt.lambda)
                        << "): " << e.what() << '\n';
                }
                pt.log = log.str();
            }
        };
        {
            std::vector<std::jthread> pool;
            const auto n = std::min<std::size_t>(threads, points.size());
            for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
        }

        std::string csv = "gamma,lambda,empirical_rate,r_squared,iterations,bound_factor,status\n";
        std::size_t skipped = 0;
        for (const Point& pt : points) {
            err << pt.log;
            if (pt.status == "skipped") ++skipped;
            csv += format_double(pt.gamma) + ',' + format_double(pt.lambda) + ',';
            if (pt.outcome) {
                const RunOutcome& r = *pt.outcome;
                if (r.rate) csv += format_double(r.rate->rate);
                csv += ',';
                if (r.rate) csv += format_double(r.rate->r_squared);
                csv += ',' + std::to_string(r.trace.iterations()) + ',';
                if (r.bound_factor) csv += format_double(*r.bound_factor);
            } else {
                csv += ",,,";
            }
            csv += ',' + pt.status + '\n';
        }
        write_file(dir / "sweep.csv", csv);
        out << "sweep: " << points.size() << " points, " << skipped << " skipped\n";
        if (skipped == points.size()) {
            err << "configuration error: every grid point violates a precondition\n";
            return exit_config_error;
        }
        return exit_converged;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_config_error;
    }
}

int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> suites;
    if (suite == "all") suites = verify_suites;
    else suites = {suite};
    std::size_t failed = 0;
    try {
        for (const auto& s : suites) {
            for (const auto& r : run_verify_suite(s)) {
                out << (r.ok ? "PASS " : "FAIL ") << s << '/' << r.name;
                if (!r.detail.empty()) out << "  " << r.detail;
                out << '\n';
                if (!r.ok) ++failed;
            }
        }
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const Error& e) {
        err << "verification aborted: " << e.what() << '\n';
        return exit_verify_failed;
    }
    if (failed) {
        err << failed << " propert" << (failed == 1 ? "y" : "ies") << " failed\n";
        return exit_verify_failed;
    }
    return exit_converged;
}

} // namespace splitfix
