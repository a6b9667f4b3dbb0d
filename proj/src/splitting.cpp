#include "splitfix/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace splitfix {

/**  schedules  **/

RelaxationSchedule RelaxationSchedule::constant(double lambda)
{
    if (!std::isfinite(lambda)) throw ConfigError("constant schedule: lambda must be finite");
    RelaxationSchedule s;
    s.family_ = Family::Constant;
    s.a_ = lambda;
    return s;
}

RelaxationSchedule RelaxationSchedule::vanishing(double upper, double c)
{
    if (!(upper > 0.0) || !std::isfinite(upper)) throw ConfigError("vanishing schedule: upper bound must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("vanishing schedule: c must be positive");
    RelaxationSchedule s;
    s.family_ = Family::Vanishing;
    s.a_ = upper;
    s.b_ = c;
    return s;
}

RelaxationSchedule RelaxationSchedule::explicit_values(std::vector<double> values)
{
    if (values.empty()) throw ConfigError("explicit schedule: no values");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("explicit schedule: values must be finite");
    RelaxationSchedule s;
    s.family_ = Family::Explicit;
    s.values_ = std::move(values);
    return s;
}

double RelaxationSchedule::at(std::size_t k) const
{
    switch (family_) {
    case Family::Constant: return a_;
    case Family::Vanishing: return a_ - b_ / static_cast<double>(k + 1);
    case Family::Explicit: break;
    }
    return values_[k % values_.size()];
}

double RelaxationSchedule::sup() const
{
    switch (family_) {
    case Family::Constant: return a_;
    case Family::Vanishing: return a_;
    case Family::Explicit: break;
    }
    return *std::max_element(values_.begin(), values_.end());
}

double RelaxationSchedule::inf() const
{
    switch (family_) {
    case Family::Constant: return a_;
    case Family::Vanishing: return a_ - b_;
    case Family::Explicit: break;
    }
    return *std::min_element(values_.begin(), values_.end());
}

std::string RelaxationSchedule::describe() const
{
    std::ostringstream s;
    switch (family_) {
    case Family::Constant: s << "constant(" << a_ << ")"; break;
    case Family::Vanishing: s << "vanishing(" << a_ << " - " << b_ << "/(k+1))"; break;
    case Family::Explicit: s << "explicit(" << values_.size() << " values)"; break;
    }
    return s.str();
}

ScheduleCheck schedule_validate(const RelaxationSchedule& schedule, double ub)
{
    if (!(ub > 0.0)) throw ConfigError("schedule_validate: ub must be positive");
    std::ostringstream diag;
    switch (schedule.family()) {
    case RelaxationSchedule::Family::Constant: {
        const double l = schedule.lambda();
        if (l > 0.0 && l < ub) {
            diag << "constant " << l << " in (0, " << ub << "): every term equals " << l * (ub - l) << " > 0";
            return {true, diag.str()};
        }
        if (l == 0.0 || l == ub) diag << "constant " << l << ": every term lambda(ub - lambda) is zero";
        else diag << "constant " << l << " lies outside [0, " << ub << "]";
        return {false, diag.str()};
    }
    case RelaxationSchedule::Family::Vanishing: {
        const double u = schedule.upper(), c = schedule.c();
        if (u > ub) {
            diag << "vanishing schedule tends to " << u << " > " << ub;
            return {false, diag.str()};
        }
        if (c > u) {
            diag << "vanishing schedule starts at " << u - c << " < 0";
            return {false, diag.str()};
        }
        if (u < ub) diag << "terms tend to " << u * (ub - u) << " > 0";
        else diag << "terms equal lambda_k c/(k+1) with lambda_k -> " << u << ", a harmonic tail";
        return {true, diag.str()};
    }
    case RelaxationSchedule::Family::Explicit:
        break;
    }
    throw ConfigError("schedule_validate: explicit schedules are not analysed (no symbolic series test)");
}

/**  admissibility  **/

double fbs_relaxation_bound(double gamma, double cocoercivity)
{
    return std::min(1.0, cocoercivity / gamma) + 0.5;
}

double dys_relaxation_bound(double gamma, double cocoercivity)
{
    if (std::isinf(cocoercivity)) return 2.0;
    return (4.0 * cocoercivity - gamma) / (2.0 * cocoercivity);
}

void check_relaxation_within(const RelaxationSchedule& s, double ub, const std::string& rule)
{
    if (s.inf() < 0.0 || s.sup() > ub) {
        std::ostringstream msg;
        msg << "relaxation " << s.describe() << " leaves [0, " << ub << "] (" << rule << ")";
        throw ConfigError(msg.str());
    }
}

namespace {

void check_gamma(double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("step size gamma must be positive and finite");
}

double cocoercivity_of(const ForwardOperator& c, const char* algorithm)
{
    if (!c.cocoercivity())
        throw ConfigError(std::string(algorithm) + ": the forward operator C needs a cocoercivity constant theta");
    return *c.cocoercivity();
}

void check_step_vs_cocoercivity(double gamma, double theta, const char* algorithm)
{
    if (!(gamma < 2.0 * theta)) {
        std::ostringstream msg;
        msg << algorithm << ": gamma = " << gamma << " violates gamma in (0, 2*theta) with theta = " << theta
            << " (cocoercivity bound)";
        throw ConfigError(msg.str());
    }
}

} // namespace

void check_fbs_admissible(double gamma, const ForwardOperator& c, const RelaxationSchedule& s)
{
    check_gamma(gamma);
    const double theta = cocoercivity_of(c, "fbs");
    check_step_vs_cocoercivity(gamma, theta, "fbs");
    check_relaxation_within(s, fbs_relaxation_bound(gamma, theta), "fbs: lambda_k in [0, min(1, theta/gamma) + 1/2]");
}

void check_dys_admissible(double gamma, const ForwardOperator& c, const RelaxationSchedule& s)
{
    check_gamma(gamma);
    const double theta = cocoercivity_of(c, "dys");
    check_step_vs_cocoercivity(gamma, theta, "dys");
    check_relaxation_within(s, dys_relaxation_bound(gamma, theta), "dys: lambda_k in [0, (4 theta - gamma)/(2 theta)]");
}

/**  engine  **/

namespace {

struct Step {
    Vector direction; // T w - w
    Vector primal;
    Vector aux;
};

using StepFn = std::function<void(const Vector& w, Step& out)>;

struct EngineOptions {
    const RelaxationSchedule& schedule;
    const StopRule& stop;
    bool record;
    const std::optional<Vector>& reference;
    bool has_aux;
};

[[noreturn]] void fail_at(const std::string& algorithm, std::size_t k, const std::string& what)
{
    std::ostringstream msg;
    msg << algorithm << ": " << what << " at iteration " << k;
    throw NumericError(msg.str());
}

IterateTrace run_engine(std::string algorithm, const StepFn& step, const Vector& w0,
    const EngineOptions& opt, double alpha)
{
    if (opt.stop.residual_tol <= 0.0 && opt.stop.max_iter == StopRule::unbounded)
        throw ConfigError(algorithm + ": stop rule needs a residual tolerance or an iteration cap");
    if (!w0.allFinite()) fail_at(algorithm, 0, "non-finite starting point");
    if (opt.reference && opt.reference->size() == 0)
        throw ConfigError(algorithm + ": empty reference point");

    IterateTrace trace;
    trace.algorithm = std::move(algorithm);
    trace.alpha = alpha;

    Vector w = w0;
    Step s;
    for (std::size_t k = 0;; ++k) {
        step(w, s);
        const double r = s.direction.norm();
        if (!std::isfinite(r) || !s.primal.allFinite()) fail_at(trace.algorithm, k, "non-finite iterate");
        if (r > divergence_threshold) fail_at(trace.algorithm, k, "divergence (residual above 1e12)");

        const double lambda = opt.schedule.at(k);
        double dist = std::numeric_limits<double>::quiet_NaN();
        if (opt.reference) {
            if (opt.reference->size() != s.primal.size())
                throw ConfigError(trace.algorithm + ": reference point has the wrong dimension");
            dist = (s.primal - *opt.reference).norm();
        }
        trace.records.push_back({k, lambda, r, dist});
        if (opt.record) {
            trace.w.push_back(w);
            trace.primal.push_back(s.primal);
            if (opt.has_aux) trace.aux.push_back(s.aux);
        }

        if (opt.stop.residual_tol > 0.0 && r <= opt.stop.residual_tol) {
            trace.reason = StopReason::Converged;
            break;
        }
        if (k >= opt.stop.max_iter) {
            trace.reason = StopReason::IterationCap;
            break;
        }
        w += lambda * s.direction;
        if (!w.allFinite()) fail_at(trace.algorithm, k + 1, "non-finite iterate");
    }
    trace.final_w = std::move(w);
    trace.final_primal = std::move(s.primal);
    return trace;
}

} // namespace

IterateTrace km_run(const FixedPointMap& t, const Vector& w0, const RelaxationSchedule& schedule,
    double avg_bound, const StopRule& stop, bool record_iterates,
    const std::optional<Vector>& reference)
{
    if (!(avg_bound > 0.0 && avg_bound <= 1.0)) throw ConfigError("km_run: averagedness constant must lie in (0, 1]");
    check_relaxation_within(schedule, 1.0 / avg_bound, "km: mu_k in [0, 1/alpha]");
    StepFn step = [&t](const Vector& w, Step& out) {
        out.direction = t(w) - w;
        out.primal = w;
    };
    return run_engine("km", step, w0, {schedule, stop, record_iterates, reference, false}, avg_bound);
}

IterateTrace gppa_run(const ProxOperator& f, const AlgorithmConfig& cfg, const Vector& z0)
{
    check_gamma(cfg.gamma);
    check_relaxation_within(cfg.schedule, 2.0, "gppa: lambda_k in [0, 2]");
    const double gamma = cfg.gamma;
    StepFn step = [&f, gamma](const Vector& z, Step& out) {
        out.direction = f.resolvent(gamma, z) - z;
        out.primal = z;
    };
    return run_engine("gppa", step, z0, {cfg.schedule, cfg.stop, cfg.record_iterates, cfg.reference, false}, 0.5);
}

IterateTrace fbs_run(const ProxOperator& a, const ForwardOperator& c,
    const AlgorithmConfig& cfg, const Vector& z0)
{
    check_fbs_admissible(cfg.gamma, c, cfg.schedule);
    const double gamma = cfg.gamma;
    const double delta = fbs_relaxation_bound(gamma, *c.cocoercivity());
    StepFn step = [&a, &c, gamma](const Vector& z, Step& out) {
        out.direction = a.resolvent(gamma, z - gamma * c(z)) - z;
        out.primal = z;
    };
    return run_engine("fbs", step, z0, {cfg.schedule, cfg.stop, cfg.record_iterates, cfg.reference, false}, 1.0 / delta);
}

IterateTrace drs_run(const ProxOperator& a, const ProxOperator& b,
    const AlgorithmConfig& cfg, const Vector& x0)
{
    check_gamma(cfg.gamma);
    check_relaxation_within(cfg.schedule, 2.0, "drs: lambda_k in [0, 2]");
    const double gamma = cfg.gamma;
    StepFn step = [&a, &b, gamma](const Vector& x, Step& out) {
        out.primal = b.resolvent(gamma, x);
        out.aux = a.resolvent(gamma, 2.0 * out.primal - x);
        out.direction = out.aux - out.primal;
    };
    return run_engine("drs", step, x0, {cfg.schedule, cfg.stop, cfg.record_iterates, cfg.reference, true}, 0.5);
}

IterateTrace dys_run(const ProxOperator& a, const ProxOperator& b, const ForwardOperator& c,
    const AlgorithmConfig& cfg, const Vector& x0)
{
    check_dys_admissible(cfg.gamma, c, cfg.schedule);
    const double gamma = cfg.gamma;
    const double theta = *c.cocoercivity();
    const double alpha = std::isinf(theta) ? 0.5 : 2.0 * theta / (4.0 * theta - gamma);
    StepFn step = [&a, &b, &c, gamma](const Vector& x, Step& out) {
        out.primal = b.resolvent(gamma, x);
        out.aux = a.resolvent(gamma, 2.0 * out.primal - x - gamma * c(out.primal));
        out.direction = out.aux - out.primal;
    };
    return run_engine("dys", step, x0, {cfg.schedule, cfg.stop, cfg.record_iterates, cfg.reference, true}, alpha);
}

IterateTrace drs_as_ppa_run(const ProxOperator& a, const ProxOperator& b,
    const AlgorithmConfig& cfg, const Vector& x0)
{
    IterateTrace trace = drs_run(a, b, cfg, x0);
    trace.algorithm = "drs_as_ppa";
    return trace;
}

} // namespace splitfix
