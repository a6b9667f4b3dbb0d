#include "splitfix/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace splitfix {

std::string to_string(BoundCase c)
{
    switch (c) {
    case BoundCase::GPPA: return "GPPA";
    case BoundCase::FBS: return "FBS";
    case BoundCase::DRS_LIP_A: return "DRS_LIP_A";
    case BoundCase::DRS_LIP_B: return "DRS_LIP_B";
    case BoundCase::DRS_PPA: return "DRS_PPA";
    case BoundCase::DYS_LIP_A: return "DYS_LIP_A";
    case BoundCase::DYS_LIP_B: return "DYS_LIP_B";
    }
    return "?";
}

BoundCase bound_case_from(const std::string& name)
{
    for (BoundCase c : all_bound_cases)
        if (to_string(c) == name) return c;
    throw ConfigError("unknown bound case '" + name + "'");
}

namespace {

const char* bound_name(BoundCase c)
{
    switch (c) {
    case BoundCase::GPPA: return "generalized PPA bound";
    case BoundCase::FBS: return "over-relaxed FBS bound";
    case BoundCase::DRS_LIP_A: return "DRS bound with A single-valued Lipschitz";
    case BoundCase::DRS_LIP_B: return "DRS bound with B single-valued Lipschitz";
    case BoundCase::DRS_PPA: return "DRS-as-PPA bound";
    case BoundCase::DYS_LIP_A: return "three-operator bound with A single-valued Lipschitz";
    case BoundCase::DYS_LIP_B: return "three-operator bound with B single-valued Lipschitz";
    }
    return "?";
}

double require_lipschitz(BoundCase c, const RateInputs& in)
{
    if (!in.lipschitz)
        throw ConfigError(std::string(bound_name(c)) + " needs the Lipschitz constant L");
    if (!(*in.lipschitz >= 0.0) || std::isinf(*in.lipschitz))
        throw ConfigError(std::string(bound_name(c)) + ": L must be finite and nonnegative");
    return *in.lipschitz;
}

double require_cocoercivity(BoundCase c, const RateInputs& in)
{
    if (!in.cocoercivity)
        throw ConfigError(std::string(bound_name(c)) + " needs the cocoercivity constant theta");
    const double theta = *in.cocoercivity;
    if (!(theta > 0.0)) throw ConfigError(std::string(bound_name(c)) + ": theta must be positive");
    if (!(in.gamma < 2.0 * theta)) {
        std::ostringstream msg;
        msg << bound_name(c) << ": gamma = " << in.gamma << " violates gamma in (0, 2*theta), theta = " << theta;
        throw ConfigError(msg.str());
    }
    return theta;
}

} // namespace

RateBound rate_bound(BoundCase c, const RateInputs& in, BoundVariant variant)
{
    if (!(in.gamma > 0.0) || !std::isfinite(in.gamma)) throw ConfigError(std::string(bound_name(c)) + ": gamma must be positive");
    if (!(in.kappa >= 0.0) || !std::isfinite(in.kappa)) throw ConfigError(std::string(bound_name(c)) + ": kappa must be nonnegative");
    if (!(in.lambda >= 0.0) || !std::isfinite(in.lambda)) throw ConfigError(std::string(bound_name(c)) + ": lambda must be nonnegative");

    const double g = in.gamma, k = in.kappa, l = in.lambda;
    double rho = 0.0;
    switch (c) {
    case BoundCase::GPPA:
        rho = l * (2.0 - l) * g * g / ((g + k) * (g + k));
        break;
    case BoundCase::FBS: {
        const double delta = fbs_relaxation_bound(g, require_cocoercivity(c, in));
        rho = g * g * l * (delta - l) / ((g + k) * (g + k));
        break;
    }
    case BoundCase::DRS_LIP_A: {
        const double L = require_lipschitz(c, in);
        const double d = 2.0 + std::sqrt(1.0 + g * g * L * L) * (1.0 + k * (1.0 / g + L));
        rho = l * (2.0 - l) / (d * d);
        break;
    }
    case BoundCase::DRS_LIP_B: {
        // beta^2 / (gamma + beta)^2 with beta = 1/L rewritten as 1/(1 + gamma L)^2
        const double L = require_lipschitz(c, in);
        const double a = 1.0 + g * L;
        const double b = 1.0 + k * std::sqrt(1.0 / (g * g) + L * L);
        rho = l * (2.0 - l) / (a * a * b * b);
        break;
    }
    case BoundCase::DRS_PPA:
        rho = l * (2.0 - l) / ((1.0 + k) * (1.0 + k));
        break;
    case BoundCase::DYS_LIP_A: {
        const double L = require_lipschitz(c, in);
        const double theta = require_cocoercivity(c, in);
        const double inv = std::isinf(theta) ? 0.0 : 1.0 / theta;
        // lambda (4 theta - gamma - 2 theta lambda) / (2 theta) = lambda (2 - gamma/(2 theta) - lambda)
        const double num = l * (2.0 - 0.5 * g * inv - l);
        const double d = (2.0 + g * inv) + (g * inv + std::sqrt(1.0 + g * g * L * L)) * (1.0 + k * (1.0 / g + L));
        rho = num / (d * d);
        break;
    }
    case BoundCase::DYS_LIP_B: {
        const double L = require_lipschitz(c, in);
        const double theta = require_cocoercivity(c, in);
        const double inv = std::isinf(theta) ? 0.0 : 1.0 / theta;
        const double num = l * (2.0 - 0.5 * g * inv - l);
        const double excess = std::max(g * g * inv * inv - 2.0 * g * inv, 0.0);
        const double d = 1.0 + k * (L + std::sqrt(1.0 + excess) / g);
        const double a = 1.0 + g * L;
        rho = num / ((variant == BoundVariant::Squared ? a * a : a) * d * d);
        break;
    }
    }

    RateBound out{c, in, rho, 0.0, false};
    double clipped = rho;
    if (!(rho >= 0.0 && rho <= 1.0)) {
        out.clamped = true;
        clipped = std::clamp(rho, 0.0, 1.0);
    }
    out.factor = std::sqrt(1.0 - clipped);
    return out;
}

/**  subregularity transfer  **/

std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::R_TO_F: return "R_TO_F";
    case Provenance::F_TO_R: return "F_TO_R";
    case Provenance::STRONG_MONO_S: return "STRONG_MONO_S";
    case Provenance::ERROR_BOUND: return "ERROR_BOUND";
    case Provenance::USER: return "USER";
    }
    return "?";
}

SubregularityWitness subregularity_transfer(Provenance target, const TransferInputs& in)
{
    if (!(in.gamma > 0.0) || !std::isfinite(in.gamma)) throw ConfigError("subregularity_transfer: gamma must be positive");
    if (!(in.lipschitz >= 0.0) || !std::isfinite(in.lipschitz)) throw ConfigError("subregularity_transfer: L must be nonnegative");
    if (!(in.radius > 0.0)) throw ConfigError("subregularity_transfer: radius must be positive");
    const double g = in.gamma, L = in.lipschitz;

    switch (target) {
    case Provenance::R_TO_F:
        if (!(in.kappa > 0.0)) throw ConfigError("subregularity_transfer: kappa' must be positive");
        return {g * in.kappa, in.radius, target};
    case Provenance::F_TO_R:
        if (!(in.kappa >= 0.0)) throw ConfigError("subregularity_transfer: kappa must be nonnegative");
        return {1.0 + in.kappa * (1.0 / g + L), in.radius / (1.0 + g * L), target};
    case Provenance::ERROR_BOUND:
        if (!(in.kappa > 0.0)) throw ConfigError("subregularity_transfer: kappa'' must be positive");
        return {in.kappa, in.radius / (2.0 + g * L), target};
    case Provenance::STRONG_MONO_S:
        if (!(in.alpha > 0.0)) throw ConfigError("subregularity_transfer: strong monotonicity alpha must be positive");
        return {(1.0 + g * L) * (1.0 / g + L) / in.alpha + g * L,
            std::numeric_limits<double>::infinity(), target};
    case Provenance::USER:
        if (!(in.kappa > 0.0)) throw ConfigError("subregularity_transfer: kappa must be positive");
        return {in.kappa, in.radius, target};
    }
    throw ConfigError("subregularity_transfer: unknown provenance");
}

/**  empirical rates  **/

EmpiricalRate empirical_rate(std::span<const double> samples, double tail_fraction, std::size_t min_samples)
{
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("empirical_rate: tail fraction must lie in (0, 1]");
    min_samples = std::max<std::size_t>(min_samples, 2);
    const std::size_t n = samples.size();
    const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
    if (count < min_samples) {
        std::ostringstream msg;
        msg << "empirical_rate: window holds " << count << " samples, at least " << min_samples << " required";
        throw ConfigError(msg.str());
    }
    const std::size_t first = n - count;
    for (std::size_t k = first; k < n; ++k)
        if (!(samples[k] > 0.0) || !std::isfinite(samples[k])) {
            std::ostringstream msg;
            msg << "empirical_rate: sample " << k << " is " << samples[k]
                << " (precision floor reached; shrink the window)";
            throw NumericError(msg.str());
        }

    double mean_k = 0.0, mean_y = 0.0;
    for (std::size_t k = first; k < n; ++k) {
        mean_k += static_cast<double>(k);
        mean_y += std::log(samples[k]);
    }
    mean_k /= static_cast<double>(count);
    mean_y /= static_cast<double>(count);
    double skk = 0.0, sky = 0.0, syy = 0.0;
    for (std::size_t k = first; k < n; ++k) {
        const double dk = static_cast<double>(k) - mean_k;
        const double dy = std::log(samples[k]) - mean_y;
        skk += dk * dk;
        sky += dk * dy;
        syy += dy * dy;
    }
    const double slope = sky / skk;
    const double ss_res = std::max(syy - slope * sky, 0.0);
    const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return {std::exp(slope), r2, first, n - 1};
}

EmpiricalRate empirical_rate(const IterateTrace& trace, double tail_fraction)
{
    std::vector<double> d;
    d.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        if (std::isnan(r.dist_to_ref)) throw ConfigError("empirical_rate: trace carries no distance to a reference point");
        d.push_back(r.dist_to_ref);
    }
    return empirical_rate(d, tail_fraction, 10);
}

EmpiricalRate empirical_residual_rate(const IterateTrace& trace, double tail_fraction)
{
    std::vector<double> r;
    r.reserve(trace.records.size());
    for (const auto& rec : trace.records) r.push_back(rec.residual);
    return empirical_rate(r, tail_fraction, 10);
}

/**  verifiers  **/

FejerReport check_fejer(const IterateTrace& trace, const Vector& w_ref, double alpha, double tol)
{
    if (!trace.has_snapshots()) throw ConfigError("check_fejer: trace has no iterate snapshots");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("check_fejer: alpha must lie in (0, 1]");
    FejerReport rep;
    rep.worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < trace.w.size(); ++k) {
        const double mu = trace.records[k].lambda;
        const double r = trace.records[k].residual;
        const double before = (trace.w[k] - w_ref).squaredNorm();
        const double after = (trace.w[k + 1] - w_ref).squaredNorm();
        const double slack = before - mu * (1.0 / alpha - mu) * r * r - after;
        rep.slack.push_back(slack);
        rep.worst = std::min(rep.worst, slack);
        if (slack < -tol) rep.violations.push_back(k + 1);
    }
    if (rep.slack.empty()) rep.worst = 0.0;
    return rep;
}

double averaged_slack(const FixedPointMap& t, double alpha, const Vector& x, const Vector& y)
{
    const Vector tx = t(x), ty = t(y);
    const double lhs = (x - y).squaredNorm();
    const double disp = ((x - tx) - (y - ty)).squaredNorm();
    return lhs - (1.0 - alpha) / alpha * disp - (tx - ty).squaredNorm();
}

AveragedReport check_averaged(const FixedPointMap& t, double alpha, std::size_t dim,
    std::size_t n_pairs, Rng& rng, double tol)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("check_averaged: alpha must lie in (0, 1]");
    AveragedReport rep{std::numeric_limits<double>::infinity(), 0, n_pairs};
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const Vector x = rng_gaussian_vector(rng, dim);
        const Vector y = rng_gaussian_vector(rng, dim);
        const double s = averaged_slack(t, alpha, x, y);
        rep.worst_slack = std::min(rep.worst_slack, s);
        if (s < -tol) ++rep.violations;
    }
    if (n_pairs == 0) rep.worst_slack = 0.0;
    return rep;
}

Vector drs_reflection_map(const ProxOperator& a, const ProxOperator& b, double gamma, const Vector& x)
{
    const Vector rb = 2.0 * b.resolvent(gamma, x) - x;
    const Vector ra = 2.0 * a.resolvent(gamma, rb) - rb;
    return 0.5 * (ra + x);
}

Vector dys_map(const ProxOperator& a, const ProxOperator& b, const ForwardOperator& c,
    double gamma, const Vector& x)
{
    const Vector z = b.resolvent(gamma, x);
    return x - z + a.resolvent(gamma, 2.0 * z - x - gamma * c(z));
}

double DrsPpaIdentityReport::max_residual() const
{
    return std::max({balance, fixed_map, displacement});
}

DrsPpaIdentityReport check_drs_ppa_identity(const ProxOperator& a, const ProxOperator& b,
    double gamma, const Vector& x)
{
    if (!(gamma > 0.0)) throw ConfigError("check_drs_ppa_identity: gamma must be positive");
    const Vector z = b.resolvent(gamma, x);
    const Vector y = a.resolvent(gamma, 2.0 * z - x);
    // (u, b) in B and (v, a) in A
    const Vector& u = z;
    const Vector bb = (x - z) / gamma;
    const Vector& v = y;
    const Vector aa = (2.0 * z - x - y) / gamma;
    const Vector tx = drs_reflection_map(a, b, gamma, x);

    DrsPpaIdentityReport rep;
    rep.balance = ((v + gamma * aa) - (u - gamma * bb)).norm();
    rep.fixed_map = (tx - (v + gamma * bb)).norm();
    rep.displacement = ((x - tx) - (u - v)).norm();
    rep.fixed_point_gap = (x - tx).norm();
    return rep;
}

std::string to_string(FixedPointCase c)
{
    switch (c) {
    case FixedPointCase::DRS_A: return "DRS-a";
    case FixedPointCase::DRS_B: return "DRS-b";
    case FixedPointCase::DYS_A: return "DYS-a";
    case FixedPointCase::DYS_B: return "DYS-b";
    }
    return "?";
}

double FixedPointReport::max_residual() const
{
    return std::max({zero_residual, fixed_residual, shadow_residual});
}

Vector residual_R(const ProxOperator& a, const ForwardOperator& b, double gamma, const Vector& z)
{
    if (!(gamma > 0.0)) throw ConfigError("residual_R: gamma must be positive");
    return z - a.resolvent(gamma, z - gamma * b(z));
}

FixedPointReport verify_fixed_point_map(FixedPointCase fc, const ProxOperator& a,
    const ProxOperator& b, const ForwardOperator& c, double gamma, const Vector& z_star)
{
    if (!(gamma > 0.0)) throw ConfigError("verify_fixed_point_map: gamma must be positive");
    const bool drs = fc == FixedPointCase::DRS_A || fc == FixedPointCase::DRS_B;
    if (drs && !c.is_zero()) throw ConfigError("verify_fixed_point_map: DRS cases need C = 0");
    const bool b_single = fc == FixedPointCase::DRS_A || fc == FixedPointCase::DYS_A;
    const ProxOperator& single = b_single ? b : a;
    const ProxOperator& other = b_single ? a : b;
    if (!single.is_single_valued())
        throw ConfigError("verify_fixed_point_map: case " + to_string(fc) + " needs " + (b_single ? "B" : "A")
            + " single-valued, but " + single.label() + " is not");

    // forward part: the single-valued operator plus C
    const ForwardOperator forward("sum", [&single, &c](const Vector& z) { return Vector(single.apply(z) + c(z)); },
        std::nullopt, std::nullopt);

    FixedPointReport rep;
    rep.zero_residual = residual_R(other, forward, gamma, z_star).norm();
    if (b_single) rep.candidate = z_star + gamma * b.apply(z_star);
    else rep.candidate = z_star - gamma * forward(z_star);

    // the DRS map is the three-operator map with C = 0
    const Vector tx = dys_map(a, b, c, gamma, rep.candidate);
    rep.fixed_residual = (tx - rep.candidate).norm();
    rep.shadow_residual = (b.resolvent(gamma, rep.candidate) - z_star).norm();
    return rep;
}

} // namespace splitfix
