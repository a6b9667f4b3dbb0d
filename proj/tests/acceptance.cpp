// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oracles.hpp"

#include "splitfix/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace splitfix;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool ok;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit, const std::function<Verdict()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit > 0 && secs >= time_limit) {
        v.ok = false;
        v.detail += "; runtime limit " + format_double(time_limit) + " s exceeded";
    }
    if (!v.ok) ++failures;
    std::ostringstream t;
    t.precision(3);
    t << std::fixed << secs;
    std::cout << (v.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << t.str() << " s) " << v.detail
              << std::endl;
}

std::string sci(double v)
{
    std::ostringstream s;
    s.precision(2);
    s << std::scientific << v;
    return s.str();
}

bool same_trace(const IterateTrace& a, const IterateTrace& b)
{
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t k = 0; k < a.records.size(); ++k)
        if (std::memcmp(&a.records[k].residual, &b.records[k].residual, sizeof(double)) != 0) return false;
    auto same = [](const Vector& x, const Vector& y) {
        return x.size() == y.size() && std::memcmp(x.data(), y.data(), static_cast<std::size_t>(x.size()) * sizeof(double)) == 0;
    };
    return same(a.final_w, b.final_w) && same(a.final_primal, b.final_primal);
}

AlgorithmConfig fixed(double gamma, double lambda, std::size_t iters)
{
    AlgorithmConfig cfg;
    cfg.gamma = gamma;
    cfg.schedule = RelaxationSchedule::constant(lambda);
    cfg.stop.residual_tol = 0.0;
    cfg.stop.max_iter = iters;
    return cfg;
}

ProblemInstance toy() { return random_instance(19, ProblemKind::LINEAR_MONOTONE, 6, 6); }
ProblemInstance l1l1() { return random_instance(13, ProblemKind::L1L1, 20, 10); }
ProblemInstance lasso() { return random_instance(11, ProblemKind::LASSO, 10, 3, {0.1, 1.0, {}}); }

RateInputs inputs(double g, double k, double l, std::optional<double> lip = std::nullopt,
    std::optional<double> th = std::nullopt)
{
    RateInputs in;
    in.gamma = g;
    in.kappa = k;
    in.lambda = l;
    in.lipschitz = lip;
    in.cocoercivity = th;
    return in;
}

int shell(const std::string& cmd)
{
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict prox_oracles()
{
    Rng r(1001);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        // l1
        const Vector z = 2.0 * rng_gaussian_vector(r, 3);
        const double tau = 0.05 + 1.5 * r.uniform();
        const Vector p1 = prox_l1(z, tau);
        for (Eigen::Index i = 0; i < 3; ++i) {
            const double zi = z(i);
            worst = std::max(worst, std::abs(p1(i) - oracle::golden([&](double v) { return tau * std::abs(v) + 0.5 * (v - zi) * (v - zi); }, -50, 50)));
        }
        // box
        const Vector pb = project_box(z, -0.3, 0.6);
        for (Eigen::Index i = 0; i < 3; ++i) {
            const double zi = z(i);
            worst = std::max(worst, std::abs(pb(i) - oracle::golden([&](double v) { return (v - zi) * (v - zi); }, -0.3, 0.6)));
        }
        // l1 ball: soft threshold at the level found by a 1-D search
        const double radius = 0.2 + r.uniform();
        const Vector pl = project_l1_ball(z, radius);
        Vector expect = z;
        if (z.lpNorm<1>() > radius) {
            const double level = oracle::golden([&](double th) {
                double s = 0.0;
                for (Eigen::Index i = 0; i < 3; ++i) s += std::max(std::abs(z(i)) - th, 0.0);
                return (s - radius) * (s - radius);
            }, 0.0, z.cwiseAbs().maxCoeff());
            for (Eigen::Index i = 0; i < 3; ++i) expect(i) = std::copysign(std::max(std::abs(z(i)) - level, 0.0), z(i));
        }
        worst = std::max(worst, (pl - expect).cwiseAbs().maxCoeff());
        // group l2 and l-inf via Moreau on one 2-block
        const Vector zb = 2.0 * rng_gaussian_vector(r, 2);
        const double a = zb(0), b = zb(1);
        const double rad = std::abs(a) + std::abs(b) + 0.5;
        const Vector g2 = prox_group_lp(zb, {{0, 1}}, {1.0}, tau, LpNorm::Two);
        const Vector gi = prox_group_lp(zb, {{0, 1}}, {1.0}, tau, LpNorm::Inf);
        const auto o2 = oracle::grid_golden_2d([&](double u, double v) { return tau * std::hypot(u, v) + 0.5 * ((u - a) * (u - a) + (v - b) * (v - b)); }, rad);
        const auto oi = oracle::grid_golden_2d([&](double u, double v) {
            return tau * std::max(std::abs(u), std::abs(v)) + 0.5 * ((u - a) * (u - a) + (v - b) * (v - b));
        }, rad);
        worst = std::max({worst, (g2 - o2).cwiseAbs().maxCoeff(), (gi - oi).cwiseAbs().maxCoeff()});
    }
    return {worst <= 1e-6, "max deviation " + sci(worst) + " (tol 1e-06)"};
}

Verdict resolvent_laws()
{
    const ProblemInstance lin = toy(), l1 = l1l1(), la = lasso();
    struct Op {
        ProxOperator op;
        std::size_t dim;
    };
    const std::vector<Op> ops = {{*lin.whole, 6}, {lin.dr->b, 6}, {l1.dr->a, 30}, {l1.dr->b, 30}, {la.dr->a, 3},
        {la.dr->b, 3}, {group_lp_operator({{0, 1}, {2}}, {1.0, 0.5}, 0.7, LpNorm::Inf), 3}};
    double worst_firm = std::numeric_limits<double>::infinity();
    for (const auto& o : ops) {
        Rng r(1002);
        const ProxOperator op = o.op;
        const auto rep = check_averaged([op](const Vector& z) { return op.resolvent(0.8, z); }, 0.5, o.dim, 1000, r);
        worst_firm = std::min(worst_firm, rep.worst_slack);
    }
    Rng r(1003);
    double worst_moreau = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const Vector z = 3.0 * rng_gaussian_vector(r, 4);
        const double gamma = 0.1 + 3.0 * r.uniform(), lam = 0.1 + 2.0 * r.uniform();
        const Vector p = prox_l1(z, gamma * lam);
        const Vector dual = project_box(z / gamma, -lam, lam);
        worst_moreau = std::max(worst_moreau, (p + gamma * dual - z).cwiseAbs().maxCoeff());
        const Vector conj = prox_conjugate(l1_norm_operator(lam), z, gamma);
        worst_moreau = std::max(worst_moreau, (conj - project_box(z, -lam, lam)).cwiseAbs().maxCoeff());
    }
    return {worst_firm >= -1e-10 && worst_moreau <= 1e-12,
        "worst firm-nonexpansive slack " + sci(worst_firm) + " over " + std::to_string(ops.size())
            + " operators x 1000 pairs; Moreau residual " + sci(worst_moreau)};
}

Verdict reductions()
{
    const ProblemInstance lin = toy(), l1 = l1l1(), la = lasso();
    Rng r(1004);
    const Vector x = rng_gaussian_vector(r, 6), xl = rng_gaussian_vector(r, 30), xa = rng_gaussian_vector(r, 3);
    int ok = 0;
    const auto c1 = fixed(0.8, 1.5, 100);
    ok += same_trace(dys_run(l1.dr->a, l1.dr->b, ForwardOperator::zero(), c1, xl), drs_run(l1.dr->a, l1.dr->b, c1, xl));
    const auto c2 = fixed(*la.fb->c.cocoercivity(), 1.2, 100);
    ok += same_trace(dys_run(la.fb->a, zero_operator(), la.fb->c, c2, xa), fbs_run(la.fb->a, la.fb->c, c2, xa));
    const auto c3 = fixed(1.3, 1.7, 100);
    ok += same_trace(drs_run(*lin.whole, zero_operator(), c3, x), gppa_run(*lin.whole, c3, x));
    const auto c4 = fixed(1.0, 1.0, 100);
    ok += same_trace(drs_as_ppa_run(lin.dr->a, lin.dr->b, c4, x), drs_run(lin.dr->a, lin.dr->b, c4, x));
    return {ok == 4, std::to_string(ok) + " of 4 identities bitwise over 100 iterations"};
}

Verdict fejer()
{
    const ProblemInstance lin = toy();
    const Vector& z = lin.reference->z_star;
    Rng r(1005);
    const Vector x0 = 3.0 * rng_gaussian_vector(r, 6);
    std::size_t violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    auto audit = [&](const IterateTrace& t, const Vector& ref) {
        const auto rep = check_fejer(t, ref, t.alpha, 1e-10);
        violations += rep.violations.size();
        worst = std::min(worst, rep.worst);
    };
    auto cfg = fixed(1.0, 1.5, 200);
    cfg.record_iterates = true;
    audit(gppa_run(*lin.whole, cfg, x0), z);
    const double th = *lin.fb->c.cocoercivity();
    auto cf = fixed(th, 0.9 * fbs_relaxation_bound(th, th), 200);
    cf.record_iterates = true;
    audit(fbs_run(lin.fb->a, lin.fb->c, cf, x0), z);
    auto cd = fixed(0.7, 1.5, 200);
    cd.record_iterates = true;
    audit(drs_run(lin.dr->a, lin.dr->b, cd, x0), z + 0.7 * lin.dr->b.apply(z));
    const double ty = *lin.dy->c.cocoercivity();
    auto cy = fixed(0.7, 0.9 * dys_relaxation_bound(0.7, ty), 200);
    cy.record_iterates = true;
    audit(dys_run(lin.dy->a, lin.dy->b, lin.dy->c, cy, x0), z + 0.7 * lin.dy->b.apply(z));
    return {violations == 0, std::to_string(violations) + " violations, worst slack " + sci(worst)};
}

Verdict exact_rate_toy()
{
    const double bound = rate_bound(BoundCase::GPPA, inputs(1, 1, 1)).factor;
    const bool bound_ok = std::abs(bound - 0.8660254) <= 1e-7 && std::abs(bound - std::sqrt(3.0) / 2) <= 1e-9;
    double rate_at_one = 0.0, excess = -1.0;
    for (double g : {0.1, 1.0, 10.0})
        for (double l : {0.5, 1.0, 1.5}) {
            // gamma mu = 1 at every step size
            const double mu = 1.0 / g;
            const ProblemInstance p = build_linear_monotone(mu * Matrix::Identity(3, 3), Vector::Zero(3));
            AlgorithmConfig cfg;
            cfg.gamma = g;
            cfg.schedule = RelaxationSchedule::constant(l);
            cfg.stop.residual_tol = 1e-13;
            cfg.stop.max_iter = 10000;
            cfg.reference = Vector::Zero(3);
            const auto t = gppa_run(*p.whole, cfg, Vector::LinSpaced(3, 1, 3));
            const double rate = empirical_rate(t, 0.5).rate;
            if (g == 1.0 && l == 1.0) rate_at_one = rate;
            excess = std::max(excess, rate - rate_bound(BoundCase::GPPA, inputs(g, *p.kappa, l)).factor);
        }
    const bool ok = bound_ok && std::abs(rate_at_one - 0.5) <= 1e-6 && 0.5 <= bound && excess <= 1e-6;
    return {ok, "rate " + format_double(rate_at_one) + ", bound " + format_double(bound) + ", max excess over grid " + sci(excess)};
}

Verdict bound_formulas()
{
    double degen = 0.0;
    for (double l : {0.1, 0.5, 1.0, 1.5, 1.9}) {
        const double expect = std::sqrt(1 - l * (2 - l));
        degen = std::max({degen, std::abs(rate_bound(BoundCase::GPPA, inputs(0.6, 0, l)).factor - expect),
            std::abs(rate_bound(BoundCase::DRS_PPA, inputs(2.0, 0, l)).factor - expect)});
    }
    Rng r(1006);
    int bad = 0;
    for (BoundCase c : all_bound_cases)
        for (int t = 0; t < 100; ++t) {
            const double L = 0.1 + 3 * r.uniform(), th = 0.2 + 2 * r.uniform();
            const double g = 1.9 * th * (0.05 + 0.95 * r.uniform());
            double ub = 2.0;
            if (c == BoundCase::FBS) ub = fbs_relaxation_bound(g, th);
            if (c == BoundCase::DYS_LIP_A || c == BoundCase::DYS_LIP_B) ub = dys_relaxation_bound(g, th);
            const double l = ub * (0.01 + 0.98 * r.uniform());
            const double k1 = 5 * r.uniform(), k2 = k1 + 5 * r.uniform();
            if (!(rate_bound(c, inputs(g, k1, l, L, th)).factor <= rate_bound(c, inputs(g, k2, l, L, th)).factor)) ++bad;
        }
    return {degen <= 1e-12 && bad == 0,
        "kappa = 0 deviation " + sci(degen) + "; " + std::to_string(bad) + " of 700 tuples break kappa-monotonicity"};
}

Verdict lemma_verifiers()
{
    const ProblemInstance l1 = l1l1();
    Rng r(17);
    double worst_s = 0.0;
    for (int i = 0; i < 100; ++i)
        worst_s = std::max(worst_s, check_drs_ppa_identity(l1.dr->a, l1.dr->b, 1.0, rng_gaussian_vector(r, l1.dim)).max_residual());
    const ProblemInstance lin = toy();
    const Vector& z = lin.reference->z_star;
    const ForwardOperator c0 = ForwardOperator::zero();
    const double worst_f = std::max({
        verify_fixed_point_map(FixedPointCase::DRS_A, lin.dr->a, lin.dr->b, c0, 1.0, z).max_residual(),
        verify_fixed_point_map(FixedPointCase::DRS_B, lin.dr->a, lin.dr->b, c0, 1.0, z).max_residual(),
        verify_fixed_point_map(FixedPointCase::DYS_A, lin.dy->a, lin.dy->b, lin.dy->c, 1.0, z).max_residual(),
        verify_fixed_point_map(FixedPointCase::DYS_B, lin.dy->a, lin.dy->b, lin.dy->c, 1.0, z).max_residual()});
    return {worst_s <= 1e-10 && worst_f <= 1e-10,
        "S-identity max residual " + sci(worst_s) + ", fixed-point max residual " + sci(worst_f)};
}

Verdict l1l1_reproduction()
{
    const ProblemInstance p = l1l1();
    const auto ref = reference_solve(p, 1e-8);
    AlgorithmConfig cfg;
    cfg.gamma = 1.0;
    cfg.schedule = RelaxationSchedule::constant(1.0);
    cfg.stop.residual_tol = 1e-10;
    cfg.stop.max_iter = 50000;
    cfg.reference = ref.z_star;
    const auto t = drs_run(p.dr->a, p.dr->b, cfg, Vector::Zero(static_cast<Eigen::Index>(p.dim)));
    const auto fit = empirical_rate(t, 0.1);
    const bool ok = t.reason == StopReason::Converged && fit.r_squared >= 0.9 && fit.rate < 1.0;
    return {ok, std::to_string(t.iterations()) + " iterations, residual " + sci(t.final_residual()) + ", rate "
            + format_double(fit.rate) + ", R^2 " + format_double(fit.r_squared) + " (tail fraction 0.1)"};
}

Verdict lasso_reproduction()
{
    const ProblemInstance p = lasso();
    const Vector oracle = sign_enum_lasso(p.data.a, p.data.b, p.data.lambda_reg);
    AlgorithmConfig cfg;
    cfg.stop.residual_tol = 1e-13;
    cfg.stop.max_iter = 100000;
    cfg.gamma = *p.fb->c.cocoercivity();
    const auto f = fbs_run(p.fb->a, p.fb->c, cfg, Vector::Zero(3));
    cfg.gamma = 1.0;
    const auto d = drs_run(p.dr->a, p.dr->b, cfg, Vector::Zero(3));
    const double ef = (f.final_primal - oracle).norm(), ed = (d.final_primal - oracle).norm();
    return {ef <= 1e-8 && ed <= 1e-8 && oracle.cwiseAbs().maxCoeff() > 0.0,
        "lambda_reg 0.1: |fbs - oracle| " + sci(ef) + ", |drs - oracle| " + sci(ed)};
}

Verdict oracle_cross_validation()
{
    const Vector b = (Vector(4) << 1.3, -0.05, -2.2, 0.4).finished();
    const ProblemInstance eye = build_lp_lsq(Matrix::Identity(4, 4), b, 0.3, 1.0);
    const double se = (sign_enum_lasso(eye.data.a, eye.data.b, 0.3) - lasso_closed_form_orthonormal(eye)).cwiseAbs().maxCoeff();
    const ProblemInstance p = l1l1();
    const auto ref = cross_algorithm_reference(p, 1e-8);
    return {se <= 1e-12 && ref.residual <= 1e-8,
        "SignEnum vs closed form " + sci(se) + "; cross-algorithm references agree to 1e-8, residual " + sci(ref.residual)};
}

Verdict cli_determinism()
{
    const fs::path root = fs::temp_directory_path() / ("splitfix_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::string cli = SPLITFIX_CLI_PATH;
    const std::string cfg = std::string(SPLITFIX_CONFIG_DIR) + "/l1l1_drs.json";
    const int a = shell(cli + " run " + cfg + " --out " + (root / "a").string() + " > /dev/null 2>&1");
    const int b = shell(cli + " run " + cfg + " --out " + (root / "b").string() + " > /dev/null 2>&1");
    const std::string ca = slurp(root / "a" / "trace.csv"), cb = slurp(root / "b" / "trace.csv");
    const int v = shell(cli + " verify all > " + (root / "verify.txt").string() + " 2>&1");
    fs::remove_all(root);
    const bool ok = a == 0 && b == 0 && !ca.empty() && ca == cb && v == 0;
    return {ok, "run exit codes " + std::to_string(a) + "/" + std::to_string(b) + ", CSV " + std::to_string(ca.size())
            + " bytes " + (ca == cb ? "identical" : "different") + ", verify all exit " + std::to_string(v)};
}

} // namespace

int main()
{
    criterion(1, "prox oracle suite", 5.0, prox_oracles);
    criterion(2, "resolvent laws", 0, resolvent_laws);
    criterion(3, "reduction identities", 0, reductions);
    criterion(4, "Fejer audits", 0, fejer);
    criterion(5, "exact-rate toy", 1.0, exact_rate_toy);
    criterion(6, "bound-formula checks", 0, bound_formulas);
    criterion(7, "lemma verifiers", 0, lemma_verifiers);
    criterion(8, "l1/l1 and lasso reproduction", 60.0, [] {
        const auto t0 = std::chrono::steady_clock::now();
        const Verdict a = l1l1_reproduction();
        const double ta = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const Verdict b = lasso_reproduction();
        const double tb = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() - ta;
        const bool fast = ta < 30.0 && tb < 30.0;
        return Verdict{a.ok && b.ok && fast, "l1/l1: " + a.detail + "; lasso: " + b.detail + "; runtimes "
                + format_double(std::round(ta * 1000) / 1000) + " s and " + format_double(std::round(tb * 1000) / 1000) + " s"};
    });
    criterion(9, "oracle cross-validation", 0, oracle_cross_validation);
    criterion(10, "CLI determinism", 0, cli_determinism);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
