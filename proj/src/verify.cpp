#include "splitfix/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <sstream>

namespace splitfix {

namespace {

constexpr std::uint64_t toy_seed = 19;
constexpr std::size_t toy_dim = 6;
constexpr std::uint64_t l1l1_seed = 13;
constexpr std::uint64_t lasso_seed = 11;

std::string sci(double v)
{
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

PropertyResult within(std::string name, double value, double tol, const std::string& what = "max residual")
{
    return {std::move(name), value <= tol, what + " " + sci(value) + " (tol " + sci(tol) + ")"};
}

ProblemInstance toy() { return random_instance(toy_seed, ProblemKind::LINEAR_MONOTONE, toy_dim, toy_dim); }

/* argmin of a unimodal f on [a, b] by golden-section search */
double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 90)
{
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/* argmin over R^2 by nested golden-section search on [-R, R]^2 */
Vector golden_min_2d(const std::function<double(double, double)>& f, double radius)
{
    auto inner = [&](double u) { return golden_min([&](double v) { return f(u, v); }, -radius, radius, 70); };
    const double u = golden_min([&](double u1) { return f(u1, inner(u1)); }, -radius, radius, 70);
    Vector out(2);
    out << u, inner(u);
    return out;
}

/**  proxes  **/

std::vector<PropertyResult> suite_proxes()
{
    std::vector<PropertyResult> out;
    Rng rng(0x70726f78);
    const int points = 100;

    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const Vector z = 2.0 * rng_gaussian_vector(rng, 4);
        const double tau = 0.1 + 1.9 * rng.uniform();
        const Vector p = prox_l1(z, tau);
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            const double zj = z(j);
            const double u = golden_min([&](double v) { return tau * std::abs(v) + 0.5 * (v - zj) * (v - zj); },
                -std::abs(zj) - 1.0, std::abs(zj) + 1.0);
            worst = std::max(worst, std::abs(u - p(j)));
        }
    }
    out.push_back(within("l1 prox vs golden-section", worst, 1e-6, "max deviation"));

    worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const Vector z = 2.0 * rng_gaussian_vector(rng, 4);
        const double lo = -rng.uniform(), hi = rng.uniform();
        const Vector p = project_box(z, lo, hi);
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            const double zj = z(j);
            const double u = golden_min([&](double v) { return (v - zj) * (v - zj); }, lo, hi);
            worst = std::max(worst, std::abs(u - p(j)));
        }
    }
    out.push_back(within("box projection vs golden-section", worst, 1e-6, "max deviation"));

    worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const Vector z = 2.0 * rng_gaussian_vector(rng, 5);
        const double radius = 0.2 + 2.0 * rng.uniform();
        const Vector p = project_l1_ball(z, radius);
        // soft-threshold level theta solving sum max(|z_i| - theta, 0) = radius
        Vector expect = z;
        if (z.lpNorm<1>() > radius) {
            const double theta = golden_min([&](double t) {
                const double g = (z.cwiseAbs().array() - t).max(0.0).sum() - radius;
                return g * g;
            }, 0.0, z.cwiseAbs().maxCoeff());
            expect = prox_l1(z, theta);
        }
        worst = std::max(worst, (expect - p).cwiseAbs().maxCoeff());
    }
    out.push_back(within("l1-ball projection vs threshold search", worst, 1e-6, "max deviation"));

    worst = 0.0;
    const Groups pairs = {{0, 1}, {2, 3}};
    for (int i = 0; i < points; ++i) {
        const Vector z = 2.0 * rng_gaussian_vector(rng, 4);
        const double tau = 0.1 + 1.9 * rng.uniform();
        const Vector p2 = prox_group_lp(z, pairs, {1.0, 1.0}, tau, LpNorm::Two);
        const Vector pinf = prox_group_lp(z, pairs, {1.0, 1.0}, tau, LpNorm::Inf);
        for (const auto& g : pairs) {
            const double z0 = z(static_cast<Eigen::Index>(g[0])), z1 = z(static_cast<Eigen::Index>(g[1]));
            const double rad = std::abs(z0) + std::abs(z1) + 1.0;
            const Vector u2 = golden_min_2d([&](double a, double b) {
                return tau * std::hypot(a, b) + 0.5 * ((a - z0) * (a - z0) + (b - z1) * (b - z1));
            }, rad);
            const Vector ui = golden_min_2d([&](double a, double b) {
                return tau * std::max(std::abs(a), std::abs(b)) + 0.5 * ((a - z0) * (a - z0) + (b - z1) * (b - z1));
            }, rad);
            for (int c = 0; c < 2; ++c) {
                const auto idx = static_cast<Eigen::Index>(g[static_cast<std::size_t>(c)]);
                worst = std::max({worst, std::abs(u2(c) - p2(idx)), std::abs(ui(c) - pinf(idx))});
            }
        }
    }
    out.push_back(within("group-l2 and l-inf proxes vs 2-D golden-section", worst, 1e-6, "max deviation"));

    worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vector z = 3.0 * rng_gaussian_vector(rng, 4);
        const double lam = 0.1 + 2.0 * rng.uniform();
        const double gamma = 0.1 + 3.0 * rng.uniform();
        // conjugate of lam ||.||_1 is the indicator of the lam-box
        const Vector conj = prox_conjugate(l1_norm_operator(lam), z, gamma);
        worst = std::max(worst, (conj - project_box(z, -lam, lam)).cwiseAbs().maxCoeff());
        const Vector split = prox_l1(z, gamma * lam) + gamma * project_box(z / gamma, -lam, lam);
        worst = std::max(worst, (split - z).cwiseAbs().maxCoeff());
    }
    out.push_back(within("Moreau identity", worst, 1e-12));
    return out;
}

/**  reductions  **/

bool bitwise_equal(const IterateTrace& a, const IterateTrace& b)
{
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t k = 0; k < a.records.size(); ++k)
        if (std::memcmp(&a.records[k].residual, &b.records[k].residual, sizeof(double)) != 0) return false;
    auto same = [](const Vector& x, const Vector& y) {
        return x.size() == y.size()
            && std::memcmp(x.data(), y.data(), static_cast<std::size_t>(x.size()) * sizeof(double)) == 0;
    };
    return same(a.final_w, b.final_w) && same(a.final_primal, b.final_primal);
}

AlgorithmConfig fixed_iterations(double gamma, double lambda, std::size_t iters)
{
    AlgorithmConfig cfg;
    cfg.gamma = gamma;
    cfg.schedule = RelaxationSchedule::constant(lambda);
    cfg.stop.residual_tol = 0.0;
    cfg.stop.max_iter = iters;
    return cfg;
}

PropertyResult identity(std::string name, const IterateTrace& a, const IterateTrace& b)
{
    const bool ok = bitwise_equal(a, b);
    return {std::move(name), ok, ok ? "bitwise equal over " + std::to_string(a.iterations()) + " iterations" : "traces differ"};
}

std::vector<PropertyResult> suite_reductions()
{
    std::vector<PropertyResult> out;
    const ProblemInstance lin = toy();
    const ProblemInstance l1 = random_instance(l1l1_seed, ProblemKind::L1L1, 20, 10);
    const ProblemInstance la = random_instance(lasso_seed, ProblemKind::LASSO, 10, 3, {0.1, 1.0, {}});
    Rng rng(0x726564);
    const Vector x_lin = rng_gaussian_vector(rng, lin.dim);
    const Vector x_l1 = rng_gaussian_vector(rng, l1.dim);
    const Vector x_la = rng_gaussian_vector(rng, la.dim);
    const std::size_t iters = 100;

    {
        const auto cfg = fixed_iterations(0.8, 1.5, iters);
        out.push_back(identity("dys(C=0) == drs [linear toy]",
            dys_run(lin.dr->a, lin.dr->b, ForwardOperator::zero(), cfg, x_lin), drs_run(lin.dr->a, lin.dr->b, cfg, x_lin)));
        out.push_back(identity("dys(C=0) == drs [l1/l1]",
            dys_run(l1.dr->a, l1.dr->b, ForwardOperator::zero(), cfg, x_l1), drs_run(l1.dr->a, l1.dr->b, cfg, x_l1)));
    }
    {
        const double theta = *lin.fb->c.cocoercivity();
        const auto cfg = fixed_iterations(theta, 1.2, iters);
        out.push_back(identity("dys(B=0) == fbs [linear toy]",
            dys_run(lin.fb->a, zero_operator(), lin.fb->c, cfg, x_lin), fbs_run(lin.fb->a, lin.fb->c, cfg, x_lin)));
        const double theta_la = *la.fb->c.cocoercivity();
        const auto cfg_la = fixed_iterations(theta_la, 1.2, iters);
        out.push_back(identity("dys(B=0) == fbs [lasso]",
            dys_run(la.fb->a, zero_operator(), la.fb->c, cfg_la, x_la), fbs_run(la.fb->a, la.fb->c, cfg_la, x_la)));
    }
    {
        const auto cfg = fixed_iterations(1.3, 1.7, iters);
        out.push_back(identity("drs(B=0) == gppa [linear toy]",
            drs_run(*lin.whole, zero_operator(), cfg, x_lin), gppa_run(*lin.whole, cfg, x_lin)));
        out.push_back(identity("drs(B=0) == gppa [l1 regularizer]",
            drs_run(la.dr->a, zero_operator(), cfg, x_la), gppa_run(la.dr->a, cfg, x_la)));
    }
    {
        const auto cfg = fixed_iterations(1.0, 1.0, iters);
        out.push_back(identity("drs_as_ppa == drs [linear toy]",
            drs_as_ppa_run(lin.dr->a, lin.dr->b, cfg, x_lin), drs_run(lin.dr->a, lin.dr->b, cfg, x_lin)));
        out.push_back(identity("drs_as_ppa == drs [l1/l1]",
            drs_as_ppa_run(l1.dr->a, l1.dr->b, cfg, x_l1), drs_run(l1.dr->a, l1.dr->b, cfg, x_l1)));
    }
    return out;
}

/**  fejer  **/

PropertyResult fejer(std::string name, const IterateTrace& t, const Vector& w_ref)
{
    const FejerReport rep = check_fejer(t, w_ref, t.alpha);
    std::string detail = std::to_string(rep.violations.size()) + " violations over " + std::to_string(rep.slack.size())
        + " steps, worst slack " + sci(rep.worst);
    return {std::move(name), rep.ok(), detail};
}

std::vector<PropertyResult> suite_fejer()
{
    std::vector<PropertyResult> out;
    const ProblemInstance lin = toy();
    const Vector& z_star = lin.reference->z_star;
    Rng rng(0x66656a);
    const Vector x0 = 3.0 * rng_gaussian_vector(rng, lin.dim);
    const std::size_t iters = 200;

    auto cfg = fixed_iterations(1.0, 1.5, iters);
    cfg.record_iterates = true;
    out.push_back(fejer("gppa", gppa_run(*lin.whole, cfg, x0), z_star));

    const double theta = *lin.fb->c.cocoercivity();
    auto cfg_fb = fixed_iterations(theta, 0.9 * fbs_relaxation_bound(theta, theta), iters);
    cfg_fb.record_iterates = true;
    out.push_back(fejer("fbs", fbs_run(lin.fb->a, lin.fb->c, cfg_fb, x0), z_star));

    const double gamma = 0.7;
    auto cfg_dr = fixed_iterations(gamma, 1.5, iters);
    cfg_dr.record_iterates = true;
    const Vector x_dr = z_star + gamma * lin.dr->b.apply(z_star);
    out.push_back(fejer("drs", drs_run(lin.dr->a, lin.dr->b, cfg_dr, x0), x_dr));

    const double theta_dy = *lin.dy->c.cocoercivity();
    auto cfg_dy = fixed_iterations(gamma, 0.9 * dys_relaxation_bound(gamma, theta_dy), iters);
    cfg_dy.record_iterates = true;
    const Vector x_dy = z_star + gamma * lin.dy->b.apply(z_star);
    out.push_back(fejer("dys", dys_run(lin.dy->a, lin.dy->b, lin.dy->c, cfg_dy, x0), x_dy));
    return out;
}

/**  lemmas  **/

std::vector<PropertyResult> suite_lemmas()
{
    std::vector<PropertyResult> out;
    {
        const ProblemInstance l1 = random_instance(l1l1_seed, ProblemKind::L1L1, 20, 10);
        Rng rng(17);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vector x = rng_gaussian_vector(rng, l1.dim);
            worst = std::max(worst, check_drs_ppa_identity(l1.dr->a, l1.dr->b, 1.0, x).max_residual());
        }
        out.push_back(within("S-operator identity [l1/l1, 100 probes]", worst, verification_tol));

        const Vector x = rng_gaussian_vector(rng, 5);
        const auto rep = check_drs_ppa_identity(zero_operator(), zero_operator(), 1.0, x);
        out.push_back({"S-operator identity [A = B = 0]", rep.max_residual() == 0.0 && rep.fixed_point_gap == 0.0,
            "residuals exactly zero"});
    }
    {
        const ProblemInstance lin = toy();
        const Vector& z_star = lin.reference->z_star;
        for (double gamma : {1.0, 0.4}) {
            const std::string g = " [gamma " + format_double(gamma) + "]";
            const auto ra = verify_fixed_point_map(FixedPointCase::DRS_A, lin.dr->a, lin.dr->b, ForwardOperator::zero(), gamma, z_star);
            const auto rb = verify_fixed_point_map(FixedPointCase::DRS_B, lin.dr->a, lin.dr->b, ForwardOperator::zero(), gamma, z_star);
            const auto ya = verify_fixed_point_map(FixedPointCase::DYS_A, lin.dy->a, lin.dy->b, lin.dy->c, gamma, z_star);
            const auto yb = verify_fixed_point_map(FixedPointCase::DYS_B, lin.dy->a, lin.dy->b, lin.dy->c, gamma, z_star);
            out.push_back(within("fixed point DRS-a" + g, ra.max_residual(), verification_tol));
            out.push_back(within("fixed point DRS-b" + g, rb.max_residual(), verification_tol));
            out.push_back(within("fixed point DYS-a" + g, ya.max_residual(), verification_tol));
            out.push_back(within("fixed point DYS-b" + g, yb.max_residual(), verification_tol));
            const auto da = verify_fixed_point_map(FixedPointCase::DYS_A, lin.dr->a, lin.dr->b, ForwardOperator::zero(), gamma, z_star);
            out.push_back({"DYS-a with C = 0 reproduces DRS-a" + g,
                da.candidate == ra.candidate && da.fixed_residual == ra.fixed_residual, "exact agreement"});
        }
    }
    {
        const ProblemInstance lin = toy();
        const ProblemInstance l1 = random_instance(l1l1_seed, ProblemKind::L1L1, 20, 10);
        struct Named {
            std::string name;
            ProxOperator op;
            std::size_t dim;
        };
        const std::vector<Named> ops = {{"linear toy", *lin.whole, lin.dim}, {"l1 norm", l1_norm_operator(0.7), 6},
            {"l1/l1 product", l1.dr->a, l1.dim}, {"l1/l1 skew", l1.dr->b, l1.dim}};
        for (const auto& o : ops) {
            Rng rng(0x617667);
            const ProxOperator op = o.op;
            const auto rep = check_averaged([op](const Vector& z) { return op.resolvent(0.9, z); }, 0.5, o.dim, 1000, rng);
            out.push_back({"firm nonexpansiveness [" + o.name + "]", rep.ok(),
                std::to_string(rep.violations) + " violations, worst slack " + sci(rep.worst_slack)});
        }
    }
    return out;
}

/**  bounds  **/

std::vector<PropertyResult> suite_bounds()
{
    std::vector<PropertyResult> out;
    auto factor = [](BoundCase c, double g, double k, double l, std::optional<double> lip = std::nullopt,
                      std::optional<double> th = std::nullopt) {
        RateInputs in;
        in.gamma = g;
        in.kappa = k;
        in.lambda = l;
        in.lipschitz = lip;
        in.cocoercivity = th;
        return rate_bound(c, in).factor;
    };
    out.push_back(within("GPPA(1, 1, 1) = sqrt(3)/2", std::abs(factor(BoundCase::GPPA, 1, 1, 1) - std::sqrt(3.0) / 2), 1e-12, "deviation"));
    out.push_back(within("DRS_PPA(kappa 1, lambda 1) = sqrt(3)/2", std::abs(factor(BoundCase::DRS_PPA, 1, 1, 1) - std::sqrt(3.0) / 2), 1e-12, "deviation"));
    out.push_back(within("FBS(gamma 1, theta 1, kappa 1, lambda 0.75)",
        std::abs(factor(BoundCase::FBS, 1, 1, 0.75, std::nullopt, 1.0) - std::sqrt(1.0 - 0.5625 / 4.0)), 1e-12, "deviation"));

    double worst = 0.0;
    for (double l : {0.25, 0.5, 1.0, 1.5, 1.75}) {
        const double expect = std::sqrt(1.0 - l * (2.0 - l));
        worst = std::max({worst, std::abs(factor(BoundCase::GPPA, 0.7, 0.0, l) - expect),
            std::abs(factor(BoundCase::DRS_PPA, 0.7, 0.0, l) - expect)});
    }
    out.push_back(within("kappa = 0 degeneration", worst, 1e-12, "deviation"));

    Rng rng(0x6b617070);
    for (BoundCase c : all_bound_cases) {
        std::size_t bad = 0;
        for (int t = 0; t < 100; ++t) {
            RateInputs in;
            in.lipschitz = 0.1 + 3.0 * rng.uniform();
            in.cocoercivity = 0.2 + 2.0 * rng.uniform();
            in.gamma = 1.9 * *in.cocoercivity * (0.05 + 0.95 * rng.uniform());
            double ub = 2.0;
            if (c == BoundCase::FBS) ub = fbs_relaxation_bound(in.gamma, *in.cocoercivity);
            if (c == BoundCase::DYS_LIP_A || c == BoundCase::DYS_LIP_B) ub = dys_relaxation_bound(in.gamma, *in.cocoercivity);
            in.lambda = ub * (0.02 + 0.96 * rng.uniform());
            const double k1 = 5.0 * rng.uniform();
            const double k2 = k1 + 5.0 * rng.uniform();
            in.kappa = k1;
            const double f1 = rate_bound(c, in).factor;
            in.kappa = k2;
            const double f2 = rate_bound(c, in).factor;
            if (!(f1 <= f2) || f1 < 0.0 || f2 > 1.0) ++bad;
        }
        out.push_back({"kappa-monotone " + to_string(c), bad == 0, std::to_string(bad) + " of 100 tuples violate"});
    }

    TransferInputs ti;
    ti.gamma = 1.0;
    ti.kappa = 2.0;
    out.push_back(within("R_TO_F(gamma 1, kappa' 2) = 2", std::abs(subregularity_transfer(Provenance::R_TO_F, ti).kappa - 2.0), 0.0, "deviation"));
    ti.kappa = 0.0;
    ti.lipschitz = 3.0;
    out.push_back(within("F_TO_R(kappa 0) = 1", std::abs(subregularity_transfer(Provenance::F_TO_R, ti).kappa - 1.0), 0.0, "deviation"));
    TransferInputs sm;
    sm.gamma = 1.0;
    sm.lipschitz = 1.0;
    sm.alpha = 1.0;
    out.push_back(within("STRONG_MONO_S(alpha 1, L 1, gamma 1) = 5",
        std::abs(subregularity_transfer(Provenance::STRONG_MONO_S, sm).kappa - 5.0), 1e-12, "deviation"));

    // bound validity on F z = mu z, where kappa = 1/mu exactly
    double excess = -1.0;
    for (double gamma : {0.1, 1.0, 10.0})
        for (double lambda : {0.5, 1.0, 1.5}) {
            const double mu = 1.3;
            const ProblemInstance p = build_linear_monotone(mu * Matrix::Identity(3, 3), Vector::Zero(3));
            AlgorithmConfig cfg;
            cfg.gamma = gamma;
            cfg.schedule = RelaxationSchedule::constant(lambda);
            cfg.stop.residual_tol = 1e-13;
            cfg.stop.max_iter = 100000;
            cfg.reference = Vector::Zero(3);
            Vector z0(3);
            z0 << 1.0, -2.0, 0.5;
            const auto t = gppa_run(*p.whole, cfg, z0);
            const double rate = empirical_rate(t, 1.0).rate;
            excess = std::max(excess, rate - factor(BoundCase::GPPA, gamma, 1.0 / mu, lambda));
        }
    out.push_back({"empirical rate <= GPPA bound on mu I", excess <= 1e-6, "max excess " + sci(excess)});
    return out;
}

} // namespace

std::vector<PropertyResult> run_verify_suite(const std::string& suite)
{
    if (suite == "proxes") return suite_proxes();
    if (suite == "reductions") return suite_reductions();
    if (suite == "fejer") return suite_fejer();
    if (suite == "lemmas") return suite_lemmas();
    if (suite == "bounds") return suite_bounds();
    throw ConfigError("unknown verify suite '" + suite + "' (expected proxes, reductions, fejer, lemmas, bounds or all)");
}

} // namespace splitfix
