#include "splitfix/analysis.hpp"
#include "splitfix/problems.hpp"

#include <doctest.h>

#include <cmath>

using namespace splitfix;

namespace {

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

/* the bound formulas written out term by term, independently of the library */
double oracle_rho(BoundCase c, double g, double k, double l, double L, double th, bool squared = false)
{
    const double beta = 1.0 / L;
    switch (c) {
    case BoundCase::GPPA: return l * (2 - l) * std::pow(g / (g + k), 2);
    case BoundCase::FBS: {
        const double delta = std::min(1.0, th / g) + 0.5;
        return std::pow(g, 2) * l * (delta - l) / std::pow(g + k, 2);
    }
    case BoundCase::DRS_LIP_A:
        return l * (2 - l) / std::pow(2 + std::sqrt(1 + g * g / (beta * beta)) * (1 + k * (1 / g + 1 / beta)), 2);
    case BoundCase::DRS_LIP_B:
        return l * (2 - l) * std::pow(beta / (g + beta), 2) / std::pow(1 + k * std::sqrt(1 / (g * g) + 1 / (beta * beta)), 2);
    case BoundCase::DRS_PPA: return l * (2 - l) / std::pow(1 + k, 2);
    case BoundCase::DYS_LIP_A: {
        const double den = (2 + g / th) + (g / th + std::sqrt(1 + g * g / (beta * beta))) * (1 + k * (1 / g + 1 / beta));
        return l * (4 * th - g - 2 * th * l) / (2 * th * den * den);
    }
    case BoundCase::DYS_LIP_B: {
        const double lead = squared ? std::pow(1 + g / beta, 2) : (1 + g / beta);
        const double inner = 1 + k * (1 / beta + std::sqrt(1 + std::max((g * g - 2 * g * th) / (th * th), 0.0)) / g);
        return l * (4 * th - g - 2 * th * l) / (2 * th * lead * inner * inner);
    }
    }
    return 0.0;
}

ProblemInstance toy() { return random_instance(19, ProblemKind::LINEAR_MONOTONE, 6, 6); }

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("rate_bound closed-form examples")
{
    CHECK(std::abs(rate_bound(BoundCase::GPPA, inputs(1, 1, 1)).factor - std::sqrt(3.0) / 2) < 1e-12);
    CHECK(std::abs(rate_bound(BoundCase::GPPA, inputs(1, 1, 1)).factor - 0.8660254) < 1e-7);
    CHECK(rate_bound(BoundCase::GPPA, inputs(1, 0, 1)).factor == 0.0);
    CHECK(std::abs(rate_bound(BoundCase::DRS_PPA, inputs(1, 1, 1)).factor - std::sqrt(0.75)) < 1e-12);
    const auto fbs = rate_bound(BoundCase::FBS, inputs(1, 1, 0.75, std::nullopt, 1.0));
    CHECK(std::abs(fbs.factor - std::sqrt(1 - 0.5625 / 4)) < 1e-12);
    CHECK(fbs.factor == doctest::Approx(0.9270).epsilon(1e-4));
    CHECK_FALSE(fbs.clamped);
}

TEST_CASE("rate_bound agrees with the term-by-term formulas")
{
    Rng r(301);
    for (BoundCase c : all_bound_cases) {
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            const double L = 0.1 + 3 * r.uniform(), th = 0.2 + 2 * r.uniform();
            const double g = 1.9 * th * (0.05 + 0.95 * r.uniform());
            const double k = 4 * r.uniform(), l = 1.4 * r.uniform();
            const auto in = inputs(g, k, l, L, th);
            worst = std::max(worst, std::abs(rate_bound(c, in).rho - oracle_rho(c, g, k, l, L, th)));
            if (c == BoundCase::DYS_LIP_B)
                worst = std::max(worst, std::abs(rate_bound(c, in, BoundVariant::Squared).rho - oracle_rho(c, g, k, l, L, th, true)));
        }
        INFO(to_string(c));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("C = 0 limit of the three-operator bounds")
{
    const double inf = std::numeric_limits<double>::infinity();
    // theta -> inf: the numerator becomes lambda (2 - lambda) and the gamma/theta terms vanish
    const auto a = rate_bound(BoundCase::DYS_LIP_A, inputs(0.7, 1.2, 1.1, 0.8, inf));
    const auto a_big = rate_bound(BoundCase::DYS_LIP_A, inputs(0.7, 1.2, 1.1, 0.8, 1e12));
    CHECK(a.rho == doctest::Approx(a_big.rho).epsilon(1e-9));
    const double d = 2.0 + std::sqrt(1.0 + 0.49 * 0.64) * (1.0 + 1.2 * (1 / 0.7 + 0.8));
    CHECK(a.rho == doctest::Approx(1.1 * 0.9 / (d * d)).epsilon(1e-14));
    const auto b = rate_bound(BoundCase::DYS_LIP_B, inputs(0.7, 1.2, 1.1, 0.8, inf));
    const auto b_big = rate_bound(BoundCase::DYS_LIP_B, inputs(0.7, 1.2, 1.1, 0.8, 1e12));
    CHECK(b.rho == doctest::Approx(b_big.rho).epsilon(1e-9));
}

TEST_CASE("rate_bound input errors name the bound")
{
    try {
        rate_bound(BoundCase::DRS_LIP_A, inputs(1, 1, 1));
        FAIL("missing L accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("DRS bound") != std::string::npos);
        CHECK(std::string(e.what()).find("Lipschitz") != std::string::npos);
    }
    CHECK_THROWS_AS(rate_bound(BoundCase::FBS, inputs(1, 1, 1)), ConfigError);
    CHECK_THROWS_AS(rate_bound(BoundCase::DYS_LIP_B, inputs(1, 1, 1, 1.0)), ConfigError);
    CHECK_THROWS_AS(rate_bound(BoundCase::FBS, inputs(2, 1, 1, std::nullopt, 1.0)), ConfigError);
    CHECK_THROWS_AS(rate_bound(BoundCase::GPPA, inputs(0, 1, 1)), ConfigError);
    CHECK_THROWS_AS(rate_bound(BoundCase::GPPA, inputs(1, -1, 1)), ConfigError);
    CHECK_THROWS_AS(rate_bound(BoundCase::GPPA, inputs(1, 1, -1)), ConfigError);
    CHECK(bound_case_from("DYS_LIP_B") == BoundCase::DYS_LIP_B);
    CHECK_THROWS_AS(bound_case_from("DYS"), ConfigError);
}

TEST_CASE("out-of-range rho is clamped with a flag")
{
    const auto b = rate_bound(BoundCase::GPPA, inputs(1, 0, 2.5));
    CHECK(b.clamped);
    CHECK(b.rho < 0.0);
    CHECK(b.factor == 1.0);
    const auto ok = rate_bound(BoundCase::GPPA, inputs(1, 0, 1));
    CHECK_FALSE(ok.clamped);
    CHECK(ok.rho == 1.0);
}

TEST_CASE("kappa = 0 degenerations")
{
    for (double l : {0.1, 0.5, 1.0, 1.3, 1.9}) {
        const double expect = std::sqrt(1 - l * (2 - l));
        CHECK(std::abs(rate_bound(BoundCase::GPPA, inputs(0.3, 0, l)).factor - expect) < 1e-12);
        CHECK(std::abs(rate_bound(BoundCase::DRS_PPA, inputs(5.0, 0, l)).factor - expect) < 1e-12);
    }
}

TEST_CASE("property: factors are nondecreasing in kappa and lie in [0, 1]")
{
    Rng r(302);
    for (BoundCase c : all_bound_cases) {
        int bad = 0;
        for (int t = 0; t < 100; ++t) {
            const double L = 0.1 + 3 * r.uniform(), th = 0.2 + 2 * r.uniform();
            const double g = 1.9 * th * (0.05 + 0.95 * r.uniform());
            double ub = 2.0;
            if (c == BoundCase::FBS) ub = fbs_relaxation_bound(g, th);
            if (c == BoundCase::DYS_LIP_A || c == BoundCase::DYS_LIP_B) ub = dys_relaxation_bound(g, th);
            const double l = ub * (0.01 + 0.98 * r.uniform());
            const double k1 = 5 * r.uniform(), k2 = k1 + 5 * r.uniform();
            const auto b1 = rate_bound(c, inputs(g, k1, l, L, th));
            const auto b2 = rate_bound(c, inputs(g, k2, l, L, th));
            if (!(b1.factor <= b2.factor && b1.factor >= 0 && b2.factor <= 1) || b1.clamped || b2.clamped) ++bad;
        }
        INFO(to_string(c));
        CHECK(bad == 0);
    }
}

TEST_CASE("subregularity transfers")
{
    TransferInputs in;
    in.gamma = 1.0;
    in.kappa = 2.0;
    CHECK(subregularity_transfer(Provenance::R_TO_F, in).kappa == 2.0);
    in.kappa = 0.0;
    in.lipschitz = 3.0;
    in.radius = 8.0;
    const auto fr = subregularity_transfer(Provenance::F_TO_R, in);
    CHECK(fr.kappa == 1.0);
    CHECK(fr.radius == 2.0);
    TransferInputs sm;
    sm.gamma = 1.0;
    sm.lipschitz = 1.0;
    sm.alpha = 1.0;
    const auto s = subregularity_transfer(Provenance::STRONG_MONO_S, sm);
    CHECK(std::abs(s.kappa - 5.0) < 1e-12);
    CHECK(std::isinf(s.radius));
    TransferInputs eb;
    eb.gamma = 2.0;
    eb.lipschitz = 0.5;
    eb.kappa = 3.0;
    eb.radius = 6.0;
    const auto e = subregularity_transfer(Provenance::ERROR_BOUND, eb);
    CHECK(e.kappa == 3.0);
    CHECK(e.radius == 2.0);
    CHECK_THROWS_AS(subregularity_transfer(Provenance::R_TO_F, TransferInputs{}), ConfigError);
    TransferInputs bad;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(subregularity_transfer(Provenance::F_TO_R, bad), ConfigError);
}

TEST_CASE("property: F_TO_R then R_TO_F gives gamma + kappa (1 + gamma L) >= kappa")
{
    Rng r(303);
    for (int t = 0; t < 100; ++t) {
        TransferInputs in;
        in.gamma = 0.01 + 5 * r.uniform();
        in.kappa = 10 * r.uniform();
        in.lipschitz = 4 * r.uniform();
        const double kr = subregularity_transfer(Provenance::F_TO_R, in).kappa;
        TransferInputs back = in;
        back.kappa = kr;
        const double kf = subregularity_transfer(Provenance::R_TO_F, back).kappa;
        CHECK(kf == doctest::Approx(in.gamma + in.kappa * (1 + in.gamma * in.lipschitz)).epsilon(1e-13));
        CHECK(kf >= in.kappa);
    }
}

TEST_CASE("empirical_rate examples")
{
    const std::vector<double> geo = {1, 0.5, 0.25, 0.125};
    const auto e = empirical_rate(geo, 1.0);
    CHECK(std::abs(e.rate - 0.5) < 1e-12);
    CHECK(std::abs(e.r_squared - 1.0) < 1e-12);
    CHECK(e.first == 0);
    CHECK(e.last == 3);
    const std::vector<double> flat(20, 0.3);
    const auto f = empirical_rate(flat);
    CHECK(f.rate == 1.0);
    CHECK(f.first == 10);
    CHECK_THROWS_AS(empirical_rate(std::vector<double>{1, 0.5, 0.0, 0.1}, 1.0), NumericError);
    CHECK_THROWS_AS(empirical_rate(std::vector<double>{1.0}, 1.0), ConfigError);
    CHECK_THROWS_AS(empirical_rate(geo, 0.0), ConfigError);
}

TEST_CASE("property: geometric traces recover their ratio")
{
    Rng r(304);
    for (int t = 0; t < 50; ++t) {
        const double q = 0.05 + 0.9 * r.uniform(), c = 0.1 + 10 * r.uniform();
        std::vector<double> s;
        for (int k = 0; k < 40; ++k) s.push_back(c * std::pow(q, k));
        const auto e = empirical_rate(s, 0.5);
        CHECK(std::abs(e.rate - q) < 1e-12);
        CHECK(std::abs(e.r_squared - 1.0) < 1e-12);
    }
}

TEST_CASE("gppa on mu I with gamma mu = 1 contracts at exactly 1/2")
{
    const ProblemInstance p = build_linear_monotone(1.7 * Matrix::Identity(3, 3), Vector::Zero(3));
    AlgorithmConfig cfg;
    cfg.gamma = 1.0 / 1.7;
    cfg.stop.residual_tol = 1e-13;
    cfg.stop.max_iter = 1000;
    cfg.reference = Vector::Zero(3);
    const auto tr = gppa_run(*p.whole, cfg, Vector::LinSpaced(3, 1, 3));
    CHECK(std::abs(empirical_rate(tr).rate - 0.5) < 1e-6);
    CHECK(std::abs(empirical_residual_rate(tr).rate - 0.5) < 1e-6);
    AlgorithmConfig no_ref = cfg;
    no_ref.reference.reset();
    CHECK_THROWS_AS(empirical_rate(gppa_run(*p.whole, no_ref, Vector::Ones(3))), ConfigError);
}

TEST_CASE("property: measured rates respect the GPPA bound on mu I")
{
    // mu values chosen so that no grid point has an exact factor of 0
    for (double mu : {0.5, 3.0})
        for (double g : {0.1, 1.0, 10.0})
            for (double l : {0.5, 1.0, 1.5}) {
                const ProblemInstance p = build_linear_monotone(mu * Matrix::Identity(2, 2), Vector::Zero(2));
                REQUIRE(p.kappa);
                AlgorithmConfig cfg;
                cfg.gamma = g;
                cfg.schedule = RelaxationSchedule::constant(l);
                cfg.stop.residual_tol = 0.0;
                cfg.stop.max_iter = 40;
                cfg.reference = Vector::Zero(2);
                const auto tr = gppa_run(*p.whole, cfg, Vector::Ones(2));
                // the exact per-step factor is |1 - l g mu/(1 + g mu)|
                const double exact = std::abs(1 - l * g * mu / (1 + g * mu));
                CHECK(empirical_rate(tr, 1.0).rate == doctest::Approx(exact).epsilon(1e-9));
                CHECK(empirical_rate(tr, 1.0).rate <= rate_bound(BoundCase::GPPA, inputs(g, *p.kappa, l)).factor + 1e-6);
            }
}

TEST_CASE("check_fejer examples")
{
    const ProblemInstance p = build_linear_monotone(Matrix::Identity(2, 2), Vector::Zero(2));
    AlgorithmConfig cfg;
    cfg.stop.residual_tol = 0.0;
    cfg.stop.max_iter = 200;
    cfg.record_iterates = true;
    auto tr = gppa_run(*p.whole, cfg, Vector::Ones(2));
    auto rep = check_fejer(tr, Vector::Zero(2), 0.5);
    CHECK(rep.ok());
    CHECK(rep.slack.size() == 200);

    const auto frozen = gppa_run(*p.whole, cfg, Vector::Zero(2));
    rep = check_fejer(frozen, Vector::Zero(2), 0.5);
    for (double s : rep.slack) CHECK(s == 0.0);

    tr.w[5] *= 2.0;
    rep = check_fejer(tr, Vector::Zero(2), 0.5);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0] == 5);

    cfg.record_iterates = false;
    CHECK_THROWS_AS(check_fejer(gppa_run(*p.whole, cfg, Vector::Ones(2)), Vector::Zero(2), 0.5), ConfigError);
}

TEST_CASE("check_averaged examples")
{
    Rng r(305);
    const FixedPointMap id = [](const Vector& x) { return x; };
    const auto rep = check_averaged(id, 0.3, 4, 100, r);
    CHECK(rep.ok());
    CHECK(rep.worst_slack == 0.0);
    const FixedPointMap neg = [](const Vector& x) { return Vector(-x); };
    CHECK(averaged_slack(neg, 0.5, Vector::Ones(1), -Vector::Ones(1)) == -16.0);
    CHECK_FALSE(check_averaged(neg, 0.5, 3, 10, r).ok());
    const ProblemInstance lin = toy();
    const ProxOperator f = *lin.whole;
    CHECK(check_averaged([&f](const Vector& z) { return f.resolvent(1.0, z); }, 0.5, 6, 1000, r).ok());
    CHECK_THROWS_AS(check_averaged(id, 0.0, 2, 10, r), ConfigError);
}

TEST_CASE("S-operator identity")
{
    Rng r(17);
    const Vector x = rng_gaussian_vector(r, 5);
    const auto zero = check_drs_ppa_identity(zero_operator(), zero_operator(), 1.0, x);
    CHECK(zero.balance == 0.0);
    CHECK(zero.fixed_map == 0.0);
    CHECK(zero.displacement == 0.0);
    CHECK(zero.fixed_point_gap == 0.0);

    for (const auto& p : {random_instance(13, ProblemKind::L1L1, 20, 10), toy(),
             random_instance(11, ProblemKind::LASSO, 10, 3, {0.1, 1.0, {}})}) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i)
            worst = std::max(worst, check_drs_ppa_identity(p.dr->a, p.dr->b, 0.8, 3.0 * rng_gaussian_vector(r, p.dim)).max_residual());
        CHECK(worst <= 1e-10);
    }

    const ProblemInstance lin = toy();
    const Vector xs = lin.reference->z_star + 0.8 * lin.dr->b.apply(lin.reference->z_star);
    const auto at_fix = check_drs_ppa_identity(lin.dr->a, lin.dr->b, 0.8, xs);
    CHECK(at_fix.ok());
    CHECK(at_fix.fixed_point_gap < 1e-12);
}

TEST_CASE("fixed points built from a zero")
{
    const ProblemInstance lin = toy();
    const Vector& z = lin.reference->z_star;
    const ForwardOperator c0 = ForwardOperator::zero();
    for (double g : {1.0, 0.4, 2.5}) {
        CHECK(verify_fixed_point_map(FixedPointCase::DRS_A, lin.dr->a, lin.dr->b, c0, g, z).ok());
        CHECK(verify_fixed_point_map(FixedPointCase::DRS_B, lin.dr->a, lin.dr->b, c0, g, z).ok());
        CHECK(verify_fixed_point_map(FixedPointCase::DYS_A, lin.dy->a, lin.dy->b, lin.dy->c, g, z).ok());
        CHECK(verify_fixed_point_map(FixedPointCase::DYS_B, lin.dy->a, lin.dy->b, lin.dy->c, g, z).ok());
        const auto ra = verify_fixed_point_map(FixedPointCase::DRS_A, lin.dr->a, lin.dr->b, c0, g, z);
        const auto ya = verify_fixed_point_map(FixedPointCase::DYS_A, lin.dr->a, lin.dr->b, c0, g, z);
        CHECK(ra.candidate == ya.candidate);
        CHECK(ra.fixed_residual == ya.fixed_residual);
        // the constructed point is fixed under the reflection form of T as well
        CHECK((drs_reflection_map(lin.dr->a, lin.dr->b, g, ra.candidate) - ra.candidate).norm() < 1e-10);
    }
    // a non-zero is detected
    const auto off = verify_fixed_point_map(FixedPointCase::DRS_A, lin.dr->a, lin.dr->b, c0, 1.0, z + Vector::Ones(6));
    CHECK_FALSE(off.ok());
    // A = B = 0: every point is fixed and every point is a zero
    const auto deg = verify_fixed_point_map(FixedPointCase::DRS_A, zero_operator(), zero_operator(), c0, 1.0, Vector::Ones(3));
    CHECK(deg.max_residual() == 0.0);

    const ProblemInstance l1 = random_instance(13, ProblemKind::L1L1, 20, 10);
    CHECK_THROWS_AS(verify_fixed_point_map(FixedPointCase::DRS_B, l1.dr->a, l1.dr->b, c0, 1.0, Vector::Zero(30)), ConfigError);
    CHECK_THROWS_AS(verify_fixed_point_map(FixedPointCase::DRS_A, lin.dy->a, lin.dy->b, lin.dy->c, 1.0, z), ConfigError);
}

TEST_CASE("residual_R examples")
{
    const ProblemInstance lin = toy();
    const Vector& z = lin.reference->z_star;
    const ProxOperator bop = lin.dr->b;
    const ForwardOperator b("B", [bop](const Vector& v) { return bop.apply(v); }, std::nullopt, std::nullopt);
    CHECK(residual_R(lin.dr->a, b, 0.7, z).norm() < 1e-12);

    Rng r(306);
    const Vector v = rng_gaussian_vector(r, 6);
    CHECK((residual_R(zero_operator(), b, 0.7, v) - 0.7 * bop.apply(v)).norm() < 1e-14);
    CHECK((residual_R(lin.dr->a, ForwardOperator::zero(), 0.7, v) - (v - lin.dr->a.resolvent(0.7, v))).norm() == 0.0);
}

TEST_CASE("dys_map with C = 0 equals the reflection form of the DRS map")
{
    const ProblemInstance l1 = random_instance(13, ProblemKind::L1L1, 20, 10);
    Rng r(307);
    for (int i = 0; i < 20; ++i) {
        const Vector x = rng_gaussian_vector(r, l1.dim);
        CHECK((dys_map(l1.dr->a, l1.dr->b, ForwardOperator::zero(), 1.3, x) - drs_reflection_map(l1.dr->a, l1.dr->b, 1.3, x)).norm() < 1e-12);
    }
}

}
