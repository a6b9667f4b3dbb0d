#pragma once

#include "splitfix/splitting.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace splitfix {

/*=============================================================================
 * Per-step contraction bounds under metric subregularity with modulus kappa.
 * Every case has the form factor = sqrt(1 - rho) with
 *
 *   GPPA       rho = lambda (2 - lambda) gamma^2 / (gamma + kappa)^2
 *   FBS        rho = gamma^2 lambda (delta - lambda) / (gamma + kappa)^2,
 *                    delta = min(1, theta/gamma) + 1/2
 *   DRS_LIP_A  rho = lambda (2 - lambda)
 *                    / [2 + sqrt(1 + gamma^2 L^2)(1 + kappa (1/gamma + L))]^2
 *   DRS_LIP_B  rho = lambda (2 - lambda)
 *                    / [(1 + gamma L)^2 (1 + kappa sqrt(gamma^-2 + L^2))^2]
 *   DRS_PPA    rho = lambda (2 - lambda) / (1 + kappa)^2
 *   DYS_LIP_A  rho = lambda (4 theta - gamma - 2 theta lambda)
 *                    / (2 theta [(2 + gamma/theta)
 *                       + (gamma/theta + sqrt(1 + gamma^2 L^2))(1 + kappa (1/gamma + L))]^2)
 *   DYS_LIP_B  rho = lambda (4 theta - gamma - 2 theta lambda)
 *                    / (2 theta (1 + gamma L)
 *                       [1 + kappa (L + sqrt(1 + max((gamma^2 - 2 gamma theta)/theta^2, 0))/gamma)]^2)
 *
 * L is always the Lipschitz constant of the single-valued operator (A for
 * *_LIP_A, B for *_LIP_B). DYS_LIP_B is evaluated as stated; the Squared
 * variant uses (1 + gamma L)^2 in the denominator, which is what squaring
 * the underlying distance estimate gives. theta = +inf is the C = 0 limit.
 *===========================================================================*/
enum class BoundCase { GPPA, FBS, DRS_LIP_A, DRS_LIP_B, DRS_PPA, DYS_LIP_A, DYS_LIP_B };

inline constexpr BoundCase all_bound_cases[] = {BoundCase::GPPA, BoundCase::FBS,
    BoundCase::DRS_LIP_A, BoundCase::DRS_LIP_B, BoundCase::DRS_PPA, BoundCase::DYS_LIP_A,
    BoundCase::DYS_LIP_B};

enum class BoundVariant { AsStated, Squared };

std::string to_string(BoundCase c);
BoundCase bound_case_from(const std::string& name);

struct RateInputs {
    double gamma = 1.0;
    double kappa = 1.0;
    double lambda = 1.0;
    std::optional<double> lipschitz;
    std::optional<double> cocoercivity;
};

struct RateBound {
    BoundCase bound_case;
    RateInputs inputs;
    double rho;      // raw formula value
    double factor;   // sqrt(1 - clamp(rho, 0, 1))
    bool clamped;    // rho fell outside [0, 1]
};

/* ConfigError when a required L or theta is missing, gamma <= 0, kappa < 0,
 * lambda < 0, or gamma >= 2 theta where theta takes part */
RateBound rate_bound(BoundCase c, const RateInputs& in, BoundVariant variant = BoundVariant::AsStated);

/**  subregularity moduli  **/

enum class Provenance { R_TO_F, F_TO_R, STRONG_MONO_S, ERROR_BOUND, USER };

std::string to_string(Provenance p);

struct SubregularityWitness {
    double kappa;
    double radius; // +inf: global
    Provenance provenance;
};

struct TransferInputs {
    double gamma = 1.0;
    double kappa = 0.0;     // modulus being transferred (kappa', kappa, kappa'')
    double lipschitz = 0.0; // L of the single-valued B (or of A/B for STRONG_MONO_S)
    double radius = std::numeric_limits<double>::infinity();
    double alpha = 0.0;     // strong monotonicity of F, STRONG_MONO_S only
};

/* R_TO_F:        kappa_F = gamma kappa',                 radius unchanged
 * F_TO_R:        kappa_R = 1 + kappa (1/gamma + L),      radius delta / (1 + gamma L)
 * ERROR_BOUND:   kappa unchanged,                        radius delta'' / (2 + gamma L)
 * STRONG_MONO_S: kappa_S = (1 + gamma L)(1/gamma + L)/alpha + gamma L, global */
SubregularityWitness subregularity_transfer(Provenance target, const TransferInputs& in);

/**  empirical rates  **/

struct EmpiricalRate {
    double rate;
    double r_squared;
    std::size_t first; // window [first, last]
    std::size_t last;
};

/* least-squares fit of log(samples[k]) against k over the trailing
 * `tail_fraction` of the samples; rate = exp(slope) */
EmpiricalRate empirical_rate(std::span<const double> samples, double tail_fraction = 0.5,
    std::size_t min_samples = 2);

/* fit on the trace's distance-to-reference column; needs >= 10 samples */
EmpiricalRate empirical_rate(const IterateTrace& trace, double tail_fraction = 0.5);

/* same, on the fixed-point residual column */
EmpiricalRate empirical_residual_rate(const IterateTrace& trace, double tail_fraction = 0.5);

/**  verifiers  **/

inline constexpr double verification_tol = 1e-10;

struct FejerReport {
    /* slack_k = ||w^k - w*||^2 - mu_k (1/alpha - mu_k) ||T w^k - w^k||^2 - ||w^{k+1} - w*||^2 */
    std::vector<double> slack;
    /* indices k+1 of iterates that break the inequality by more than tol */
    std::vector<std::size_t> violations;
    double worst;
    bool ok() const { return violations.empty(); }
};

FejerReport check_fejer(const IterateTrace& trace, const Vector& w_ref, double alpha,
    double tol = verification_tol);

struct AveragedReport {
    double worst_slack;
    std::size_t violations;
    std::size_t pairs;
    bool ok() const { return violations == 0; }
};

/* ||x - y||^2 - (1 - alpha)/alpha ||(I - T)x - (I - T)y||^2 - ||Tx - Ty||^2 */
double averaged_slack(const FixedPointMap& t, double alpha, const Vector& x, const Vector& y);

AveragedReport check_averaged(const FixedPointMap& t, double alpha, std::size_t dim,
    std::size_t n_pairs, Rng& rng, double tol = verification_tol);

struct DrsPpaIdentityReport {
    double balance;        // ||(v + gamma a) - (u - gamma b)||
    double fixed_map;      // ||T x - (v + gamma b)||, T x through the reflections
    double displacement;   // ||(x - T x) - (u - v)||
    double fixed_point_gap; // ||x - T x||
    double max_residual() const;
    bool ok(double tol = verification_tol) const { return max_residual() <= tol; }
};

/* reconstructs (T x, x - T x) in gph S from one DRS step at x */
DrsPpaIdentityReport check_drs_ppa_identity(const ProxOperator& a, const ProxOperator& b,
    double gamma, const Vector& x);

enum class FixedPointCase { DRS_A, DRS_B, DYS_A, DYS_B };

std::string to_string(FixedPointCase c);

struct FixedPointReport {
    Vector candidate;        // the constructed point x
    double zero_residual;    // ||R(z*)|| certifying 0 in F(z*)
    double fixed_residual;   // ||T x - x||
    double shadow_residual;  // ||J_{gamma B} x - z*||
    double max_residual() const;
    bool ok(double tol = verification_tol) const { return max_residual() <= tol; }
};

/* builds x from a zero z* of A + B + C:
 *   DRS_A, DYS_A:  x = z* + gamma B z*            (B single-valued)
 *   DRS_B:         x = z* - gamma A z*            (A single-valued)
 *   DYS_B:         x = z* - gamma (A + C) z*      (A single-valued)
 * and checks x in Fix T and J_{gamma B} x = z*. The DRS cases require
 * C to be the zero operator. */
FixedPointReport verify_fixed_point_map(FixedPointCase c, const ProxOperator& a,
    const ProxOperator& b, const ForwardOperator& cop, double gamma, const Vector& z_star);

/* z - J_{gamma A}(z - gamma B z) */
Vector residual_R(const ProxOperator& a, const ForwardOperator& b, double gamma, const Vector& z);

/* the DYS fixed-point map T x = x + J_A(2 J_B x - x - gamma C J_B x) - J_B x */
Vector dys_map(const ProxOperator& a, const ProxOperator& b, const ForwardOperator& c,
    double gamma, const Vector& x);

/* the DRS map through reflections, 1/2((2J_A - I)(2J_B - I) + I) x */
Vector drs_reflection_map(const ProxOperator& a, const ProxOperator& b, double gamma, const Vector& x);

} // namespace splitfix
