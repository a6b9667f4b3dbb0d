#pragma once

#include "splitfix/core.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace splitfix {

/* Sufficient conditions for metric subregularity carried as metadata:
 * StronglyMonotone(alpha), Polyhedral, LpSubdifferential(p). */
enum class CertificateKind { StronglyMonotone, Polyhedral, LpSubdifferential };

struct Certificate {
    CertificateKind kind;
    double parameter = 0.0; // alpha for StronglyMonotone, p for LpSubdifferential

    static Certificate strongly_monotone(double alpha) { return {CertificateKind::StronglyMonotone, alpha}; }
    static Certificate polyhedral() { return {CertificateKind::Polyhedral, 0.0}; }
    static Certificate lp(double p) { return {CertificateKind::LpSubdifferential, p}; }
};

std::string to_string(const Certificate& c);

/*=============================================================================
 * A maximal monotone operator T seen through its resolvent
 *
 *      J_{gamma T} = (I + gamma T)^{-1},     gamma > 0.
 *
 * Single-valued operators additionally expose direct evaluation and, when
 * known, their Lipschitz constant L. Copies share the underlying callables
 * (and any cached factorizations); instances are immutable and may be used
 * from several threads at once.
 *===========================================================================*/
class ProxOperator {
public:
    using Resolvent = std::function<Vector(double gamma, const Vector& z)>;
    using Map = std::function<Vector(const Vector& z)>;

    ProxOperator(std::string label, Resolvent resolvent,
        std::optional<Certificate> certificate = std::nullopt);

    static ProxOperator single_valued(std::string label, Resolvent resolvent,
        Map evaluation, std::optional<double> lipschitz,
        std::optional<Certificate> certificate = std::nullopt);

    /* throws ConfigError unless gamma > 0 */
    Vector resolvent(double gamma, const Vector& z) const;

    bool is_single_valued() const noexcept { return static_cast<bool>(eval_); }
    /* throws ConfigError for set-valued operators */
    Vector apply(const Vector& z) const;
    std::optional<double> lipschitz() const noexcept { return lipschitz_; }

    const std::string& label() const noexcept { return label_; }
    const std::optional<Certificate>& certificate() const noexcept { return certificate_; }
    bool is_zero() const noexcept { return zero_; }

    friend ProxOperator zero_operator();

private:
    std::string label_;
    Resolvent resolvent_;
    Map eval_;
    std::optional<double> lipschitz_;
    std::optional<Certificate> certificate_;
    bool zero_ = false;
};

/*=============================================================================
 * A single-valued operator evaluated directly. `lipschitz` is the Lipschitz
 * constant L itself (never its reciprocal); `cocoercivity` is theta in
 *      <x - y, Cx - Cy> >= theta ||Cx - Cy||^2.
 * The zero operator has L = 0 and theta = +infinity.
 *===========================================================================*/
class ForwardOperator {
public:
    using Map = std::function<Vector(const Vector& z)>;

    ForwardOperator(std::string label, Map eval, std::optional<double> lipschitz,
        std::optional<double> cocoercivity);

    static ForwardOperator zero();

    Vector operator()(const Vector& z) const { return eval_(z); }
    const std::string& label() const noexcept { return label_; }
    std::optional<double> lipschitz() const noexcept { return lipschitz_; }
    std::optional<double> cocoercivity() const noexcept { return cocoercivity_; }
    bool is_zero() const noexcept { return zero_; }

private:
    std::string label_;
    Map eval_;
    std::optional<double> lipschitz_;
    std::optional<double> cocoercivity_;
    bool zero_ = false;
};

/* (x, y) pair of the primal-dual formulation; stored stacked as [x; y] when
 * handed to the splitting engines. */
struct PrimalDualPoint {
    Vector x;
    Vector y;

    Vector stacked() const;
    static PrimalDualPoint split(const Vector& w, std::size_t n);
};

/**  proximal maps  **/

/* sign(z_i) max(|z_i| - tau, 0) */
Vector prox_l1(const Vector& z, double tau);

/* Euclidean projection onto {u : ||u||_1 <= radius}, sort-based, exact */
Vector project_l1_ball(const Vector& z, double radius);

/* projection onto the box [lo, hi]^n */
Vector project_box(const Vector& z, double lo, double hi);

using Groups = std::vector<std::vector<std::size_t>>;

enum class LpNorm { One, Two, Inf };

/* Only p in {1, 2, inf} have closed-form proxes; anything else is a
 * ConfigError. */
LpNorm lp_norm_from(double p);
double lp_exponent(LpNorm p);

/* throws ConfigError unless the groups cover 0..n-1 exactly once */
void validate_partition(const Groups& groups, std::size_t n);

/* groups of size one covering 0..n-1 */
Groups singleton_groups(std::size_t n);

/* prox of tau * sum_J w_J ||z_J||_p, block by block */
Vector prox_group_lp(const Vector& z, const Groups& groups,
    const std::vector<double>& weights, double tau, LpNorm p);

/* resolvent of gamma d(g*) via Moreau: z - gamma J_{(1/gamma) dg}(z / gamma) */
Vector prox_conjugate(const ProxOperator& g_prox, const Vector& z, double gamma);

/* A^T (A x - b) */
Vector grad_least_squares(const Matrix& a, const Vector& b, const Vector& x);

/* v solving (I + gamma M) v = z - gamma q */
Vector resolvent_linear(const Matrix& m, const Vector& q, double gamma, const Vector& z);

/* resolvent of gamma T1 with T1(x, y) = (D^T y, -D x), D: R^n -> R^m:
 *      x = (I + gamma^2 D^T D)^{-1} (z1 - gamma D^T z2),   y = z2 + gamma D x */
PrimalDualPoint resolvent_skew_primal_dual(const Matrix& d, double gamma,
    const Vector& z1, const Vector& z2);

/**  operator factories  **/

ProxOperator zero_operator();

/* d(weight ||.||_1) */
ProxOperator l1_norm_operator(double weight);

/* d(weight * sum_J w_J ||x_J||_p) */
ProxOperator group_lp_operator(Groups groups, std::vector<double> weights, double weight, LpNorm p);

/* d(g*) for g(u) = ||u - shift||_1: normal cone of the unit box plus the
 * constant shift, J_{gamma}(z) = clip(z - gamma * shift, -1, 1) */
ProxOperator l1_conjugate_operator(Vector shift);

/* block-diagonal operator on stacked [x; y] with dim(x) = n_first */
ProxOperator product_operator(ProxOperator first, std::size_t n_first, ProxOperator second);

/* F z = M z + q with M + M^T positive semidefinite; monotonicity is
 * sampled on 100 directions at construction (ConfigError on failure). The
 * (I + gamma M) factorization is cached per gamma. */
ProxOperator linear_monotone_operator(Matrix m, Vector q);

/* T1(x, y) = (D^T y, -D x) on stacked [x; y]; Gram factorization cached per gamma */
ProxOperator skew_primal_dual_operator(Matrix d);

/* gradient of 1/2 ||A x - b||^2 as a maximal monotone operator */
ProxOperator least_squares_operator(Matrix a, Vector b);

/* x -> A^T (A x - b) with L = ||A||^2 and theta = 1 / ||A||^2 */
ForwardOperator least_squares_gradient(Matrix a, Vector b);

/* x -> S x for symmetric positive semidefinite S: L = ||S||, theta = 1 / ||S|| */
ForwardOperator symmetric_linear_forward(Matrix s);

} // namespace splitfix
