#pragma once

#include "splitfix/splitting.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace splitfix {

enum class ProblemKind { L1L1, LASSO, LINEAR_MONOTONE };

std::string to_string(ProblemKind k);
ProblemKind problem_kind_from(const std::string& name);

enum class ReferenceMethod { SignEnum, CrossAlgorithm, ClosedForm, LinearSolve };

std::string to_string(ReferenceMethod m);
ReferenceMethod reference_method_from(const std::string& name);

/* A point standing in for F^{-1}(0). `residual` is optimality_residual at
 * z_star, recorded when the solution was produced; it never exceeds `tol`. */
struct ReferenceSolution {
    Vector z_star;
    double tol;
    double residual;
    ReferenceMethod method;
};

/* (A, B, C) in the orientation an algorithm consumes; unused slots hold the
 * zero operator */
struct OperatorTriple {
    ProxOperator a;
    ProxOperator b;
    ForwardOperator c;
};

/* the raw data an instance was built from, kept for serialization */
struct ProblemData {
    Matrix a;                 // L1L1, LASSO
    Vector b;
    double lambda_reg = 0.0;
    LpNorm p = LpNorm::One;
    Groups groups;
    std::vector<double> group_weights;
    Matrix m;                 // LINEAR_MONOTONE
    Vector q;
};

/*=============================================================================
 * An inclusion 0 in (A + B + C) z in the forms the algorithms need:
 *
 *   whole  F itself, for GPPA
 *   fb     (A, 0, C) for FBS
 *   dr     (A, B, 0) for DRS and DRS-as-PPA
 *   dy     (A, B, C) for DYS
 *
 * Forms an instance cannot supply are empty. The iterate lives in R^dim:
 * dim = n for LASSO and LINEAR_MONOTONE, n + m (stacked [x; y]) for L1L1.
 *===========================================================================*/
struct ProblemInstance {
    ProblemKind kind = ProblemKind::LINEAR_MONOTONE;
    std::optional<std::uint64_t> seed;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t dim = 0;
    ProblemData data;

    std::optional<ProxOperator> whole;
    std::optional<OperatorTriple> fb;
    std::optional<OperatorTriple> dr;
    std::optional<OperatorTriple> dy;

    std::optional<Certificate> certificate;
    /* exact subregularity modulus of F, when known */
    std::optional<double> kappa;
    std::optional<ReferenceSolution> reference;

    /* the x block of an iterate (the whole vector except for L1L1) */
    Vector primal(const Vector& z) const;
};

/* min ||Ax - b||_1 + lambda_reg ||x||_1 in primal-dual form:
 * B = T1(x, y) = (A^T y, -A x), A = lambda_reg d||.||_1 x d(g*) with
 * g = ||. - b||_1. Certificate: polyhedral. */
ProblemInstance build_l1l1(const Matrix& a, const Vector& b, double lambda_reg);

/* min 1/2 ||Ax - b||^2 + lambda_reg sum_J w_J ||x_J||_p, p in {1, 2, inf}.
 * Empty groups mean singletons; empty weights mean all ones.
 * fb: A = prox part, C = A^T(Ax - b); dr: B = least-squares operator. */
ProblemInstance build_lp_lsq(const Matrix& a, const Vector& b, double lambda_reg, double p,
    Groups groups = {}, std::vector<double> weights = {});

/* F z = M z + q with M + M^T positive semidefinite. With S = (M + M^T)/2 and
 * K = (M - M^T)/2:
 *   dr  A = S z + q,   B = K z
 *   dy  A = S z/2 + q, B = K z,  C = S z/2
 *   fb  A = K z + q,   C = S z
 * The reference comes from a direct solve of M z = -q (NumericError when
 * no solution exists); kappa = 1 / lambda_min(S) when S is positive definite. */
ProblemInstance build_linear_monotone(const Matrix& m, const Vector& q);

struct RandomExtras {
    double lambda_reg = 1.0;
    double p = 1.0;
    Groups groups;
};

/* Deterministic instances from `seed`:
 *   L1L1, LASSO      A Gaussian / sqrt(m), x0 with max(1, round(n/10)) nonzero
 *                    Gaussian entries, b = A x0 + e, e Gaussian with standard
 *                    deviation 0.01 ||A x0||
 *   LINEAR_MONOTONE  M = I + (G - G^T)/2 with G Gaussian, q Gaussian; m must equal n */
ProblemInstance random_instance(std::uint64_t seed, ProblemKind kind, std::size_t m, std::size_t n,
    const RandomExtras& extras = {});

/* ||Mz + q|| (LINEAR_MONOTONE); ||x - prox(x - grad f(x))|| (LASSO);
 * ||z - J_A(z - T1 z)|| (L1L1) */
double optimality_residual(const ProblemInstance& problem, const Vector& z);

/* LinearSolve for LINEAR_MONOTONE; ClosedForm for LASSO with A^T A = I;
 * SignEnum for p = 1 LASSO with unit weights and n <= 10; CrossAlgorithm
 * otherwise. Throws NumericError when oracles disagree beyond tol or the
 * certified residual exceeds tol. */
ReferenceSolution reference_solve(const ProblemInstance& problem, double tol);

inline constexpr std::size_t sign_enum_max_n = 10;

/* Exact minimizer of 1/2||Ax - b||^2 + lambda ||x||_1 by enumerating all 3^n
 * sign patterns s and solving A_S^T A_S x_S = A_S^T b - lambda s_S on each
 * support S. Exactly one pattern must satisfy the KKT conditions; ties and
 * the absence of a verifying pattern are NumericErrors. `threads` = 0 picks
 * the hardware concurrency. */
Vector sign_enum_lasso(const Matrix& a, const Vector& b, double lambda, unsigned threads = 0);

/* the closed form prox_{lambda g}(A^T b), valid when A^T A = I */
Vector lasso_closed_form_orthonormal(const ProblemInstance& problem);

/* Runs DRS at (gamma, lambda) = (1, 1) and (0.5, 1.5) to fixed-point residual
 * 1e-12 and returns the first limit; NumericError if the primal parts differ
 * by more than tol. */
ReferenceSolution cross_algorithm_reference(const ProblemInstance& problem, double tol,
    std::size_t max_iter = 1000000);

/**  serialization  **/

nlohmann::json instance_to_json(const ProblemInstance& problem);
ProblemInstance instance_from_json(const nlohmann::json& doc);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& rows);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& values);

} // namespace splitfix
