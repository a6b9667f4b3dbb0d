#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace splitfix {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/* Base of every error raised by the library. */
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/* A parameter violates an admissibility rule (step size, relaxation bound,
 * shape agreement). The message names the violated rule. */
class ConfigError : public Error {
public:
    using Error::Error;
};

/* Non-finite iterates, failed factorizations, divergence. */
class NumericError : public Error {
public:
    using Error::Error;
};

/* An iterative kernel hit its iteration cap; carries the last estimate. */
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, double last_estimate)
        : NumericError(what), last_estimate_(last_estimate) {}
    double last_estimate() const noexcept { return last_estimate_; }

private:
    double last_estimate_;
};

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

/*=============================================================================
 * Deterministic random numbers.
 *
 * Generator: xoshiro256** (Blackman & Vigna). The 256-bit state is filled by
 * four successive outputs of splitmix64 started at `seed`.
 *
 * uniform():  (next_u64() >> 11) * 2^-53, remapped away from 0 by adding
 *             2^-54, so it lies in (0, 1).
 * gaussian(): Box-Muller, u1 = uniform(), u2 = uniform(),
 *             r = sqrt(-2 ln u1), first call returns r cos(2 pi u2), the next
 *             call returns the cached r sin(2 pi u2).
 * split(i):   child generator seeded with splitmix64(seed ^ splitmix64(i + 1)).
 *
 * Integer output is bit-identical everywhere; Gaussian output is identical
 * wherever libm's log/cos/sin agree (always on a given platform).
 *===========================================================================*/
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();
    double gaussian();
    /* uniform integer in [0, bound) by rejection; bound > 0 */
    std::uint64_t below(std::uint64_t bound);

    Rng split(std::uint64_t stream) const;
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/* m-by-n standard normal matrix, filled row by row. */
Matrix rng_gaussian(Rng& rng, std::size_t m, std::size_t n);
Vector rng_gaussian_vector(Rng& rng, std::size_t n);

/*=============================================================================
 * Cholesky factorization M = L L^T without pivoting; the factor is kept so
 * that repeated right-hand sides cost two triangular solves. Immutable once
 * constructed.
 *===========================================================================*/
class SpdSolver {
public:
    /* throws ConfigError if M is not square or not symmetric to 1e-12
     * relative, NumericError naming the pivot if factorization fails */
    explicit SpdSolver(const Matrix& m);

    Vector solve(const Vector& r) const;
    std::size_t size() const noexcept { return static_cast<std::size_t>(l_.rows()); }
    const Matrix& factor() const noexcept { return l_; }

private:
    Matrix l_;
};

Vector solve_spd(const Matrix& m, const Vector& r);

/* Largest singular value of A by power iteration on A^T A, started from a
 * fixed pseudo-random vector. Stops when the eigen-residual of the Gram
 * matrix falls below tol times its Rayleigh quotient. */
double operator_norm(const Matrix& a, double tol = 1e-10, std::size_t max_iter = 200000);

} // namespace splitfix
