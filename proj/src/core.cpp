#include "splitfix/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace splitfix {

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

/**  random numbers  **/

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
} // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed)
{
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform()
{
    constexpr double two_m53 = 1.0 / 9007199254740992.0;
    return static_cast<double>(next_u64() >> 11) * two_m53 + 0.5 * two_m53;
}

double Rng::gaussian()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t bound)
{
    if (bound == 0) throw ConfigError("Rng::below: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do { x = next_u64(); } while (x >= limit);
    return x % bound;
}

Rng Rng::split(std::uint64_t stream) const
{
    std::uint64_t s = stream + 1;
    std::uint64_t mixed = seed_ ^ splitmix64(s);
    return Rng(splitmix64(mixed));
}

Matrix rng_gaussian(Rng& rng, std::size_t m, std::size_t n)
{
    if (m == 0 || n == 0) throw ConfigError("rng_gaussian: shape must be at least 1x1");
    Matrix out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = rng.gaussian();
    return out;
}

Vector rng_gaussian_vector(Rng& rng, std::size_t n)
{
    Vector out(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = rng.gaussian();
    return out;
}

/**  SPD solves  **/

SpdSolver::SpdSolver(const Matrix& m)
{
    if (m.rows() != m.cols()) throw ConfigError("SpdSolver: matrix is not square");
    if (!m.allFinite()) throw NumericError("SpdSolver: matrix has non-finite entries");
    const Eigen::Index n = m.rows();
    const double scale = m.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) {
                std::ostringstream msg;
                msg << "SpdSolver: matrix is not symmetric at (" << i << ", " << j << ")";
                throw ConfigError(msg.str());
            }

    l_ = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = m(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
        if (!(d > 0.0)) {
            std::ostringstream msg;
            msg << "SpdSolver: matrix is not positive definite, pivot " << j
                << " is " << d;
            throw NumericError(msg.str());
        }
        const double ljj = std::sqrt(d);
        l_(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
            l_(i, j) = s / ljj;
        }
    }
}

Vector SpdSolver::solve(const Vector& r) const
{
    if (r.size() != l_.rows()) throw ConfigError("SpdSolver::solve: dimension mismatch");
    const Eigen::Index n = l_.rows();
    Vector v = r;
    // forward: L w = r
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = v(i);
        for (Eigen::Index k = 0; k < i; ++k) s -= l_(i, k) * v(k);
        v(i) = s / l_(i, i);
    }
    // backward: L^T v = w
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = v(i);
        for (Eigen::Index k = i + 1; k < n; ++k) s -= l_(k, i) * v(k);
        v(i) = s / l_(i, i);
    }
    return v;
}

Vector solve_spd(const Matrix& m, const Vector& r) { return SpdSolver(m).solve(r); }

/**  spectral norm  **/

double operator_norm(const Matrix& a, double tol, std::size_t max_iter)
{
    if (!(tol > 0.0)) throw ConfigError("operator_norm: tol must be positive");
    if (a.size() == 0 || a.isZero(0.0)) return 0.0;

    Rng rng(0x5eed0f0e7a70c0deULL);
    Vector v = rng_gaussian_vector(rng, static_cast<std::size_t>(a.cols()));
    v.normalize();

    double rayleigh = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const Vector av = a * v;
        const Vector gv = a.transpose() * av;
        rayleigh = v.dot(gv);
        if (rayleigh <= 0.0) {
            // start vector in the null space; restart from a fresh direction
            v = rng_gaussian_vector(rng, static_cast<std::size_t>(a.cols()));
            v.normalize();
            continue;
        }
        const double residual = (gv - rayleigh * v).norm();
        if (residual <= tol * rayleigh) return std::sqrt(rayleigh);
        v = gv / gv.norm();
    }
    std::ostringstream msg;
    msg << "operator_norm: power iteration did not converge in " << max_iter
        << " iterations, last Rayleigh quotient " << rayleigh;
    throw ConvergenceError(msg.str(), rayleigh);
}

} // namespace splitfix
