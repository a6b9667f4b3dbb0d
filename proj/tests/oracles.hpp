#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's numerical kernels.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/* argmin of a unimodal f on [a, b] */
inline double golden(const std::function<double(double)>& f, double a, double b, int iters = 100)
{
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - r * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + r * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/* argmin over [-R, R]^2: coarse grid, then nested golden-section refinement */
inline Vec grid_golden_2d(const std::function<double(double, double)>& f, double radius)
{
    double best = std::numeric_limits<double>::infinity(), bu = 0, bv = 0;
    const int n = 200;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const double u = -radius + 2.0 * radius * i / n, v = -radius + 2.0 * radius * j / n;
            const double val = f(u, v);
            if (val < best) { best = val; bu = u; bv = v; }
        }
    const double h = 2.0 * radius / n * 2.0;
    auto inner = [&](double u) { return golden([&](double v) { return f(u, v); }, bv - h, bv + h, 80); };
    const double u = golden([&](double u1) { return f(u1, inner(u1)); }, bu - h, bu + h, 80);
    Vec out(2);
    out << u, inner(u);
    return out;
}

/* eigenvalues of a symmetric matrix by cyclic Jacobi rotations */
inline std::vector<double> jacobi_eigenvalues(Mat a)
{
    const auto n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/* central finite-difference gradient */
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-6)
{
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/* minimizer of a convex piecewise-linear 1-D function given by its kinks:
 * the minimum is attained at a kink */
inline double piecewise_linear_argmin(const std::function<double(double)>& f, const std::vector<double>& kinks)
{
    double best = std::numeric_limits<double>::infinity(), arg = 0.0;
    for (double k : kinks)
        if (f(k) < best) { best = f(k); arg = k; }
    return arg;
}

/* lasso by cyclic coordinate descent, run to stationarity */
inline Vec lasso_coordinate_descent(const Mat& a, const Vec& b, double lambda, int sweeps = 200000)
{
    Vec x = Vec::Zero(a.cols());
    Vec r = b;
    for (int s = 0; s < sweeps; ++s) {
        double change = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double nj = a.col(j).squaredNorm();
            const double rho = a.col(j).dot(r) + nj * x(j);
            const double xn = (rho > lambda ? rho - lambda : rho < -lambda ? rho + lambda : 0.0) / nj;
            r -= (xn - x(j)) * a.col(j);
            change = std::max(change, std::abs(xn - x(j)));
            x(j) = xn;
        }
        if (change < 1e-15) break;
    }
    return x;
}

} // namespace oracle
