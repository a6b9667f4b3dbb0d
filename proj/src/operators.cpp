#include "splitfix/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace splitfix {

std::string to_string(const Certificate& c)
{
    std::ostringstream s;
    switch (c.kind) {
    case CertificateKind::StronglyMonotone: s << "C1:strongly_monotone(" << c.parameter << ")"; break;
    case CertificateKind::Polyhedral: s << "C2:polyhedral"; break;
    case CertificateKind::LpSubdifferential: s << "C3:lp_subdifferential(" << c.parameter << ")"; break;
    }
    return s.str();
}

/**  ProxOperator / ForwardOperator  **/

ProxOperator::ProxOperator(std::string label, Resolvent resolvent,
    std::optional<Certificate> certificate)
    : label_(std::move(label)), resolvent_(std::move(resolvent)),
      certificate_(certificate)
{
    if (!resolvent_) throw ConfigError("ProxOperator: empty resolvent");
}

ProxOperator ProxOperator::single_valued(std::string label, Resolvent resolvent,
    Map evaluation, std::optional<double> lipschitz,
    std::optional<Certificate> certificate)
{
    ProxOperator op(std::move(label), std::move(resolvent), certificate);
    op.eval_ = std::move(evaluation);
    op.lipschitz_ = lipschitz;
    return op;
}

Vector ProxOperator::resolvent(double gamma, const Vector& z) const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw ConfigError("resolvent of " + label_ + ": gamma must be positive and finite");
    return resolvent_(gamma, z);
}

Vector ProxOperator::apply(const Vector& z) const
{
    if (!eval_) throw ConfigError(label_ + " is set-valued; no direct evaluation");
    return eval_(z);
}

ForwardOperator::ForwardOperator(std::string label, Map eval,
    std::optional<double> lipschitz, std::optional<double> cocoercivity)
    : label_(std::move(label)), eval_(std::move(eval)), lipschitz_(lipschitz),
      cocoercivity_(cocoercivity)
{
    if (!eval_) throw ConfigError("ForwardOperator: empty evaluation");
    if (cocoercivity_ && !(*cocoercivity_ > 0.0))
        throw ConfigError("ForwardOperator " + label_ + ": cocoercivity must be positive");
    if (lipschitz_ && !(*lipschitz_ >= 0.0))
        throw ConfigError("ForwardOperator " + label_ + ": Lipschitz constant must be nonnegative");
}

ForwardOperator ForwardOperator::zero()
{
    ForwardOperator op("zero", [](const Vector& z) { return Vector(Vector::Zero(z.size())); },
        0.0, std::numeric_limits<double>::infinity());
    op.zero_ = true;
    return op;
}

Vector PrimalDualPoint::stacked() const
{
    Vector w(x.size() + y.size());
    w << x, y;
    return w;
}

PrimalDualPoint PrimalDualPoint::split(const Vector& w, std::size_t n)
{
    const auto ni = static_cast<Eigen::Index>(n);
    if (ni > w.size()) throw ConfigError("PrimalDualPoint::split: primal dimension exceeds vector");
    return {w.head(ni), w.tail(w.size() - ni)};
}

/**  proximal maps  **/

Vector prox_l1(const Vector& z, double tau)
{
    if (!(tau >= 0.0)) throw ConfigError("prox_l1: tau must be nonnegative");
    Vector out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double a = std::abs(z(i)) - tau;
        out(i) = a > 0.0 ? std::copysign(a, z(i)) : 0.0;
    }
    return out;
}

Vector project_l1_ball(const Vector& z, double radius)
{
    if (!(radius >= 0.0)) throw ConfigError("project_l1_ball: radius must be nonnegative");
    if (z.cwiseAbs().sum() <= radius) return z;
    if (radius == 0.0) return Vector::Zero(z.size());

    std::vector<double> u(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(z(i));
    std::sort(u.begin(), u.end(), std::greater<>());

    double cumulative = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double t = (cumulative - radius) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
        else break;
    }
    return prox_l1(z, theta);
}

Vector project_box(const Vector& z, double lo, double hi)
{
    if (!(lo <= hi)) throw ConfigError("project_box: empty box");
    return z.cwiseMax(lo).cwiseMin(hi);
}

LpNorm lp_norm_from(double p)
{
    if (p == 1.0) return LpNorm::One;
    if (p == 2.0) return LpNorm::Two;
    if (std::isinf(p) && p > 0.0) return LpNorm::Inf;
    std::ostringstream msg;
    msg << "unsupported exponent p = " << p
        << ": the l_p subdifferential condition is only supported for p in {1, 2, inf}";
    throw ConfigError(msg.str());
}

double lp_exponent(LpNorm p)
{
    switch (p) {
    case LpNorm::One: return 1.0;
    case LpNorm::Two: return 2.0;
    case LpNorm::Inf: break;
    }
    return std::numeric_limits<double>::infinity();
}

void validate_partition(const Groups& groups, std::size_t n)
{
    std::vector<char> seen(n, 0);
    std::size_t count = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) throw ConfigError("group partition: group " + std::to_string(g) + " is empty");
        for (std::size_t i : groups[g]) {
            if (i >= n) throw ConfigError("group partition: index " + std::to_string(i) + " out of range");
            if (seen[i]) throw ConfigError("group partition: index " + std::to_string(i) + " appears in more than one group");
            seen[i] = 1;
            ++count;
        }
    }
    if (count != n) throw ConfigError("group partition: groups do not cover every index");
}

Groups singleton_groups(std::size_t n)
{
    Groups g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = {i};
    return g;
}

Vector prox_group_lp(const Vector& z, const Groups& groups,
    const std::vector<double>& weights, double tau, LpNorm p)
{
    if (!(tau > 0.0)) throw ConfigError("prox_group_lp: tau must be positive");
    if (weights.size() != groups.size()) throw ConfigError("prox_group_lp: one weight per group required");
    validate_partition(groups, static_cast<std::size_t>(z.size()));

    Vector out(z.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (!(weights[g] > 0.0)) throw ConfigError("prox_group_lp: group weights must be positive");
        const auto& idx = groups[g];
        Vector block(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) block(static_cast<Eigen::Index>(k)) = z(static_cast<Eigen::Index>(idx[k]));

        const double t = tau * weights[g];
        Vector shrunk;
        switch (p) {
        case LpNorm::One:
            shrunk = prox_l1(block, t);
            break;
        case LpNorm::Two: {
            const double nrm = block.norm();
            shrunk = nrm > t ? Vector(block * (1.0 - t / nrm)) : Vector(Vector::Zero(block.size()));
            break;
        }
        case LpNorm::Inf:
            // Moreau: the dual norm ball of l_inf is the l_1 ball
            shrunk = block - project_l1_ball(block, t);
            break;
        }
        for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(idx[k])) = shrunk(static_cast<Eigen::Index>(k));
    }
    return out;
}

Vector prox_conjugate(const ProxOperator& g_prox, const Vector& z, double gamma)
{
    if (!(gamma > 0.0)) throw ConfigError("prox_conjugate: gamma must be positive");
    return z - gamma * g_prox.resolvent(1.0 / gamma, z / gamma);
}

Vector grad_least_squares(const Matrix& a, const Vector& b, const Vector& x)
{
    if (a.rows() != b.size() || a.cols() != x.size())
        throw ConfigError("grad_least_squares: shapes of A, b, x disagree");
    return a.transpose() * (a * x - b);
}

namespace {

bool is_symmetric(const Matrix& m)
{
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

/* Factorization of I + gamma M, symmetric case through Cholesky. */
class ShiftedLinearSolver {
public:
    ShiftedLinearSolver(const Matrix& m, double gamma)
    {
        const Matrix sys = Matrix::Identity(m.rows(), m.cols()) + gamma * m;
        if (is_symmetric(m)) {
            spd_.emplace(Matrix(0.5 * (sys + sys.transpose())));
        } else {
            lu_.emplace(sys);
            if (!lu_->isInvertible())
                throw NumericError("resolvent_linear: I + gamma M is singular (M is not monotone)");
        }
    }
    Vector solve(const Vector& r) const { return spd_ ? spd_->solve(r) : Vector(lu_->solve(r)); }

private:
    std::optional<SpdSolver> spd_;
    std::optional<Eigen::FullPivLU<Matrix>> lu_;
};

/* Factorizations keyed by gamma; lookups and inserts are serialized, the
 * cached objects themselves are immutable. */
template <typename Solver>
class GammaCache {
public:
    template <typename Make>
    std::shared_ptr<const Solver> get(double gamma, Make&& make)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(gamma);
        if (it != cache_.end()) return it->second;
        if (cache_.size() >= 64) cache_.clear();
        auto solver = std::make_shared<const Solver>(make());
        cache_.emplace(gamma, solver);
        return solver;
    }

private:
    std::mutex mutex_;
    std::map<double, std::shared_ptr<const Solver>> cache_;
};

} // namespace

Vector resolvent_linear(const Matrix& m, const Vector& q, double gamma, const Vector& z)
{
    if (!(gamma > 0.0)) throw ConfigError("resolvent_linear: gamma must be positive");
    if (m.rows() != m.cols() || m.rows() != q.size() || q.size() != z.size())
        throw ConfigError("resolvent_linear: shapes of M, q, z disagree");
    return ShiftedLinearSolver(m, gamma).solve(z - gamma * q);
}

PrimalDualPoint resolvent_skew_primal_dual(const Matrix& d, double gamma,
    const Vector& z1, const Vector& z2)
{
    if (!(gamma > 0.0)) throw ConfigError("resolvent_skew_primal_dual: gamma must be positive");
    if (z1.size() != d.cols() || z2.size() != d.rows())
        throw ConfigError("resolvent_skew_primal_dual: dimensions of D, z1, z2 disagree");
    const Matrix gram = Matrix::Identity(d.cols(), d.cols()) + gamma * gamma * (d.transpose() * d);
    PrimalDualPoint out;
    out.x = solve_spd(gram, z1 - gamma * (d.transpose() * z2));
    out.y = z2 + gamma * (d * out.x);
    return out;
}

/**  factories  **/

ProxOperator zero_operator()
{
    ProxOperator op = ProxOperator::single_valued(
        "zero", [](double, const Vector& z) { return z; },
        [](const Vector& z) { return Vector(Vector::Zero(z.size())); }, 0.0);
    op.zero_ = true;
    return op;
}

ProxOperator l1_norm_operator(double weight)
{
    if (!(weight > 0.0)) throw ConfigError("l1_norm_operator: weight must be positive");
    std::ostringstream label;
    label << "subdiff(" << weight << "*l1)";
    return ProxOperator(label.str(),
        [weight](double gamma, const Vector& z) { return prox_l1(z, gamma * weight); },
        Certificate::lp(1.0));
}

ProxOperator group_lp_operator(Groups groups, std::vector<double> weights, double weight, LpNorm p)
{
    if (!(weight > 0.0)) throw ConfigError("group_lp_operator: weight must be positive");
    if (weights.size() != groups.size()) throw ConfigError("group_lp_operator: one weight per group required");
    std::ostringstream label;
    label << "subdiff(" << weight << "*group_l" << lp_exponent(p) << ")";
    return ProxOperator(label.str(),
        [groups = std::move(groups), weights = std::move(weights), weight, p](double gamma, const Vector& z) {
            return prox_group_lp(z, groups, weights, gamma * weight, p);
        },
        Certificate::lp(lp_exponent(p)));
}

ProxOperator l1_conjugate_operator(Vector shift)
{
    return ProxOperator("subdiff(conj(l1(. - b)))",
        [shift = std::move(shift)](double gamma, const Vector& z) {
            if (z.size() != shift.size()) throw ConfigError("l1_conjugate_operator: dimension mismatch");
            return project_box(z - gamma * shift, -1.0, 1.0);
        },
        Certificate::polyhedral());
}

ProxOperator product_operator(ProxOperator first, std::size_t n_first, ProxOperator second)
{
    std::optional<Certificate> cert;
    const auto polyhedral_like = [](const std::optional<Certificate>& c) {
        return c && (c->kind == CertificateKind::Polyhedral
                        || (c->kind == CertificateKind::LpSubdifferential && c->parameter == 1.0));
    };
    if (polyhedral_like(first.certificate()) && polyhedral_like(second.certificate()))
        cert = Certificate::polyhedral();
    const std::string label = "(" + first.label() + ") x (" + second.label() + ")";
    const auto n = static_cast<Eigen::Index>(n_first);
    return ProxOperator(label,
        [first = std::move(first), second = std::move(second), n](double gamma, const Vector& z) {
            if (z.size() < n) throw ConfigError("product_operator: vector shorter than first block");
            Vector out(z.size());
            out.head(n) = first.resolvent(gamma, z.head(n));
            out.tail(z.size() - n) = second.resolvent(gamma, z.tail(z.size() - n));
            return out;
        },
        cert);
}

ProxOperator linear_monotone_operator(Matrix m, Vector q)
{
    if (m.rows() != m.cols() || m.rows() != q.size())
        throw ConfigError("linear_monotone_operator: shapes of M and q disagree");
    if (!m.allFinite() || !q.allFinite()) throw NumericError("linear_monotone_operator: non-finite data");

    // sampled monotonicity: d^T M d >= 0
    Rng rng(0x6d6f6e6f746f6e65ULL);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int trial = 0; trial < 100; ++trial) {
        const Vector d = rng_gaussian_vector(rng, static_cast<std::size_t>(m.rows()));
        if (d.dot(m * d) < -1e-12 * scale * d.squaredNorm())
            throw ConfigError("linear_monotone_operator: M is not monotone (d^T M d < 0 on a sampled direction)");
    }
#ifndef NDEBUG
    {
        const Matrix sym = 0.5 * (m + m.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() < -1e-10 * scale)
            throw ConfigError("linear_monotone_operator: M + M^T is not positive semidefinite");
    }
#endif

    std::optional<Certificate> cert;
    {
        const Matrix sym = 0.5 * (m + m.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().size() > 0 ? es.eigenvalues().minCoeff() : 0.0;
        if (lmin > 1e-12 * scale) cert = Certificate::strongly_monotone(lmin);
    }

    const double lip = operator_norm(m);
    auto cache = std::make_shared<GammaCache<ShiftedLinearSolver>>();
    auto mp = std::make_shared<const Matrix>(std::move(m));
    auto qp = std::make_shared<const Vector>(std::move(q));
    return ProxOperator::single_valued("linear(Mz+q)",
        [mp, qp, cache](double gamma, const Vector& z) {
            if (z.size() != qp->size()) throw ConfigError("linear_monotone_operator: dimension mismatch");
            auto solver = cache->get(gamma, [&] { return ShiftedLinearSolver(*mp, gamma); });
            return solver->solve(z - gamma * *qp);
        },
        [mp, qp](const Vector& z) { return Vector(*mp * z + *qp); }, lip, cert);
}

ProxOperator skew_primal_dual_operator(Matrix d)
{
    if (!d.allFinite()) throw NumericError("skew_primal_dual_operator: non-finite data");
    const double lip = operator_norm(d);
    auto dp = std::make_shared<const Matrix>(std::move(d));
    auto cache = std::make_shared<GammaCache<SpdSolver>>();
    const auto n = dp->cols();
    const auto m = dp->rows();
    return ProxOperator::single_valued("skew(D^T y, -D x)",
        [dp, cache, n, m](double gamma, const Vector& z) {
            if (z.size() != n + m) throw ConfigError("skew_primal_dual_operator: dimension mismatch");
            auto solver = cache->get(gamma, [&] {
                return SpdSolver(Matrix::Identity(n, n) + gamma * gamma * (dp->transpose() * *dp));
            });
            const auto z1 = z.head(n);
            const auto z2 = z.tail(m);
            Vector out(n + m);
            out.head(n) = solver->solve(z1 - gamma * (dp->transpose() * z2));
            out.tail(m) = z2 + gamma * (*dp * out.head(n));
            return out;
        },
        [dp, n, m](const Vector& z) {
            if (z.size() != n + m) throw ConfigError("skew_primal_dual_operator: dimension mismatch");
            Vector out(n + m);
            out.head(n) = dp->transpose() * z.tail(m);
            out.tail(m) = -(*dp * z.head(n));
            return out;
        },
        lip, Certificate::polyhedral());
}

ProxOperator least_squares_operator(Matrix a, Vector b)
{
    if (a.rows() != b.size()) throw ConfigError("least_squares_operator: shapes of A and b disagree");
    const double norm_a = operator_norm(a);
    auto ap = std::make_shared<const Matrix>(std::move(a));
    auto atb = std::make_shared<const Vector>(ap->transpose() * b);
    auto bp = std::make_shared<const Vector>(std::move(b));
    auto cache = std::make_shared<GammaCache<SpdSolver>>();
    return ProxOperator::single_valued("grad(1/2||Ax-b||^2)",
        [ap, atb, cache](double gamma, const Vector& z) {
            if (z.size() != ap->cols()) throw ConfigError("least_squares_operator: dimension mismatch");
            auto solver = cache->get(gamma, [&] {
                return SpdSolver(Matrix::Identity(ap->cols(), ap->cols()) + gamma * (ap->transpose() * *ap));
            });
            return solver->solve(z + gamma * *atb);
        },
        [ap, bp](const Vector& x) { return grad_least_squares(*ap, *bp, x); },
        norm_a * norm_a);
}

ForwardOperator least_squares_gradient(Matrix a, Vector b)
{
    if (a.rows() != b.size()) throw ConfigError("least_squares_gradient: shapes of A and b disagree");
    const double norm_a = operator_norm(a);
    if (!(norm_a > 0.0)) throw ConfigError("least_squares_gradient: A is zero, cocoercivity undefined");
    const double lip = norm_a * norm_a;
    auto ap = std::make_shared<const Matrix>(std::move(a));
    auto bp = std::make_shared<const Vector>(std::move(b));
    return ForwardOperator("grad(1/2||Ax-b||^2)",
        [ap, bp](const Vector& x) { return grad_least_squares(*ap, *bp, x); }, lip, 1.0 / lip);
}

ForwardOperator symmetric_linear_forward(Matrix s)
{
    if (!is_symmetric(s)) throw ConfigError("symmetric_linear_forward: S is not symmetric");
    const double lip = operator_norm(s);
    if (!(lip > 0.0)) throw ConfigError("symmetric_linear_forward: S is zero, use ForwardOperator::zero()");
    auto sp = std::make_shared<const Matrix>(std::move(s));
    return ForwardOperator("linear(Sz)",
        [sp](const Vector& z) { return Vector(*sp * z); }, lip, 1.0 / lip);
}

} // namespace splitfix
