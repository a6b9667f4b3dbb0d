#include "splitfix/problems.hpp"

#include "splitfix/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace splitfix {

std::string to_string(ProblemKind k)
{
    switch (k) {
    case ProblemKind::L1L1: return "L1L1";
    case ProblemKind::LASSO: return "LASSO";
    case ProblemKind::LINEAR_MONOTONE: return "LINEAR_MONOTONE";
    }
    return "?";
}

ProblemKind problem_kind_from(const std::string& name)
{
    for (ProblemKind k : {ProblemKind::L1L1, ProblemKind::LASSO, ProblemKind::LINEAR_MONOTONE})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown problem kind '" + name + "' (expected L1L1, LASSO or LINEAR_MONOTONE)");
}

std::string to_string(ReferenceMethod m)
{
    switch (m) {
    case ReferenceMethod::SignEnum: return "SignEnum";
    case ReferenceMethod::CrossAlgorithm: return "CrossAlgorithm";
    case ReferenceMethod::ClosedForm: return "ClosedForm";
    case ReferenceMethod::LinearSolve: return "LinearSolve";
    }
    return "?";
}

ReferenceMethod reference_method_from(const std::string& name)
{
    for (ReferenceMethod m : {ReferenceMethod::SignEnum, ReferenceMethod::CrossAlgorithm,
             ReferenceMethod::ClosedForm, ReferenceMethod::LinearSolve})
        if (to_string(m) == name) return m;
    throw ConfigError("unknown reference method '" + name + "'");
}

Vector ProblemInstance::primal(const Vector& z) const
{
    if (kind == ProblemKind::L1L1) return z.head(static_cast<Eigen::Index>(n));
    return z;
}

namespace {

ForwardOperator as_forward(const ProxOperator& op)
{
    if (op.is_zero()) return ForwardOperator::zero();
    return ForwardOperator(op.label(), [op](const Vector& z) { return op.apply(z); }, op.lipschitz(), std::nullopt);
}

bool is_zero_matrix(const Matrix& m)
{
    return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0;
}

ProxOperator regularizer(const ProblemData& d)
{
    if (d.lambda_reg == 0.0) return zero_operator();
    return group_lp_operator(d.groups, d.group_weights, d.lambda_reg, d.p);
}

} // namespace

ProblemInstance build_l1l1(const Matrix& a, const Vector& b, double lambda_reg)
{
    if (a.rows() != b.size()) throw ConfigError("build_l1l1: A has " + std::to_string(a.rows())
        + " rows but b has " + std::to_string(b.size()) + " entries");
    if (a.size() == 0) throw ConfigError("build_l1l1: empty A");
    if (!(lambda_reg > 0.0) || !std::isfinite(lambda_reg)) throw ConfigError("build_l1l1: lambda_reg must be positive");

    ProblemInstance p;
    p.kind = ProblemKind::L1L1;
    p.n = static_cast<std::size_t>(a.cols());
    p.m = static_cast<std::size_t>(a.rows());
    p.dim = p.n + p.m;
    p.data.a = a;
    p.data.b = b;
    p.data.lambda_reg = lambda_reg;
    p.data.p = LpNorm::One;

    const ProxOperator t2 = product_operator(l1_norm_operator(lambda_reg), p.n, l1_conjugate_operator(b));
    const ProxOperator t1 = skew_primal_dual_operator(a);
    p.dr = OperatorTriple{t2, t1, ForwardOperator::zero()};
    p.dy = p.dr;
    p.certificate = Certificate::polyhedral();
    return p;
}

ProblemInstance build_lp_lsq(const Matrix& a, const Vector& b, double lambda_reg, double p_exp,
    Groups groups, std::vector<double> weights)
{
    if (a.rows() != b.size()) throw ConfigError("build_lp_lsq: A has " + std::to_string(a.rows())
        + " rows but b has " + std::to_string(b.size()) + " entries");
    if (a.size() == 0) throw ConfigError("build_lp_lsq: empty A");
    if (!(lambda_reg >= 0.0) || !std::isfinite(lambda_reg)) throw ConfigError("build_lp_lsq: lambda_reg must be nonnegative");
    LpNorm norm;
    try {
        norm = lp_norm_from(p_exp);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("build_lp_lsq: the lp-subdifferential certificate (C3) is implemented for p in {1, 2, inf}: ") + e.what());
    }
    const auto n = static_cast<std::size_t>(a.cols());
    if (groups.empty()) groups = singleton_groups(n);
    validate_partition(groups, n);
    if (weights.empty()) weights.assign(groups.size(), 1.0);
    if (weights.size() != groups.size()) throw ConfigError("build_lp_lsq: one weight per group required");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("build_lp_lsq: group weights must be positive");

    ProblemInstance p;
    p.kind = ProblemKind::LASSO;
    p.n = n;
    p.m = static_cast<std::size_t>(a.rows());
    p.dim = n;
    p.data.a = a;
    p.data.b = b;
    p.data.lambda_reg = lambda_reg;
    p.data.p = norm;
    p.data.groups = std::move(groups);
    p.data.group_weights = std::move(weights);

    const ProxOperator reg = regularizer(p.data);
    const ForwardOperator grad = least_squares_gradient(a, b);
    p.fb = OperatorTriple{reg, zero_operator(), grad};
    p.dr = OperatorTriple{reg, least_squares_operator(a, b), ForwardOperator::zero()};
    p.dy = OperatorTriple{reg, zero_operator(), grad};
    p.certificate = Certificate::lp(lp_exponent(norm));
    return p;
}

ProblemInstance build_linear_monotone(const Matrix& m, const Vector& q)
{
    if (m.rows() != m.cols() || m.rows() != q.size())
        throw ConfigError("build_linear_monotone: M must be square with as many rows as q has entries");
    if (m.size() == 0) throw ConfigError("build_linear_monotone: empty M");

    ProblemInstance p;
    p.kind = ProblemKind::LINEAR_MONOTONE;
    p.n = p.m = p.dim = static_cast<std::size_t>(m.rows());
    p.data.m = m;
    p.data.q = q;

    const Matrix s = 0.5 * (m + m.transpose());
    const Matrix k = 0.5 * (m - m.transpose());
    const Vector zero_q = Vector::Zero(q.size());

    p.whole = linear_monotone_operator(m, q);
    const ProxOperator skew = linear_monotone_operator(k, zero_q);
    p.dr = OperatorTriple{linear_monotone_operator(s, q), skew, ForwardOperator::zero()};
    if (is_zero_matrix(s)) {
        p.dy = OperatorTriple{linear_monotone_operator(Matrix::Zero(m.rows(), m.cols()), q), skew, ForwardOperator::zero()};
        p.fb = OperatorTriple{linear_monotone_operator(k, q), zero_operator(), ForwardOperator::zero()};
    } else {
        p.dy = OperatorTriple{linear_monotone_operator(0.5 * s, q), skew, symmetric_linear_forward(0.5 * s)};
        p.fb = OperatorTriple{linear_monotone_operator(k, q), zero_operator(), symmetric_linear_forward(s)};
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (lmin > 1e-12 * scale) {
        p.certificate = Certificate::strongly_monotone(lmin);
        p.kappa = 1.0 / lmin;
    }
    p.reference = reference_solve(p, 1e-10 * std::max(1.0, q.norm()));
    return p;
}

ProblemInstance random_instance(std::uint64_t seed, ProblemKind kind, std::size_t m, std::size_t n,
    const RandomExtras& extras)
{
    if (m == 0 || n == 0) throw ConfigError("random_instance: dimensions must be at least 1");
    Rng rng(seed);
    ProblemInstance p;
        p.kind = kind;
    if (kind == ProblemKind::LINEAR_MONOTONE) {
        if (m != n) throw ConfigError("random_instance: LINEAR_MONOTONE needs m = n");
        const Matrix g = rng_gaussian(rng, n, n);
        const Matrix mm = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))
            + 0.5 * (g - g.transpose());
        const Vector q = rng_gaussian_vector(rng, n);
        p = build_linear_monotone(mm, q);
    } else {
        const Matrix a = rng_gaussian(rng, m, n) / std::sqrt(static_cast<double>(m));
        const auto support = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n))));
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < support; ++i)
            std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.below(n - i))]);
        Vector x0 = Vector::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < support; ++i) x0(static_cast<Eigen::Index>(idx[i])) = rng.gaussian();
        const Vector clean = a * x0;
        const double sigma = 0.01 * clean.norm();
        const Vector b = clean + sigma * rng_gaussian_vector(rng, m);
        if (kind == ProblemKind::L1L1) p = build_l1l1(a, b, extras.lambda_reg);
        else p = build_lp_lsq(a, b, extras.lambda_reg, extras.p, extras.groups);
    }
    p.seed = seed;
    return p;
}

double optimality_residual(const ProblemInstance& problem, const Vector& z)
{
    if (static_cast<std::size_t>(z.size()) != problem.dim)
        throw ConfigError("optimality_residual: point has dimension " + std::to_string(z.size())
            + ", instance needs " + std::to_string(problem.dim));
    switch (problem.kind) {
    case ProblemKind::LINEAR_MONOTONE:
        return (problem.data.m * z + problem.data.q).norm();
    case ProblemKind::LASSO: {
        const Vector step = z - grad_least_squares(problem.data.a, problem.data.b, z);
        const Vector prox = problem.data.lambda_reg == 0.0
            ? step
            : prox_group_lp(step, problem.data.groups, problem.data.group_weights, problem.data.lambda_reg, problem.data.p);
        return (z - prox).norm();
    }
    case ProblemKind::L1L1:
        return residual_R(problem.dr->a, as_forward(problem.dr->b), 1.0, z).norm();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/**  oracles  **/

namespace {

struct PatternResult {
    std::vector<int> signs;
    Vector x;
};

/* decode pattern index into signs in {-1, 0, +1} */
void decode(std::uint64_t code, std::vector<int>& s)
{
    for (auto& v : s) {
        v = static_cast<int>(code % 3) - 1;
        code /= 3;
    }
}

void sign_enum_range(const Matrix& gram, const Vector& atb, double lambda, double kkt_tol,
    std::uint64_t first, std::uint64_t last, std::vector<PatternResult>& out)
{
    const auto n = static_cast<std::size_t>(gram.rows());
    std::vector<int> s(n);
    std::vector<Eigen::Index> sup;
    sup.reserve(n);
    for (std::uint64_t code = first; code < last; ++code) {
        decode(code, s);
        sup.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (s[i] != 0) sup.push_back(static_cast<Eigen::Index>(i));

        Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
        if (!sup.empty()) {
            const auto k = static_cast<Eigen::Index>(sup.size());
            Matrix g(k, k);
            Vector r(k);
            for (Eigen::Index i = 0; i < k; ++i) {
                r(i) = atb(sup[static_cast<std::size_t>(i)]) - lambda * s[static_cast<std::size_t>(sup[static_cast<std::size_t>(i)])];
                for (Eigen::Index j = 0; j < k; ++j) g(i, j) = gram(sup[static_cast<std::size_t>(i)], sup[static_cast<std::size_t>(j)]);
            }
            Vector xs;
            try {
                xs = SpdSolver(g).solve(r);
            } catch (const NumericError&) {
                continue; // singular reduced system: not a unique minimizer on this support
            }
            bool signs_hold = true;
            for (Eigen::Index i = 0; i < k && signs_hold; ++i)
                signs_hold = s[static_cast<std::size_t>(sup[static_cast<std::size_t>(i)])] * xs(i) > 0.0;
            if (!signs_hold) continue;
            for (Eigen::Index i = 0; i < k; ++i) x(sup[static_cast<std::size_t>(i)]) = xs(i);
        }
        // off-support: |A_i^T (b - A x)| <= lambda
        const Vector corr = atb - gram * x;
        bool kkt = true;
        for (std::size_t i = 0; i < n && kkt; ++i)
            if (s[i] == 0) kkt = std::abs(corr(static_cast<Eigen::Index>(i))) <= lambda + kkt_tol;
        if (kkt) out.push_back({s, x});
    }
}

} // namespace

Vector sign_enum_lasso(const Matrix& a, const Vector& b, double lambda, unsigned threads)
{
    if (a.rows() != b.size()) throw ConfigError("sign_enum_lasso: shapes of A and b disagree");
    const auto n = static_cast<std::size_t>(a.cols());
    if (n == 0 || n > sign_enum_max_n)
        throw ConfigError("sign_enum_lasso: n = " + std::to_string(n) + " outside 1.." + std::to_string(sign_enum_max_n));
    if (!(lambda >= 0.0)) throw ConfigError("sign_enum_lasso: lambda must be nonnegative");

    const Matrix gram = a.transpose() * a;
    const Vector atb = a.transpose() * b;
    const double kkt_tol = 1e-12 * std::max(1.0, atb.cwiseAbs().maxCoeff());
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, total));
    std::vector<std::vector<PatternResult>> found(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t first = total * t / threads;
            const std::uint64_t last = total * (t + 1) / threads;
            pool.emplace_back([&, t, first, last] { sign_enum_range(gram, atb, lambda, kkt_tol, first, last, found[t]); });
        }
    }
    std::vector<PatternResult> all;
    for (auto& f : found)
        for (auto& r : f) all.push_back(std::move(r));

    if (all.empty()) throw NumericError("sign_enum_lasso: no sign pattern satisfies the KKT conditions");
    if (all.size() > 1) {
        std::ostringstream msg;
        msg << "sign_enum_lasso: " << all.size() << " sign patterns satisfy the KKT conditions (tie), e.g.";
        for (std::size_t k = 0; k < 2; ++k) {
            msg << " [";
            for (int v : all[k].signs) msg << (v > 0 ? '+' : v < 0 ? '-' : '0');
            msg << ']';
        }
        throw NumericError(msg.str());
    }
    return all.front().x;
}

Vector lasso_closed_form_orthonormal(const ProblemInstance& problem)
{
    if (problem.kind != ProblemKind::LASSO) throw ConfigError("lasso_closed_form_orthonormal: LASSO instance required");
    const Matrix& a = problem.data.a;
    const Matrix gram = a.transpose() * a;
    const Matrix eye = Matrix::Identity(gram.rows(), gram.cols());
    if ((gram - eye).cwiseAbs().maxCoeff() > 1e-14)
        throw ConfigError("lasso_closed_form_orthonormal: A^T A is not the identity");
    const Vector atb = a.transpose() * problem.data.b;
    if (problem.data.lambda_reg == 0.0) return atb;
    return prox_group_lp(atb, problem.data.groups, problem.data.group_weights, problem.data.lambda_reg, problem.data.p);
}

ReferenceSolution cross_algorithm_reference(const ProblemInstance& problem, double tol, std::size_t max_iter)
{
    if (!problem.dr) throw ConfigError("cross_algorithm_reference: instance has no Douglas-Rachford form");
    const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(problem.dim));

    auto solve = [&](double gamma, double lambda) {
        AlgorithmConfig cfg;
        cfg.gamma = gamma;
        cfg.schedule = RelaxationSchedule::constant(lambda);
        cfg.stop.residual_tol = 1e-12;
        cfg.stop.max_iter = max_iter;
        IterateTrace t = drs_run(problem.dr->a, problem.dr->b, cfg, x0);
        if (t.reason != StopReason::Converged) {
            std::ostringstream msg;
            msg << "cross_algorithm_reference: DRS at gamma = " << gamma << ", lambda = " << lambda
                << " did not reach residual 1e-12 in " << max_iter << " iterations";
            throw ConvergenceError(msg.str(), t.final_residual());
        }
        return t.final_primal;
    };
    const Vector z1 = solve(1.0, 1.0);
    const Vector z2 = solve(0.5, 1.5);
    const double gap = (problem.primal(z1) - problem.primal(z2)).norm();
    if (gap > tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "cross_algorithm_reference: candidates differ by " << gap << " > " << tol << "\n  first:  "
            << problem.primal(z1).transpose() << "\n  second: " << problem.primal(z2).transpose();
        throw NumericError(msg.str());
    }
    return {z1, tol, optimality_residual(problem, z1), ReferenceMethod::CrossAlgorithm};
}

ReferenceSolution reference_solve(const ProblemInstance& problem, double tol)
{
    if (!(tol > 0.0)) throw ConfigError("reference_solve: tol must be positive");
    ReferenceSolution ref;
    switch (problem.kind) {
    case ProblemKind::LINEAR_MONOTONE: {
        Eigen::FullPivLU<Matrix> lu(problem.data.m);
        const Vector z = lu.solve(Vector(-problem.data.q));
        ref = {z, tol, optimality_residual(problem, z), ReferenceMethod::LinearSolve};
        if (!all_finite(z) || ref.residual > tol) {
            std::ostringstream msg;
            msg << "reference_solve: M z = -q has no solution (least residual " << ref.residual << ")";
            throw NumericError(msg.str());
        }
        return ref;
    }
    case ProblemKind::LASSO: {
        const Matrix gram = problem.data.a.transpose() * problem.data.a;
        const bool orthonormal = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-14;
        const bool unit_weights = std::all_of(problem.data.group_weights.begin(), problem.data.group_weights.end(),
            [](double w) { return w == 1.0; });
        if (orthonormal) {
            const Vector x = lasso_closed_form_orthonormal(problem);
            ref = {x, tol, optimality_residual(problem, x), ReferenceMethod::ClosedForm};
        } else if (problem.data.p == LpNorm::One && unit_weights && problem.n <= sign_enum_max_n) {
            const Vector x = sign_enum_lasso(problem.data.a, problem.data.b, problem.data.lambda_reg);
            ref = {x, tol, optimality_residual(problem, x), ReferenceMethod::SignEnum};
        } else {
            ref = cross_algorithm_reference(problem, tol);
        }
        break;
    }
    case ProblemKind::L1L1:
        ref = cross_algorithm_reference(problem, tol);
        break;
    }
    if (!(ref.residual <= tol)) {
        std::ostringstream msg;
        msg << "reference_solve: " << to_string(ref.method) << " solution has optimality residual "
            << ref.residual << " > tol " << tol;
        throw NumericError(msg.str());
    }
    return ref;
}

/**  serialization  **/

nlohmann::json matrix_to_json(const Matrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& rows)
{
    if (!rows.is_array()) throw ConfigError("matrix: expected an array of rows");
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw ConfigError("matrix: row " + std::to_string(i) + " has the wrong length");
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

nlohmann::json vector_to_json(const Vector& v)
{
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const nlohmann::json& values)
{
    if (!values.is_array()) throw ConfigError("vector: expected an array");
    Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i].get<double>();
    return v;
}

nlohmann::json instance_to_json(const ProblemInstance& problem)
{
    nlohmann::json doc;
    doc["schema"] = 1;
    doc["kind"] = to_string(problem.kind);
    if (problem.seed) doc["seed"] = *problem.seed;
    doc["n"] = problem.n;
    doc["m"] = problem.m;
    doc["certificate"] = problem.certificate ? nlohmann::json(to_string(*problem.certificate)) : nlohmann::json();
    if (problem.kappa) doc["kappa"] = *problem.kappa;
    if (problem.kind == ProblemKind::LINEAR_MONOTONE) {
        doc["M"] = matrix_to_json(problem.data.m);
        doc["q"] = vector_to_json(problem.data.q);
    } else {
        doc["A"] = matrix_to_json(problem.data.a);
        doc["b"] = vector_to_json(problem.data.b);
        doc["lambda_reg"] = problem.data.lambda_reg;
        if (problem.kind == ProblemKind::LASSO) {
            const double p = lp_exponent(problem.data.p);
            doc["p"] = std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p);
            doc["groups"] = problem.data.groups;
            doc["group_weights"] = problem.data.group_weights;
        }
    }
    if (problem.reference) {
        doc["reference"] = {{"z_star", vector_to_json(problem.reference->z_star)},
            {"tol", problem.reference->tol}, {"residual", problem.reference->residual},
            {"method", to_string(problem.reference->method)}};
    }
    return doc;
}

ProblemInstance instance_from_json(const nlohmann::json& doc)
{
    try {
        if (!doc.is_object()) throw ConfigError("instance: expected a JSON object");
        if (doc.value("schema", 0) != 1) throw ConfigError("instance: unsupported schema (expected \"schema\": 1)");
        const ProblemKind kind = problem_kind_from(doc.at("kind").get<std::string>());
        ProblemInstance p;
        p.kind = kind;
        switch (kind) {
        case ProblemKind::LINEAR_MONOTONE:
            p = build_linear_monotone(matrix_from_json(doc.at("M")), vector_from_json(doc.at("q")));
            break;
        case ProblemKind::L1L1:
            p = build_l1l1(matrix_from_json(doc.at("A")), vector_from_json(doc.at("b")), doc.at("lambda_reg").get<double>());
            break;
        case ProblemKind::LASSO: {
            double pe = 1.0;
            if (doc.contains("p")) {
                const auto& pj = doc.at("p");
                pe = pj.is_string() ? (pj.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                                                      : throw ConfigError("instance: p must be a number or \"inf\""))
                                    : pj.get<double>();
            }
            p = build_lp_lsq(matrix_from_json(doc.at("A")), vector_from_json(doc.at("b")),
                doc.at("lambda_reg").get<double>(), pe, doc.value("groups", Groups{}),
                doc.value("group_weights", std::vector<double>{}));
            break;
        }
        }
        if (doc.contains("seed")) p.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("reference") && p.kind != ProblemKind::LINEAR_MONOTONE) {
            const auto& r = doc.at("reference");
            p.reference = ReferenceSolution{vector_from_json(r.at("z_star")), r.at("tol").get<double>(),
                r.at("residual").get<double>(), reference_method_from(r.at("method").get<std::string>())};
            if (static_cast<std::size_t>(p.reference->z_star.size()) != p.dim)
                throw ConfigError("instance: reference point has the wrong dimension");
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("instance: malformed JSON document: ") + e.what());
    }
}

} // namespace splitfix
