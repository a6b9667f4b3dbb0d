#pragma once

#include "splitfix/operators.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace splitfix {

/*=============================================================================
 * Relaxation sequences lambda_k for the KM recursion
 *
 *      w^{k+1} = w^k + lambda_k (T w^k - w^k).
 *
 * Constant(lambda):     lambda_k = lambda
 * Vanishing(ub, c):     lambda_k = ub - c / (k + 1)   (0 < c <= ub)
 * Explicit(values):     lambda_k = values[k mod size], no divergence analysis
 *===========================================================================*/
class RelaxationSchedule {
public:
    enum class Family { Constant, Vanishing, Explicit };

    static RelaxationSchedule constant(double lambda);
    static RelaxationSchedule vanishing(double upper, double c);
    static RelaxationSchedule explicit_values(std::vector<double> values);

    double at(std::size_t k) const;
    /* supremum and infimum over all k */
    double sup() const;
    double inf() const;

    Family family() const noexcept { return family_; }
    double lambda() const noexcept { return a_; } // Constant
    double upper() const noexcept { return a_; }  // Vanishing
    double c() const noexcept { return b_; }      // Vanishing
    const std::vector<double>& values() const noexcept { return values_; }

    std::string describe() const;

private:
    Family family_ = Family::Constant;
    double a_ = 1.0;
    double b_ = 0.0;
    std::vector<double> values_;
};

struct ScheduleCheck {
    bool ok;
    std::string diagnostic;
};

/* true iff sum_k lambda_k (ub - lambda_k) = +inf provably holds for the family
 * and every lambda_k lies in [0, ub]; throws ConfigError for Explicit */
ScheduleCheck schedule_validate(const RelaxationSchedule& schedule, double ub);

struct StopRule {
    double residual_tol = 1e-10;                            // <= 0 disables
    std::size_t max_iter = 10000;                           // SIZE_MAX = unbounded
    static constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();
};

struct AlgorithmConfig {
    double gamma = 1.0;
    RelaxationSchedule schedule = RelaxationSchedule::constant(1.0);
    StopRule stop;
    /* keep full vector snapshots of the driving and auxiliary sequences */
    bool record_iterates = false;
    /* point the primal sequence is measured against (a zero of F) */
    std::optional<Vector> reference;
};

enum class StopReason { Converged, IterationCap };

struct IterationRecord {
    std::size_t k;
    double lambda;       // lambda_k used for the step out of w^k
    double residual;     // ||T w^k - w^k||
    double dist_to_ref;  // ||primal^k - reference||, NaN without reference
};

/*=============================================================================
 * Everything a run produces. `w` holds the driving sequence (z^k for PPA and
 * FBS, x^k for DRS and DYS); `primal` is the sequence that converges to a
 * zero of F (identical to `w` for PPA/FBS, z^k = J_{gamma B} x^k otherwise);
 * `aux` is y^k for DRS/DYS. Snapshots are present only if requested.
 *===========================================================================*/
struct IterateTrace {
    std::string algorithm;
    std::vector<IterationRecord> records;
    std::vector<Vector> w;
    std::vector<Vector> primal;
    std::vector<Vector> aux;
    Vector final_w;
    Vector final_primal;
    StopReason reason = StopReason::IterationCap;
    /* averagedness constant alpha of the underlying T */
    double alpha = 0.5;

    std::size_t iterations() const { return records.empty() ? 0 : records.size() - 1; }
    double final_residual() const { return records.empty() ? std::numeric_limits<double>::quiet_NaN() : records.back().residual; }
    bool has_snapshots() const { return !w.empty(); }
};

/* a map z -> T z */
using FixedPointMap = std::function<Vector(const Vector&)>;

/* residuals beyond this abort the run as divergent */
inline constexpr double divergence_threshold = 1e12;

/* plain KM iteration on an alpha-averaged T; the schedule must stay within
 * [0, 1/alpha] */
IterateTrace km_run(const FixedPointMap& t, const Vector& w0, const RelaxationSchedule& schedule,
    double avg_bound, const StopRule& stop, bool record_iterates = false,
    const std::optional<Vector>& reference = std::nullopt);

/* z^{k+1} = z^k + lambda_k (J_{gamma F} z^k - z^k) */
IterateTrace gppa_run(const ProxOperator& f, const AlgorithmConfig& cfg, const Vector& z0);

/* z^{k+1} = z^k + lambda_k (J_{gamma A}(z^k - gamma C z^k) - z^k) */
IterateTrace fbs_run(const ProxOperator& a, const ForwardOperator& c,
    const AlgorithmConfig& cfg, const Vector& z0);

/* z^k = J_{gamma B} x^k,  y^k = J_{gamma A}(2 z^k - x^k),
 * x^{k+1} = x^k + lambda_k (y^k - z^k) */
IterateTrace drs_run(const ProxOperator& a, const ProxOperator& b,
    const AlgorithmConfig& cfg, const Vector& x0);

/* z^k = J_{gamma B} x^k,  y^k = J_{gamma A}(2 z^k - x^k - gamma C z^k),
 * x^{k+1} = x^k + lambda_k (y^k - z^k) */
IterateTrace dys_run(const ProxOperator& a, const ProxOperator& b, const ForwardOperator& c,
    const AlgorithmConfig& cfg, const Vector& x0);

/* the DRS recursion read as a proximal point iteration on the operator S
 * with J_S = T; same arithmetic as drs_run */
IterateTrace drs_as_ppa_run(const ProxOperator& a, const ProxOperator& b,
    const AlgorithmConfig& cfg, const Vector& x0);

/**  admissibility  **/

/* delta = min(1, theta/gamma) + 1/2 */
double fbs_relaxation_bound(double gamma, double cocoercivity);
/* (4 theta - gamma) / (2 theta); 2 for theta = +inf */
double dys_relaxation_bound(double gamma, double cocoercivity);

/* throws ConfigError naming the violated condition */
void check_fbs_admissible(double gamma, const ForwardOperator& c, const RelaxationSchedule& s);
void check_dys_admissible(double gamma, const ForwardOperator& c, const RelaxationSchedule& s);
void check_relaxation_within(const RelaxationSchedule& s, double ub, const std::string& rule);

} // namespace splitfix
