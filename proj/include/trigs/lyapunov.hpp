#pragma once

#include "trigs/dynamics.hpp"
#include "trigs/tikhonov.hpp"

#include <optional>
#include <string>
#include <vector>

namespace trigs {

struct OpenInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double x) const noexcept { return lower < x && x < upper; }
};

/// Lyapunov parameter pack (delta, lambda, a, c) with b = c * lambda.
struct LyapunovParams {
    double delta = 1.0;
    double lambda = 0.6;
    double a = 2.0;
    double c = 10.0;

    double b() const noexcept { return c * lambda; }
    /// min(2 lambda - delta, delta - (a+1) lambda / a).
    double decay_threshold() const noexcept;

    /// lambda = 0.6, a = 2, c = 10 for delta = 1; otherwise a = 2, c = 10 and
    /// lambda at the midpoint of the admissible interval (a, c raised to 100
    /// if that interval is empty). Throws ConfigError if none is admissible.
    static LyapunovParams default_pack(double delta);
    /// Throws ConfigError naming "lambda" (or "a"/"c") when inadmissible.
    void validate() const;
};

/// Admissible lambda for the growth condition, or nullopt when empty.
std::optional<OpenInterval> admissible_lambda_interval(double delta, double a, double c);

/// Lambda range of the controlled-decay condition: (delta/2, delta) for
/// delta <= 2, ((delta + sqrt(delta^2 - 4))/2, delta) otherwise.
std::optional<OpenInterval> controlled_decay_lambda_interval(double delta);

/// Outcome of a search for the time from which d/dt(1/sqrt(eps)) stays
/// below a threshold.
struct DecayCheck {
    bool satisfied = false;
    double t1 = 0.0;
    double threshold = 0.0;
    /// rate - threshold at the end of the horizon (positive on failure).
    double margin = 0.0;
    std::string reason;
};

/// Earliest t1 in [t_start, t_max] with d/dt(1/sqrt(eps)) <= threshold on [t1, t_max].
DecayCheck find_decay_onset(const RegularizationSchedule& reg, double threshold, double t_max);
DecayCheck check_H1(const RegularizationSchedule& reg, const LyapunovParams& params, double t_max);
DecayCheck check_CD(const RegularizationSchedule& reg, double delta, double lambda,
                    double t_max = 1e12);

/// Schedule-only terms of the energy estimate at time t.
struct ScheduleTerms {
    double eps = 0.0;
    double eps_dot = 0.0;
    double mu = 0.0;  // -eps_dot/(2 eps) + (delta - lambda) sqrt(eps)
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    /// (lambda c + a) lambda eps_dot^2 / eps^{3/2} - eps_dot, without the
    /// 1/2 |x*|^2 factor.
    double forcing = 0.0;
};
ScheduleTerms schedule_terms(const RegularizationSchedule& reg, const LyapunovParams& params,
                             double t);

/// log gamma(t) = int_{t1}^t mu(s) ds, closed form for every schedule kind.
double log_gamma(const RegularizationSchedule& reg, const LyapunovParams& params, double t1,
                 double t);
/// The same integral by composite trapezoid, `subdivisions` panels per
/// consecutive pair of `times`; returns one value per time (t1 need not be
/// a grid point).
std::vector<double> log_gamma_quadrature(const RegularizationSchedule& reg,
                                         const LyapunovParams& params, double t1,
                                         const std::vector<double>& times, int subdivisions = 64);

struct LyapunovSample {
    double t = 0.0;
    double eps = 0.0;
    double E = 0.0;
    double v_norm = 0.0;
    double phi_gap = 0.0;
    double W = 0.0;
    double mu = 0.0;
    double log_gamma = 0.0;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    /// 1/2 [ (lambda c + a) lambda eps_dot^2/eps^{3/2} - eps_dot ] |x*|^2; NaN without x*.
    double bound_rhs = 0.0;
    bool bound_rhs_available = false;
    double value_gap = 0.0;            // f(x) - min f (NaN when min f unknown)
    double dist_viscosity_sq = 0.0;    // |x - x_eps|^2
    double dist_xstar_sq = 0.0;        // |x - x*|^2 (NaN when x* unknown)
    double keybb_slack = 0.0;          // NaN when unavailable
    double est_basic1_slack = 0.0;
    double viscosity_residual = 0.0;
};

/// Evaluates the energy E(t) = (phi_t(x) - phi_t(x_eps)) + 1/2 |lambda sqrt(eps)(x - x_eps) + x'|^2
/// and companions along a trajectory. `viscosity[k]` must be x_eps at the
/// k-th sample time. `t1` anchors gamma(t1) = 1 (defaults to the schedule start).
std::vector<LyapunovSample> evaluate(const Trajectory& trajectory, const ObjectiveFunction& obj,
                                     const RegularizationSchedule& reg,
                                     const LyapunovParams& params,
                                     const std::vector<ViscosityPoint>& viscosity,
                                     std::optional<double> t1 = std::nullopt);

struct LemmaSlacks {
    double keybb = 0.0;       // E + eps/2 |x*|^2 - (f(x) - min f)
    double est_basic1 = 0.0;  // 2E/eps - |x - x_eps|^2
};

/// Both slacks must be >= -tol along any trajectory. Needs min f and x*.
LemmaSlacks lemma_basic_gaps(const ObjectiveFunction& obj, double eps, double energy,
                             const Vec& x, const Vec& x_eps);

struct BoundSample {
    double t = 0.0;
    bool applicable = false;  // t at or after the anchor sample
    double log_bound = 0.0;
    double bound = 0.0;
};

/// Right side of the integrated energy inequality, anchored at the first
/// sample t_a >= t1 (so bound(t_a) = E(t_a)):
///   gamma(t_a) E(t_a)/gamma(t) + |x*|^2/2 * int_{t_a}^t forcing gamma / gamma(t).
/// Computed in log space. Throws UnverifiedCondition unless `h1` is satisfied.
std::vector<BoundSample> theoretical_bound(const std::vector<LyapunovSample>& samples,
                                           const LyapunovParams& params,
                                           const RegularizationSchedule& reg,
                                           double xstar_norm_sq, const DecayCheck& h1,
                                           int subdivisions = 64);

/// Slack tolerance for inequality checks: max(1e-8, 1e-6 |quantity|).
double inequality_tolerance(double quantity);

struct InequalitySummary {
    int checked = 0;
    int violations = 0;
    double worst_margin = 0.0;  // min over checks of (rhs - lhs + tol); negative on violation
    bool passed() const noexcept { return violations == 0; }
};

/// Discrete form of d/dt(gamma E) <= bound_rhs gamma on consecutive samples at or after t1.
InequalitySummary check_discrete_energy_inequality(const std::vector<LyapunovSample>& samples,
                                                   const RegularizationSchedule& reg,
                                                   const LyapunovParams& params, double t1,
                                                   double xstar_norm_sq, int subdivisions = 16);

/// Difference-quotient speed of the viscosity curve between t and t + dt
/// against (-eps_dot/eps)|x_eps| (the larger of the two endpoint values).
/// Returns bound - speed.
double viscosity_speed_slack(const ObjectiveFunction& obj, const RegularizationSchedule& reg,
                             double t, double dt, double tol = 1e-12);

}  // namespace trigs
