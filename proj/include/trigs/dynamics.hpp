#pragma once

#include "trigs/problem.hpp"
#include "trigs/schedule.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace trigs {

/// (t, x, x') of the first-order form x' = v, v' = -damping v - grad f(x) - eps x.
struct DynamicsState {
    double t = 0.0;
    Vec x;
    Vec v;
};

enum class SampleGrid { log_spaced, linear };

struct StepControl {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double min_step = 1e-12;
    int samples = 400;
    /// When set, classical fixed-step RK4 with this step replaces the
    /// adaptive Dormand-Prince 5(4) pair.
    std::optional<double> fixed_step;
    SampleGrid grid = SampleGrid::log_spaced;
    long max_steps = 100'000'000;
};

struct IntegratorStats {
    long accepted_steps = 0;
    long rejected_steps = 0;
    long rhs_evaluations = 0;
    double min_step = 0.0;
    double max_step = 0.0;
    /// Largest normalized local error estimate among accepted steps (adaptive mode).
    double max_local_error = 0.0;
    /// Step size in use when each sample was reached.
    std::vector<double> step_history;
};

struct Trajectory {
    std::vector<DynamicsState> samples;
    IntegratorStats stats;

    std::vector<double> times() const;
};

/// Integration aborted; `partial()` holds the samples reached so far.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& message, Trajectory partial)
        : Error(message), partial_(std::move(partial)) {}
    const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

/// Right-hand side (dx, dv) of the first-order system at `state`.
std::pair<Vec, Vec> rhs(const ObjectiveFunction& obj, const DampingSchedule& damping,
                        const RegularizationSchedule& reg, const DynamicsState& state);

Trajectory integrate(const ObjectiveFunction& obj, const DampingSchedule& damping,
                     const RegularizationSchedule& reg, const Vec& x0, const Vec& v0, double t0,
                     double t_end, const StepControl& control = {});

/// Sample times of the requested grid, first = t0 and last = t_end exactly.
std::vector<double> sample_times(double t0, double t_end, int samples, SampleGrid grid);

/// W = 1/2 |x'|^2 + f(x) + 1/2 eps(t) |x|^2.
double global_energy(const ObjectiveFunction& obj, const RegularizationSchedule& reg,
                     const DynamicsState& state);

struct EnergyReport {
    std::vector<double> energy;  // W at each sample
    int monotonicity_violations = 0;
    /// Pairs with W - min f at or below kRoundingFloor on both ends; not judged.
    int floor_pairs = 0;
    /// max_k (W_{k+1} - W_k) / max(|W_k|, |W_{k+1}|); <= 0 when monotone.
    double worst_relative_increase = 0.0;
    /// Trapezoidal integral of sqrt(eps)|x'|^2 for regularized damping,
    /// of damping(t)|x'|^2 otherwise.
    double dissipation_integral = 0.0;
    /// (W(t0) - min f)/delta resp. W(t0) - min f, when min f is known.
    std::optional<double> dissipation_bound;

    bool monotone() const noexcept { return monotonicity_violations == 0; }
    bool estimate_holds(double slack = 1e-6) const noexcept {
        return dissipation_bound && dissipation_integral <= *dissipation_bound + slack;
    }
};

/// Checks that W is nonincreasing sample to sample (relative slack
/// `rel_slack`) and evaluates the dissipation estimate.
EnergyReport check_energy(const Trajectory& traj, const ObjectiveFunction& obj,
                          const DampingSchedule& damping, const RegularizationSchedule& reg,
                          double rel_slack = 1e-9);

/// Least-squares fit of log(value) = intercept + rate * t.
struct ExponentialRate {
    double rate = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int points_used = 0;
    bool truncated = false;  // window cut short by the rounding floor
};

struct HeavyBallProbe {
    ExponentialRate fit;
    ObjectiveFunction objective;
    Trajectory trajectory;
    std::vector<double> value_gap;
};

/// Integrates x'' + damping_multiplier * 2 sqrt(mu) x' + mu x = 0 (f = mu x^2 / 2)
/// from x = 1, x' = 0 and fits the exponential decay rate of f over the
/// last half of the span. Values within 1e-14 of the minimum truncate the
/// window.
HeavyBallProbe heavy_ball_rate_probe(double mu, double t_start = 0.0, double t_end = 20.0,
                                     double damping_multiplier = 1.0);

}  // namespace trigs
