#pragma once

#include "trigs/dynamics.hpp"
#include "trigs/lyapunov.hpp"
#include "trigs/rates.hpp"
#include "trigs/tikhonov.hpp"

#include <optional>
#include <string>
#include <vector>

namespace trigs {

/// Everything needed to reproduce one run. Defaults give the 20-dimensional
/// quadratic with eps(t) = 1/t^{2/3}, delta = 1 on [1, 1e4].
struct ExperimentConfig {
    std::string problem = "paper-quadratic-20";
    double p = 2.0 / 3.0;
    double c0 = 1.0;
    double t0 = 1.0;
    double delta = 1.0;
    std::optional<double> lambda;  // nullopt: automatic pack
    double a = 2.0;
    double c = 10.0;
    double t_end = 1e4;
    StepControl control;
    /// Empty: origin. One entry: filled. Otherwise the full vector.
    std::vector<double> x0;
    std::vector<double> v0;
    double theta = 1.0;  // Moreau parameter, used for prox-only problems
    double viscosity_tol = 1e-10;

    /// Resolved and validated (delta, lambda, a, c).
    LyapunovParams lyapunov_params() const;
    /// Throws ConfigError naming the offending key.
    void validate() const;
    RegularizationSchedule schedule() const;
};

struct SuiteResult {
    std::string name;
    bool applicable = true;
    bool passed = true;
    int checked = 0;
    int violations = 0;
    double worst_margin = 0.0;
    std::string detail;
};

/// Fitted slope against its target band. Descriptive only: the guarantees
/// are the bounded-scaling checks.
struct SlopeBand {
    std::string quantity;
    double target_slope = 0.0;
    double half_width = 0.0;
    std::optional<double> fitted;
    bool within = false;
};

struct NamedSeries {
    std::string name;
    std::vector<double> values;
};

struct StageFailure {
    std::string stage;
    std::string message;
};

struct RunResult {
    ExperimentConfig config;
    LyapunovParams params;
    std::string objective_name;
    std::optional<Trajectory> trajectory;
    std::vector<ViscosityPoint> viscosity;
    std::vector<LyapunovSample> lyapunov;
    std::vector<BoundSample> bound;
    DecayCheck h1;
    std::optional<EnergyReport> energy;
    std::vector<NamedSeries> extra_series;
    std::vector<RateEstimate> rates;
    std::vector<std::string> rate_notes;
    std::vector<ScalingCheck> scaling;
    std::vector<SlopeBand> slopes;
    std::vector<SuiteResult> suites;
    std::optional<StageFailure> failure;
    bool exploratory_trajectory = false;

    std::vector<double> times() const;
    /// value_gap, dist_xstar_sq, dist_viscosity_sq, energy, W, or an extra series.
    std::vector<double> series(const std::string& quantity) const;
    const RateEstimate* rate(const std::string& quantity) const;
    const ScalingCheck* scaling_check(const std::string& quantity) const;
    const SlopeBand* slope(const std::string& quantity) const;
    const SuiteResult* suite(const std::string& name) const;
    /// No stage failure and every applicable inequality suite passed.
    bool all_inequalities_pass() const;
};

/// Integrate, solve x_eps per sample, evaluate the Lyapunov diagnostics,
/// fit rates over the last two decades and run every inequality suite.
/// Prox-only problems are routed through their Moreau surrogate.
/// Stage failures are recorded in `failure`, never thrown; configuration
/// errors are thrown as ConfigError before anything runs.
RunResult run_experiment(const ExperimentConfig& config);

/// Same pipeline on the Moreau envelope f_theta of a prox-only problem, plus
/// f(prox(x)) - min f and |x - prox(x)|^2 with target exponent p.
RunResult nonsmooth_experiment(const ExperimentConfig& config, double theta);

struct TradeoffRow {
    double p = 0.0;
    double value_target = 0.0;       // p
    double trajectory_target = 0.0;  // (2 - p)/2
    std::optional<double> value_slope;
    std::optional<double> trajectory_slope;
    bool value_bounded = false;
    bool trajectory_bounded = false;
    bool inequalities_pass = false;
    std::string error;
};

/// One run per p (concurrently); rows come back in input order.
std::vector<TradeoffRow> tradeoff_sweep(const std::vector<double>& ps,
                                        const ExperimentConfig& base);

}  // namespace trigs
