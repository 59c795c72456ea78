#include "trigs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace trigs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec initial_vector(const std::vector<double>& spec, int n, const char* key) {
    if (spec.empty()) return Vec::Zero(n);
    if (spec.size() == 1) return Vec::Constant(n, spec.front());
    if (static_cast<int>(spec.size()) != n)
        throw ConfigError(key, std::string(key) + " has " + std::to_string(spec.size()) +
                                   " entries but the problem has dimension " + std::to_string(n));
    return Eigen::Map<const Vec>(spec.data(), n);
}

SuiteResult make_suite(std::string name) {
    SuiteResult s;
    s.name = std::move(name);
    s.worst_margin = std::numeric_limits<double>::infinity();
    return s;
}

void record(SuiteResult& s, double margin) {
    ++s.checked;
    if (margin < 0.0) ++s.violations;
    s.worst_margin = std::min(s.worst_margin, margin);
}

void finish(SuiteResult& s) {
    if (s.checked == 0) s.worst_margin = 0.0;
    s.passed = !s.applicable || s.violations == 0;
}

SuiteResult not_applicable(std::string name, std::string why) {
    SuiteResult s;
    s.name = std::move(name);
    s.applicable = false;
    s.passed = true;
    s.detail = std::move(why);
    return s;
}

// Shared pipeline; `prox_source` is the prox-only problem when `obj` is
// its Moreau surrogate.
RunResult run_pipeline(const ExperimentConfig& cfg, const ObjectiveFunction& obj,
                       const std::optional<ObjectiveFunction>& prox_source) {
    RunResult res;
    res.config = cfg;
    res.params = cfg.lyapunov_params();
    res.objective_name = obj.name();
    const auto reg = cfg.schedule();
    const auto damping = DampingSchedule::trigs(cfg.delta, reg);
    const int n = obj.dimension();
    const Vec x0 = initial_vector(cfg.x0, n, "x0");
    const Vec v0 = initial_vector(cfg.v0, n, "v0");
    res.exploratory_trajectory = reg.trajectory_diagnostics_exploratory();

    // integrate
    try {
        res.trajectory = integrate(obj, damping, reg, x0, v0, cfg.t0, cfg.t_end, cfg.control);
    } catch (const IntegrationError& e) {
        res.trajectory = e.partial();
        res.failure = StageFailure{"integrate", e.what()};
        return res;
    } catch (const std::exception& e) {
        res.failure = StageFailure{"integrate", e.what()};
        return res;
    }
    const Trajectory& traj = *res.trajectory;
    const std::vector<double> ts = traj.times();

    // viscosity
    try {
        std::vector<double> eps;
        eps.reserve(ts.size());
        for (double t : ts) eps.push_back(reg.eps(t));
        InnerSolveOptions o;
        o.tol = cfg.viscosity_tol;
        res.viscosity = viscosity_curve(obj, eps, o);
    } catch (const std::exception& e) {
        res.failure = StageFailure{"viscosity", e.what()};
        return res;
    }

    // lyapunov
    const auto& xstar = obj.known_min_norm_solution();
    const double xs2 = xstar ? xstar->squaredNorm() : kNaN;
    try {
        res.h1 = check_H1(reg, res.params, cfg.t_end);
        const double t1 = res.h1.satisfied ? res.h1.t1 : cfg.t0;
        res.lyapunov = evaluate(traj, obj, reg, res.params, res.viscosity, t1);
        if (res.h1.satisfied && xstar)
            res.bound = theoretical_bound(res.lyapunov, res.params, reg, xs2, res.h1);
        res.energy = check_energy(traj, obj, damping, reg);
        if (prox_source) {
            NamedSeries gap{"prox_value_gap", {}}, resid{"prox_residual_sq", {}};
            const double fmin = prox_source->known_min_value().value_or(kNaN);
            for (const auto& s : traj.samples) {
                const Vec px = prox_source->prox(cfg.theta, s.x);
                gap.values.push_back(prox_source->value(px) - fmin);
                resid.values.push_back((s.x - px).squaredNorm());
            }
            res.extra_series.push_back(std::move(gap));
            res.extra_series.push_back(std::move(resid));
        }
    } catch (const std::exception& e) {
        res.failure = StageFailure{"lyapunov", e.what()};
        return res;
    }

    // rates
    const double p = reg.kind() == RegularizationSchedule::Kind::power_law ? reg.exponent() : 0.0;
    const double fit_lo = std::max(cfg.t0, cfg.t_end / 100.0);
    const double decade_lo = std::max(cfg.t0, cfg.t_end / 10.0);
    struct Quantity {
        std::string name;
        std::optional<double> target;
        bool exploratory;
    };
    std::vector<Quantity> quantities = {
        {"value_gap", p, false},
        {"dist_xstar_sq", std::nullopt, false},
        {"dist_viscosity_sq", 0.5 * (2.0 - p), res.exploratory_trajectory},
        {"energy", 0.5 * (p + 2.0), false},
    };
    if (prox_source) {
        quantities.push_back({"prox_value_gap", p, false});
        quantities.push_back({"prox_residual_sq", p, false});
    }
    for (const auto& q : quantities) {
        const std::vector<double> values = res.series(q.name);
        if (values.empty() || std::all_of(values.begin(), values.end(),
                                          [](double v) { return std::isnan(v); }))
            continue;
        try {
            res.rates.push_back(fit_rate(q.name, ts, values, fit_lo, cfg.t_end, q.target));
        } catch (const InsufficientData& e) {
            res.rate_notes.push_back(e.what());
        }
        if (q.target && p > 0.0) {
            try {
                ScalingCheck sc = bounded_scaling(q.name, ts, values, *q.target, decade_lo, cfg.t_end);
                if (!q.exploratory) res.scaling.push_back(sc);
            } catch (const InsufficientData& e) {
                res.rate_notes.push_back(e.what());
            }
        }
    }
    if (p > 0.0) {
        auto band = [&](const std::string& name, double target, double width) {
            SlopeBand b{name, -target, width, std::nullopt, false};
            if (const RateEstimate* r = res.rate(name)) {
                b.fitted = r->slope;
                b.within = std::abs(r->slope + target) <= width;
            }
            res.slopes.push_back(b);
        };
        band("value_gap", p, 0.2);
        if (!res.exploratory_trajectory) band("dist_viscosity_sq", 0.5 * (2.0 - p), 0.25);
    }

    // suites
    const auto& L = res.lyapunov;
    const double t1 = res.h1.t1;
    {
        SuiteResult s = make_suite("value_gap_estimate");
        SuiteResult d = make_suite("distance_estimate");
        for (const auto& x : L) {
            if (std::isnan(x.keybb_slack)) continue;
            record(s, x.keybb_slack + inequality_tolerance(x.E + 0.5 * x.eps * xs2));
            record(d, x.est_basic1_slack + inequality_tolerance(2.0 * x.E / x.eps));
        }
        if (s.checked == 0) {
            s.applicable = d.applicable = false;
            s.detail = d.detail = "min f or x* unknown";
        }
        finish(s);
        finish(d);
        res.suites.push_back(s);
        res.suites.push_back(d);
    }
    if (res.h1.satisfied && !res.bound.empty()) {
        SuiteResult s = make_suite("energy_bound");
        for (std::size_t k = 0; k < L.size(); ++k) {
            if (!res.bound[k].applicable) continue;
            record(s, res.bound[k].bound + inequality_tolerance(res.bound[k].bound) - L[k].E);
        }
        finish(s);
        res.suites.push_back(s);
    } else {
        res.suites.push_back(not_applicable(
            "energy_bound", res.h1.satisfied ? "x* unknown" : "decay condition: " + res.h1.reason));
    }
    if (res.h1.satisfied) {
        SuiteResult s = make_suite("sign_terms");
        for (const auto& x : L) {
            if (x.t < t1) continue;
            const double tol = 1e-12 * std::pow(x.eps, 1.5);
            record(s, tol - std::max({x.A, x.B, x.C}));
        }
        finish(s);
        res.suites.push_back(s);

        if (xstar) {
            const InequalitySummary di =
                check_discrete_energy_inequality(L, reg, res.params, t1, xs2);
            SuiteResult d = make_suite("energy_inequality_discrete");
            d.checked = di.checked;
            d.violations = di.violations;
            d.worst_margin = di.worst_margin;
            finish(d);
            res.suites.push_back(d);
        }

        SuiteResult g = make_suite("gamma_quadrature");
        const auto quad = log_gamma_quadrature(reg, res.params, t1, ts);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (ts[k] < t1) continue;
            const double closed = log_gamma(reg, res.params, t1, ts[k]);
            record(g, 1e-6 * std::max(1.0, std::abs(closed)) - std::abs(closed - quad[k]));
        }
        finish(g);
        res.suites.push_back(g);
    } else {
        res.suites.push_back(not_applicable("sign_terms", "decay condition: " + res.h1.reason));
    }
    {
        SuiteResult s = make_suite("global_energy_monotone");
        s.checked = static_cast<int>(res.energy->energy.size()) - 1 - res.energy->floor_pairs;
        if (res.energy->floor_pairs > 0)
            s.detail = std::to_string(res.energy->floor_pairs) + " pairs at the rounding floor";
        s.violations = res.energy->monotonicity_violations;
        s.worst_margin = -res.energy->worst_relative_increase;
        finish(s);
        res.suites.push_back(s);
        if (res.energy->dissipation_bound) {
            SuiteResult d = make_suite("dissipation_estimate");
            record(d, *res.energy->dissipation_bound + 1e-6 - res.energy->dissipation_integral);
            finish(d);
            res.suites.push_back(d);
        }
    }
    {
        SuiteResult s = make_suite("bounded_scaling");
        for (const auto& c : res.scaling) record(s, c.factor * c.reference - c.sup);
        if (s.checked == 0) {
            s.applicable = false;
            s.detail = "no targets";
        } else if (!res.h1.satisfied) {
            s.applicable = false;
            s.detail = "rates need the decay condition: " + res.h1.reason;
        }
        finish(s);
        res.suites.push_back(s);
    }
    return res;
}

}  // namespace

LyapunovParams ExperimentConfig::lyapunov_params() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta", "delta must be positive");
    if (!(a > 1.0)) throw ConfigError("a", "a must exceed 1");
    if (!(c > 1.0)) throw ConfigError("c", "c must exceed 1");
    LyapunovParams lp;
    if (lambda) {
        lp = {delta, *lambda, a, c};
    } else if (a == 2.0 && c == 10.0) {
        lp = LyapunovParams::default_pack(delta);
    } else {
        const auto iv = admissible_lambda_interval(delta, a, c);
        if (!iv) throw ConfigError("a", "admissible lambda interval is empty for the given a, c");
        lp = {delta, 0.5 * (iv->lower + iv->upper), a, c};
    }
    lp.validate();
    return lp;
}

RegularizationSchedule ExperimentConfig::schedule() const {
    return RegularizationSchedule::power_law(c0, p, t0);
}

void ExperimentConfig::validate() const {
    const ObjectiveFunction obj = make_problem(problem);
    if (!(p > 0.0 && p <= 2.0)) throw ConfigError("p", "p must lie in (0, 2]");
    (void)schedule();
    if (!(t_end >= t0) || !std::isfinite(t_end)) throw ConfigError("t-end", "t-end must be >= t0");
    if (!(control.rel_tol > 0.0)) throw ConfigError("rel-tol", "rel-tol must be positive");
    if (!(control.abs_tol >= 0.0)) throw ConfigError("abs-tol", "abs-tol must be nonnegative");
    if (!(control.min_step > 0.0)) throw ConfigError("min-step", "min-step must be positive");
    if (control.samples < 2) throw ConfigError("samples", "samples must be at least 2");
    if (control.fixed_step && !(*control.fixed_step > 0.0))
        throw ConfigError("fixed-step", "fixed-step must be positive");
    if (!(theta > 0.0)) throw ConfigError("theta", "theta must be positive");
    if (!(viscosity_tol > 0.0)) throw ConfigError("viscosity-tol", "viscosity-tol must be positive");
    (void)initial_vector(x0, obj.dimension(), "x0");
    (void)initial_vector(v0, obj.dimension(), "v0");
    (void)lyapunov_params();
}

std::vector<double> RunResult::times() const {
    return trajectory ? trajectory->times() : std::vector<double>{};
}

std::vector<double> RunResult::series(const std::string& quantity) const {
    std::vector<double> out;
    out.reserve(lyapunov.size());
    if (quantity == "value_gap")
        for (const auto& s : lyapunov) out.push_back(s.value_gap);
    else if (quantity == "dist_xstar_sq")
        for (const auto& s : lyapunov) out.push_back(s.dist_xstar_sq);
    else if (quantity == "dist_viscosity_sq")
        for (const auto& s : lyapunov) out.push_back(s.dist_viscosity_sq);
    else if (quantity == "energy")
        for (const auto& s : lyapunov) out.push_back(s.E);
    else if (quantity == "W")
        for (const auto& s : lyapunov) out.push_back(s.W);
    else {
        for (const auto& e : extra_series)
            if (e.name == quantity) return e.values;
        throw std::invalid_argument("unknown series '" + quantity + "'");
    }
    return out;
}

const RateEstimate* RunResult::rate(const std::string& quantity) const {
    for (const auto& r : rates)
        if (r.quantity == quantity) return &r;
    return nullptr;
}

const ScalingCheck* RunResult::scaling_check(const std::string& quantity) const {
    for (const auto& c : scaling)
        if (c.quantity == quantity) return &c;
    return nullptr;
}

const SlopeBand* RunResult::slope(const std::string& quantity) const {
    for (const auto& b : slopes)
        if (b.quantity == quantity) return &b;
    return nullptr;
}

const SuiteResult* RunResult::suite(const std::string& name) const {
    for (const auto& s : suites)
        if (s.name == name) return &s;
    return nullptr;
}

bool RunResult::all_inequalities_pass() const {
    if (failure) return false;
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

RunResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const ObjectiveFunction obj = make_problem(config.problem);
    if (!obj.is_smooth()) return nonsmooth_experiment(config, config.theta);
    return run_pipeline(config, obj, std::nullopt);
}

RunResult nonsmooth_experiment(const ExperimentConfig& config, double theta) {
    ExperimentConfig cfg = config;
    cfg.theta = theta;
    cfg.validate();
    const ObjectiveFunction problem = make_problem(cfg.problem);
    if (!problem.has_prox())
        throw ConfigError("problem", "'" + cfg.problem + "' has no prox; use run_experiment");
    const ObjectiveFunction surrogate = moreau_objective(problem, theta);
    return run_pipeline(cfg, surrogate, problem);
}

std::vector<TradeoffRow> tradeoff_sweep(const std::vector<double>& ps,
                                        const ExperimentConfig& base) {
    std::vector<std::future<TradeoffRow>> jobs;
    jobs.reserve(ps.size());
    for (double p : ps) {
        jobs.push_back(std::async(std::launch::async, [p, base]() {
            TradeoffRow row;
            row.p = p;
            row.value_target = p;
            row.trajectory_target = 0.5 * (2.0 - p);
            try {
                if (!(p > 0.0 && p < 2.0)) throw ConfigError("p", "sweep values must lie in (0, 2)");
                ExperimentConfig cfg = base;
                cfg.p = p;
                const RunResult r = run_experiment(cfg);
                if (const auto* e = r.rate("value_gap")) row.value_slope = e->slope;
                if (const auto* e = r.rate("dist_viscosity_sq")) row.trajectory_slope = e->slope;
                if (const auto* c = r.scaling_check("value_gap")) row.value_bounded = c->passed;
                if (const auto* c = r.scaling_check("dist_viscosity_sq")) row.trajectory_bounded = c->passed;
                row.inequalities_pass = r.all_inequalities_pass();
                if (r.failure) row.error = r.failure->stage + ": " + r.failure->message;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        }));
    }
    std::vector<TradeoffRow> rows;
    rows.reserve(jobs.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

}  // namespace trigs
