#include "trigs/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace trigs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log((e^d - 1)/d), stable for any d.
double log_expm1_ratio(double d) {
    if (std::abs(d) < 1e-12) return 0.5 * d;
    if (d > 0.0) return d + std::log1p(-std::exp(-d)) - std::log(d);
    return std::log(-std::expm1(d)) - std::log(-d);
}

// Integral over [u, w] of exp(L) with L interpolated linearly between the
// endpoint values, i.e. the trapezoid rule in log space. Returns a log.
double log_panel(double u, double w, double lu, double lw) {
    if (lu == kNegInf && lw == kNegInf) return kNegInf;
    if (lu == kNegInf || lw == kNegInf) return std::log(0.5 * (w - u)) + std::max(lu, lw);
    return std::log(w - u) + lu + log_expm1_ratio(lw - lu);
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

}  // namespace

double LyapunovParams::decay_threshold() const noexcept {
    return std::min(2.0 * lambda - delta, delta - (a + 1.0) / a * lambda);
}

std::optional<OpenInterval> admissible_lambda_interval(double delta, double a, double c) {
    if (!(delta > 0.0)) throw ConfigError("delta", "delta must be positive");
    if (!(a > 1.0)) throw ConfigError("a", "a must exceed 1");
    if (!(c > 1.0)) throw ConfigError("c", "c must exceed 1");
    OpenInterval iv;
    iv.upper = a * delta / (a + 1.0);
    if (delta <= 2.0 - 1.0 / c) {
        iv.lower = 0.5 * delta;
    } else {
        const double s = delta + 1.0 / c;
        iv.lower = 0.5 * (s + std::sqrt(s * s - 4.0));
    }
    if (iv.lower >= iv.upper) return std::nullopt;
    return iv;
}

std::optional<OpenInterval> controlled_decay_lambda_interval(double delta) {
    if (!(delta > 0.0)) throw ConfigError("delta", "delta must be positive");
    OpenInterval iv{0.5 * delta, delta};
    if (delta > 2.0) iv.lower = 0.5 * (delta + std::sqrt(delta * delta - 4.0));
    return iv;
}

LyapunovParams LyapunovParams::default_pack(double delta) {
    if (delta == 1.0) return {1.0, 0.6, 2.0, 10.0};
    constexpr std::pair<double, double> candidates[] = {{2.0, 10.0}, {100.0, 100.0}};
    for (const auto& [a, c] : candidates)
        if (auto iv = admissible_lambda_interval(delta, a, c))
            return {delta, 0.5 * (iv->lower + iv->upper), a, c};
    throw ConfigError("delta", "no admissible (lambda, a, c) found for delta=" + fmt(delta));
}

void LyapunovParams::validate() const {
    if (!(delta > 0.0)) throw ConfigError("delta", "delta must be positive");
    if (!(a > 1.0)) throw ConfigError("a", "a must exceed 1");
    if (!(c > 1.0)) throw ConfigError("c", "c must exceed 1");
    const auto iv = admissible_lambda_interval(delta, a, c);
    if (!iv)
        throw ConfigError("lambda", "the admissible lambda interval is empty for delta=" + fmt(delta) +
                                        ", a=" + fmt(a) + ", c=" + fmt(c) + "; increase a and c");
    if (!iv->contains(lambda)) {
        std::string msg = "lambda=" + fmt(lambda) + " lies outside the admissible interval (" +
                          fmt(iv->lower) + ", " + fmt(iv->upper) + ") for delta=" + fmt(delta) +
                          ", a=" + fmt(a) + ", c=" + fmt(c);
        if (lambda <= 0.5 * delta) msg = "lambda must exceed delta/2; " + msg;
        throw ConfigError("lambda", msg);
    }
}

DecayCheck find_decay_onset(const RegularizationSchedule& reg, double threshold, double t_max) {
    DecayCheck out;
    out.threshold = threshold;
    const double t0 = reg.t_start();
    if (!(t_max >= t0)) throw ConfigError("t-max", "t_max precedes the schedule start");

    auto fail = [&](const std::string& why) {
        out.satisfied = false;
        out.margin = reg.inv_sqrt_eps_rate(t_max) - threshold;
        out.reason = why;
        return out;
    };

    if (reg.kind() != RegularizationSchedule::Kind::power_law) {
        if (threshold >= 0.0) {
            out.satisfied = true;
            out.t1 = t0;
            return out;
        }
        return fail("threshold " + fmt(threshold) + " is negative");
    }

    const double p = reg.exponent();
    const double k = 0.5 * p / std::sqrt(reg.coefficient());
    if (p >= 2.0) {
        if (k <= threshold) {
            out.satisfied = true;
            out.t1 = t0;
            return out;
        }
        return fail("d/dt(1/sqrt(eps)) = " + fmt(k) + " exceeds the threshold " + fmt(threshold) +
                    " at every t");
    }
    if (threshold <= 0.0)
        return fail("threshold " + fmt(threshold) + " is not positive; a strictly decreasing eps never meets it");
    // k t^{p/2-1} <= threshold  <=>  t >= (threshold/k)^{1/(p/2-1)}.
    const double crossing = std::pow(threshold / k, 1.0 / (0.5 * p - 1.0));
    out.t1 = std::max(t0, crossing);
    if (out.t1 > t_max)
        return fail("onset time " + fmt(out.t1) + " lies beyond the horizon " + fmt(t_max));
    out.satisfied = true;
    out.margin = reg.inv_sqrt_eps_rate(t_max) - threshold;
    return out;
}

DecayCheck check_H1(const RegularizationSchedule& reg, const LyapunovParams& params, double t_max) {
    return find_decay_onset(reg, params.decay_threshold(), t_max);
}

DecayCheck check_CD(const RegularizationSchedule& reg, double delta, double lambda, double t_max) {
    return find_decay_onset(reg, std::min(2.0 * lambda - delta, delta - lambda), t_max);
}

ScheduleTerms schedule_terms(const RegularizationSchedule& reg, const LyapunovParams& params,
                             double t) {
    ScheduleTerms s;
    s.eps = reg.eps(t);
    s.eps_dot = reg.eps_dot(t);
    const double root = std::sqrt(s.eps);
    const double e32 = s.eps * root;
    const double lam = params.lambda, del = params.delta;
    s.mu = (s.eps > 0.0 ? -s.eps_dot / (2.0 * s.eps) : 0.0) + (del - lam) * root;
    s.A = -s.eps_dot + 2.0 * (del - 2.0 * lam) * e32;
    s.B = 2.0 * ((1.0 + 1.0 / params.a) * lam - del) * e32 - s.eps_dot;
    s.C = lam * s.eps_dot + 2.0 * ((del + 1.0 / params.c) * lam - lam * lam - 1.0) * e32;
    s.forcing = e32 > 0.0
                    ? (lam * params.c + params.a) * lam * s.eps_dot * s.eps_dot / e32 - s.eps_dot
                    : 0.0;
    return s;
}

double log_gamma(const RegularizationSchedule& reg, const LyapunovParams& params, double t1,
                 double t) {
    const double dl = params.delta - params.lambda;
    switch (reg.kind()) {
        case RegularizationSchedule::Kind::zero: return 0.0;
        case RegularizationSchedule::Kind::constant:
            return dl * std::sqrt(reg.coefficient()) * (t - t1);
        case RegularizationSchedule::Kind::power_law: {
            const double p = reg.exponent();
            const double log_ratio = std::log(t / t1);
            const double q = 1.0 - 0.5 * p;
            const double root_part = q > 0.0 ? (std::pow(t, q) - std::pow(t1, q)) / q : log_ratio;
            return 0.5 * p * log_ratio + dl * std::sqrt(reg.coefficient()) * root_part;
        }
    }
    return 0.0;
}

std::vector<double> log_gamma_quadrature(const RegularizationSchedule& reg,
                                         const LyapunovParams& params, double t1,
                                         const std::vector<double>& times, int subdivisions) {
    if (times.empty()) return {};
    auto mu = [&](double s) { return schedule_terms(reg, params, s).mu; };
    auto trap = [&](double u, double w, int n) {
        const double h = (w - u) / n;
        double acc = 0.5 * (mu(u) + mu(w));
        for (int i = 1; i < n; ++i) acc += mu(u + i * h);
        return acc * h;
    };
    std::vector<double> cumulative(times.size(), 0.0);
    for (std::size_t k = 1; k < times.size(); ++k)
        cumulative[k] = cumulative[k - 1] + trap(times[k - 1], times[k], subdivisions);

    double offset;
    if (t1 <= times.front()) {
        offset = -trap(t1, times.front(), 16 * subdivisions);
    } else {
        std::size_t j = 0;
        while (j + 1 < times.size() && times[j + 1] <= t1) ++j;
        offset = cumulative[j] + trap(times[j], t1, subdivisions);
    }
    for (auto& v : cumulative) v -= offset;
    return cumulative;
}

LemmaSlacks lemma_basic_gaps(const ObjectiveFunction& obj, double eps, double energy,
                             const Vec& x, const Vec& x_eps) {
    if (!obj.known_min_value() || !obj.known_min_norm_solution())
        throw Unsupported(obj.name() + ": lemma slacks need min f and the minimum-norm solution");
    LemmaSlacks s;
    const double xs2 = obj.known_min_norm_solution()->squaredNorm();
    s.keybb = energy + 0.5 * eps * xs2 - (obj.value(x) - *obj.known_min_value());
    s.est_basic1 = eps > 0.0 ? 2.0 * energy / eps - (x - x_eps).squaredNorm()
                             : std::numeric_limits<double>::infinity();
    return s;
}

std::vector<LyapunovSample> evaluate(const Trajectory& trajectory, const ObjectiveFunction& obj,
                                     const RegularizationSchedule& reg,
                                     const LyapunovParams& params,
                                     const std::vector<ViscosityPoint>& viscosity,
                                     std::optional<double> t1) {
    if (viscosity.size() != trajectory.samples.size())
        throw std::invalid_argument("one viscosity point per trajectory sample is required");
    const double anchor = t1.value_or(reg.t_start());
    const auto& xstar = obj.known_min_norm_solution();
    const auto& fmin = obj.known_min_value();
    const auto& quad = obj.quadratic();

    std::vector<LyapunovSample> out;
    out.reserve(trajectory.samples.size());
    for (std::size_t k = 0; k < trajectory.samples.size(); ++k) {
        const auto& st = trajectory.samples[k];
        const auto& vp = viscosity[k];
        const ScheduleTerms terms = schedule_terms(reg, params, st.t);
        if (std::abs(vp.epsilon - terms.eps) > 1e-12 * terms.eps)
            throw std::invalid_argument("viscosity point " + std::to_string(k) +
                                        " was solved for a different epsilon");

        LyapunovSample s;
        s.t = st.t;
        s.eps = terms.eps;
        const Vec d = st.x - vp.point;
        if (quad) {
            // Exact for quadratics and free of cancellation near x_eps.
            s.phi_gap = 0.5 * (d.dot(quad->hessian * d) + terms.eps * d.squaredNorm());
        } else {
            s.phi_gap = phi(obj, terms.eps, st.x) - phi(obj, terms.eps, vp.point);
        }
        const Vec v = params.lambda * std::sqrt(terms.eps) * d + st.v;
        s.v_norm = v.norm();
        s.E = s.phi_gap + 0.5 * v.squaredNorm();
        s.W = global_energy(obj, reg, st);
        s.mu = terms.mu;
        s.log_gamma = log_gamma(reg, params, anchor, st.t);
        s.A = terms.A;
        s.B = terms.B;
        s.C = terms.C;
        s.bound_rhs_available = xstar.has_value();
        s.bound_rhs = xstar ? 0.5 * terms.forcing * xstar->squaredNorm() : kNaN;
        s.value_gap = fmin ? obj.value(st.x) - *fmin : kNaN;
        s.dist_viscosity_sq = d.squaredNorm();
        s.dist_xstar_sq = xstar ? (st.x - *xstar).squaredNorm() : kNaN;
        s.viscosity_residual = vp.residual;
        if (fmin && xstar) {
            const LemmaSlacks ls = lemma_basic_gaps(obj, terms.eps, s.E, st.x, vp.point);
            s.keybb_slack = ls.keybb;
            s.est_basic1_slack = ls.est_basic1;
        } else {
            s.keybb_slack = kNaN;
            s.est_basic1_slack = kNaN;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<BoundSample> theoretical_bound(const std::vector<LyapunovSample>& samples,
                                           const LyapunovParams& params,
                                           const RegularizationSchedule& reg,
                                           double xstar_norm_sq, const DecayCheck& h1,
                                           int subdivisions) {
    if (!h1.satisfied)
        throw UnverifiedCondition("energy bound requested but the decay condition is not verified: " +
                                  h1.reason);
    std::vector<BoundSample> out(samples.size());
    std::size_t anchor = 0;
    while (anchor < samples.size() && samples[anchor].t < h1.t1) ++anchor;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        out[k].t = samples[k].t;
        out[k].bound = kNaN;
        out[k].log_bound = kNaN;
    }
    if (anchor == samples.size()) return out;

    auto lg = [&](double t) { return log_gamma(reg, params, h1.t1, t); };
    auto log_integrand = [&](double t) {
        const double f = schedule_terms(reg, params, t).forcing;
        return f > 0.0 ? std::log(f) + lg(t) : kNegInf;
    };
    const double log_half_xs = xstar_norm_sq > 0.0 ? std::log(0.5 * xstar_norm_sq) : kNegInf;
    const double ea = samples[anchor].E;
    const double log_start = (ea > 0.0 ? std::log(ea) : kNegInf) + lg(samples[anchor].t);

    double log_integral = kNegInf;
    for (std::size_t k = anchor; k < samples.size(); ++k) {
        if (k > anchor) {
            const double u = samples[k - 1].t, w = samples[k].t;
            const double h = (w - u) / subdivisions;
            double prev_t = u, prev_l = log_integrand(u);
            for (int i = 1; i <= subdivisions; ++i) {
                const double s = i == subdivisions ? w : u + i * h;
                const double ls = log_integrand(s);
                log_integral = log_add_exp(log_integral, log_panel(prev_t, s, prev_l, ls));
                prev_t = s;
                prev_l = ls;
            }
        }
        const double lgt = lg(samples[k].t);
        const double lb = log_add_exp(log_start - lgt, log_half_xs + log_integral - lgt);
        out[k].applicable = true;
        out[k].log_bound = lb;
        out[k].bound = std::exp(lb);
    }
    return out;
}

double inequality_tolerance(double quantity) {
    return std::max(1e-8, 1e-6 * std::abs(quantity));
}

InequalitySummary check_discrete_energy_inequality(const std::vector<LyapunovSample>& samples,
                                                   const RegularizationSchedule& reg,
                                                   const LyapunovParams& params, double t1,
                                                   double xstar_norm_sq, int subdivisions) {
    InequalitySummary sum;
    sum.worst_margin = std::numeric_limits<double>::infinity();
    auto lg = [&](double t) { return log_gamma(reg, params, t1, t); };
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const auto& s0 = samples[k];
        const auto& s1 = samples[k + 1];
        if (s0.t < t1) continue;
        const double lg1 = lg(s1.t);
        // Everything divided by gamma(t_{k+1}).
        const double lhs = s1.E - s0.E * std::exp(lg(s0.t) - lg1);
        double peak = 0.0;
        for (int i = 0; i <= subdivisions; ++i) {
            const double s = s0.t + (s1.t - s0.t) * i / subdivisions;
            const double f = schedule_terms(reg, params, s).forcing;
            peak = std::max(peak, 0.5 * f * xstar_norm_sq * std::exp(lg(s) - lg1));
        }
        const double rhs = (s1.t - s0.t) * peak;
        const double tol = inequality_tolerance(std::max({std::abs(s0.E), std::abs(s1.E), rhs}));
        const double margin = rhs - lhs + tol;
        ++sum.checked;
        if (margin < 0.0) ++sum.violations;
        sum.worst_margin = std::min(sum.worst_margin, margin);
    }
    if (sum.checked == 0) sum.worst_margin = 0.0;
    return sum;
}

double viscosity_speed_slack(const ObjectiveFunction& obj, const RegularizationSchedule& reg,
                             double t, double dt, double tol) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    InnerSolveOptions o;
    o.tol = 1e-13;
    const ViscosityPoint a = solve_viscosity_point(obj, reg.eps(t), o);
    o.warm_start = a.point;
    const ViscosityPoint b = solve_viscosity_point(obj, reg.eps(t + dt), o);
    const double speed = (b.point - a.point).norm() / dt;
    double bound = 0.0;
    constexpr int n = 8;
    for (int i = 0; i <= n; ++i) {
        const double s = t + dt * i / n;
        const ViscosityPoint pt = i == 0 ? a : i == n ? b : solve_viscosity_point(obj, reg.eps(s), o);
        bound = std::max(bound, -reg.eps_dot(s) / reg.eps(s) * pt.point.norm());
    }
    return bound + tol - speed;
}

}  // namespace trigs
