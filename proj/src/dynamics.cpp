#include "trigs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trigs {

std::vector<double> Trajectory::times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.t);
    return out;
}

std::pair<Vec, Vec> rhs(const ObjectiveFunction& obj, const DampingSchedule& damping,
                        const RegularizationSchedule& reg, const DynamicsState& state) {
    if (state.t < reg.t_start())
        throw std::domain_error("rhs evaluated at t=" + std::to_string(state.t) +
                                " before the schedule start " + std::to_string(reg.t_start()));
    Vec dv = -damping.coefficient(state.t) * state.v - obj.gradient(state.x) - reg.eps(state.t) * state.x;
    return {state.v, std::move(dv)};
}

std::vector<double> sample_times(double t0, double t_end, int samples, SampleGrid grid) {
    if (!(t_end >= t0)) throw ConfigError("t-end", "t_end must not precede t0");
    if (t_end == t0) return {t0};
    if (samples < 2) throw ConfigError("samples", "at least two samples are needed");
    std::vector<double> ts(static_cast<std::size_t>(samples));
    if (grid == SampleGrid::log_spaced) {
        if (!(t0 > 0.0)) throw ConfigError("t0", "a log-spaced grid needs t0 > 0");
        const double span = std::log(t_end / t0);
        for (int k = 0; k < samples; ++k)
            ts[static_cast<std::size_t>(k)] = t0 * std::exp(span * k / (samples - 1));
    } else {
        for (int k = 0; k < samples; ++k)
            ts[static_cast<std::size_t>(k)] = t0 + (t_end - t0) * k / (samples - 1);
    }
    ts.front() = t0;
    ts.back() = t_end;
    return ts;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class System {
public:
    System(const ObjectiveFunction& obj, const DampingSchedule& damping,
           const RegularizationSchedule& reg, IntegratorStats& stats)
        : obj_(obj), damping_(damping), reg_(reg), stats_(stats), n_(obj.dimension()) {}

    Vec operator()(double t, const Vec& y) const {
        ++stats_.rhs_evaluations;
        Vec dy(2 * n_);
        const auto x = y.head(n_);
        const auto v = y.tail(n_);
        dy.head(n_) = v;
        dy.tail(n_) = -damping_.coefficient(t) * v - obj_.gradient(x) - reg_.eps(t) * x;
        return dy;
    }

    int dimension() const noexcept { return n_; }

private:
    const ObjectiveFunction& obj_;
    const DampingSchedule& damping_;
    const RegularizationSchedule& reg_;
    IntegratorStats& stats_;
    int n_;
};

DynamicsState unpack(double t, const Vec& y, int n) {
    return {t, y.head(n), y.tail(n)};
}

bool all_finite(const Vec& y) { return y.allFinite(); }

void record_step(IntegratorStats& stats, double h) {
    if (stats.accepted_steps == 1) {
        stats.min_step = h;
        stats.max_step = h;
    } else {
        stats.min_step = std::min(stats.min_step, h);
        stats.max_step = std::max(stats.max_step, h);
    }
}

}  // namespace

Trajectory integrate(const ObjectiveFunction& obj, const DampingSchedule& damping,
                     const RegularizationSchedule& reg, const Vec& x0, const Vec& v0, double t0,
                     double t_end, const StepControl& control) {
    if (!obj.is_smooth())
        throw Unsupported(obj.name() + ": integrate needs a smooth objective (wrap it with moreau_objective)");
    const int n = obj.dimension();
    if (x0.size() != n || v0.size() != n)
        throw ConfigError("x0", "initial position and velocity must match the problem dimension");
    if (!(t0 >= reg.t_start()))
        throw ConfigError("t0", "t0 precedes the schedule start time");
    if (!(control.rel_tol > 0.0) || !(control.abs_tol >= 0.0))
        throw ConfigError("rel-tol", "tolerances must be positive");
    if (control.fixed_step && !(*control.fixed_step > 0.0))
        throw ConfigError("fixed-step", "fixed step must be positive");

    const std::vector<double> grid = sample_times(t0, t_end, control.samples, control.grid);

    Trajectory traj;
    traj.samples.reserve(grid.size());
    traj.samples.push_back({t0, x0, v0});
    traj.stats.step_history.push_back(0.0);
    if (grid.size() == 1) return traj;

    System f(obj, damping, reg, traj.stats);
    Vec y(2 * n);
    y << x0, v0;
    double t = t0;

    auto fail = [&](const std::string& why) -> IntegrationError {
        return IntegrationError(why + " at t=" + std::to_string(t), traj);
    };

    if (control.fixed_step) {
        const double h_nominal = *control.fixed_step;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            const double target = grid[k];
            while (t < target) {
                double h = h_nominal;
                // Land exactly on the sample; absorb a floating-point sliver.
                if (t + h >= target - 1e-12 * std::max(1.0, std::abs(target))) h = target - t;
                const Vec k1 = f(t, y);
                const Vec k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
                const Vec k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
                const Vec k4 = f(t + h, y + h * k3);
                y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t = (h == target - t) ? target : t + h;
                ++traj.stats.accepted_steps;
                record_step(traj.stats, h);
                if (!all_finite(y)) throw fail("non-finite state");
                if (traj.stats.accepted_steps > control.max_steps) throw fail("step budget exhausted");
            }
            t = target;
            traj.samples.push_back(unpack(t, y, n));
            traj.stats.step_history.push_back(h_nominal);
        }
        return traj;
    }

    auto error_norm = [&](const Vec& err, const Vec& y_old, const Vec& y_new) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            // Floored so a zero abs-tol on a zero component cannot give 0/0.
            const double scale = std::max(
                control.abs_tol + control.rel_tol * std::max(std::abs(y_old[i]), std::abs(y_new[i])),
                std::numeric_limits<double>::min());
            const double r = err[i] / scale;
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(err.size()));
    };

    Vec k1 = f(t, y);
    // Starting step from the scale of the solution and of its derivative.
    double h;
    {
        Vec sc = (control.abs_tol + control.rel_tol * y.array().abs())
                     .max(std::numeric_limits<double>::min())
                     .matrix();
        const double d0 = std::sqrt((y.array() / sc.array()).square().mean());
        const double d1 = std::sqrt((k1.array() / sc.array()).square().mean());
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, 0.1 * (t_end - t0));
        h = std::max(h, control.min_step);
    }

    std::size_t next = 1;
    while (next < grid.size()) {
        const double target = grid[next];
        const bool clipped = t + h >= target;
        const double step = clipped ? target - t : h;

        const Vec k2 = f(t + c2 * step, y + step * (a21 * k1));
        const Vec k3 = f(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
        const Vec k4 = f(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec k5 = f(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec k6 = f(t + step,
                         y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vec y_new =
            y + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const Vec k7 = f(t + step, y_new);
        const Vec err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = error_norm(err, y, y_new);

        if (!std::isfinite(en)) {
            ++traj.stats.rejected_steps;
            h = 0.1 * step;
            if (h < control.min_step) throw fail("non-finite state");
            continue;
        }

        const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (en <= 1.0) {
            t = clipped ? target : t + step;
            y = y_new;
            k1 = k7;
            ++traj.stats.accepted_steps;
            record_step(traj.stats, step);
            traj.stats.max_local_error = std::max(traj.stats.max_local_error, en);
            if (!all_finite(y)) throw fail("non-finite state");
            if (clipped) {
                traj.samples.push_back(unpack(t, y, n));
                traj.stats.step_history.push_back(h);
                ++next;
                // Keep the controller's proposal; a clipped step says
                // nothing about the achievable step size.
                if (step >= h) h = h * factor;
            } else {
                h = step * factor;
            }
        } else {
            ++traj.stats.rejected_steps;
            h = step * std::min(1.0, factor);
        }
        if (h < control.min_step) throw fail("step size underflow (h=" + std::to_string(h) + ")");
        if (traj.stats.accepted_steps + traj.stats.rejected_steps > control.max_steps)
            throw fail("step budget exhausted");
    }
    return traj;
}

double global_energy(const ObjectiveFunction& obj, const RegularizationSchedule& reg,
                     const DynamicsState& state) {
    return 0.5 * state.v.squaredNorm() + obj.value(state.x) +
           0.5 * reg.eps(state.t) * state.x.squaredNorm();
}

EnergyReport check_energy(const Trajectory& traj, const ObjectiveFunction& obj,
                          const DampingSchedule& damping, const RegularizationSchedule& reg,
                          double rel_slack) {
    EnergyReport report;
    const auto& s = traj.samples;
    report.energy.reserve(s.size());
    for (const auto& st : s) report.energy.push_back(global_energy(obj, reg, st));

    report.worst_relative_increase = -std::numeric_limits<double>::infinity();
    const auto fmin = obj.known_min_value();
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double w0 = report.energy[k], w1 = report.energy[k + 1];
        if (fmin && std::max(w0, w1) - *fmin <= kRoundingFloor) {
            ++report.floor_pairs;
            continue;
        }
        const double scale = std::max(std::abs(w0), std::abs(w1));
        const double rel = scale > 0.0 ? (w1 - w0) / scale : 0.0;
        report.worst_relative_increase = std::max(report.worst_relative_increase, rel);
        if (w1 - w0 > rel_slack * scale) ++report.monotonicity_violations;
    }
    if (s.size() < 2 || std::isinf(report.worst_relative_increase))
        report.worst_relative_increase = 0.0;

    const bool regularized = damping.kind() == DampingSchedule::Kind::trigs;
    auto weight = [&](double t) {
        return regularized ? std::sqrt(reg.eps(t)) : damping.coefficient(t);
    };
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double g0 = weight(s[k].t) * s[k].v.squaredNorm();
        const double g1 = weight(s[k + 1].t) * s[k + 1].v.squaredNorm();
        report.dissipation_integral += 0.5 * (s[k + 1].t - s[k].t) * (g0 + g1);
    }
    if (obj.known_min_value() && !s.empty()) {
        const double drop = report.energy.front() - *obj.known_min_value();
        report.dissipation_bound = regularized ? drop / damping.parameter() : drop;
    }
    return report;
}

HeavyBallProbe heavy_ball_rate_probe(double mu, double t_start, double t_end,
                                     double damping_multiplier) {
    if (!(mu > 0.0)) throw ConfigError("mu", "mu must be positive");
    if (!(t_end > t_start)) throw ConfigError("t-end", "empty time span");
    if (!(damping_multiplier > 0.0)) throw ConfigError("damping", "damping multiplier must be positive");

    Mat a(1, 1);
    a(0, 0) = mu;
    ObjectiveFunction obj = make_strongly_convex_quadratic(a, Vec::Zero(1));
    const auto reg = RegularizationSchedule::zero(t_start);
    const auto damping = DampingSchedule::constant(damping_multiplier * 2.0 * std::sqrt(mu));

    StepControl control;
    control.rel_tol = 1e-11;
    control.abs_tol = 1e-20;
    control.samples = 401;
    control.grid = SampleGrid::linear;
    Trajectory traj = integrate(obj, damping, reg, Vec::Ones(1), Vec::Zero(1), t_start, t_end, control);

    constexpr double floor_value = 1e-14;
    std::vector<double> gap;
    gap.reserve(traj.samples.size());
    for (const auto& s : traj.samples) gap.push_back(obj.value(s.x) - 0.0);

    // Usable prefix: everything before the first value at the rounding floor.
    std::size_t usable = gap.size();
    for (std::size_t k = 0; k < gap.size(); ++k)
        if (gap[k] <= floor_value) {
            usable = k;
            break;
        }

    const double t_mid = 0.5 * (t_start + t_end);
    std::size_t lo = 0;
    while (lo < usable && traj.samples[lo].t < t_mid) ++lo;
    ExponentialRate fit;
    fit.truncated = usable < gap.size();
    if (usable < lo + 10) {
        // The floor is reached early: fall back to the last half of the
        // pre-floor span.
        if (usable < 2) throw InsufficientData("heavy-ball probe: value at rounding floor immediately");
        const double t_cut = traj.samples[usable - 1].t;
        const double mid = 0.5 * (t_start + t_cut);
        lo = 0;
        while (lo < usable && traj.samples[lo].t < mid) ++lo;
    }
    const std::size_t count = usable - lo;
    if (count < 10) throw InsufficientData("heavy-ball probe: fewer than 10 usable samples");

    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t k = lo; k < usable; ++k) {
        const double tt = traj.samples[k].t, yy = std::log(gap[k]);
        st += tt;
        sy += yy;
        stt += tt * tt;
        sty += tt * yy;
    }
    const double m = static_cast<double>(count);
    const double denom = m * stt - st * st;
    fit.rate = (m * sty - st * sy) / denom;
    fit.intercept = (sy - fit.rate * st) / m;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / m;
    for (std::size_t k = lo; k < usable; ++k) {
        const double yy = std::log(gap[k]);
        const double pred = fit.intercept + fit.rate * traj.samples[k].t;
        ss_res += (yy - pred) * (yy - pred);
        ss_tot += (yy - ybar) * (yy - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.t_lo = traj.samples[lo].t;
    fit.t_hi = traj.samples[usable - 1].t;
    fit.points_used = static_cast<int>(count);
    return {fit, obj, std::move(traj), std::move(gap)};
}

}  // namespace trigs
