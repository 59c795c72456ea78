#include "trigs/selfcheck.hpp"

#include "trigs/dynamics.hpp"
#include "trigs/tikhonov.hpp"

#include <cmath>
#include <cstdio>

namespace trigs {

namespace {

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// x'' + 2x' + x = 0, x(0) = 1, x'(0) = 0: x(t) = (1 + t) e^{-t}.
ObjectiveFunction unit_spring() {
    Mat a(1, 1);
    a(0, 0) = 1.0;
    return make_strongly_convex_quadratic(a, Vec::Zero(1));
}

double spring_error(const StepControl& control, double t_end) {
    const auto reg = RegularizationSchedule::zero(0.0);
    const Trajectory tr = integrate(unit_spring(), DampingSchedule::constant(2.0), reg,
                                    Vec::Ones(1), Vec::Zero(1), 0.0, t_end, control);
    double worst = 0.0;
    for (const auto& s : tr.samples) {
        const double x = (1.0 + s.t) * std::exp(-s.t);
        const double v = -s.t * std::exp(-s.t);
        worst = std::max({worst, std::abs(s.x[0] - x), std::abs(s.v[0] - v)});
    }
    return worst;
}

SelfCheck critically_damped(std::optional<double> rel_tol) {
    StepControl c;
    if (rel_tol) c.rel_tol = *rel_tol;
    c.samples = 11;
    c.grid = SampleGrid::linear;
    SelfCheck r{"critically-damped", false, spring_error(c, 10.0), 1e-6, {}};
    r.passed = r.measured <= r.threshold;
    r.detail = fmt("max |error| %.3g on [0, 10] (rel-tol %.3g)", r.measured, c.rel_tol);
    return r;
}

SelfCheck quadratic_viscosity() {
    const ObjectiveFunction f = make_paper_quadratic(10);
    InnerSolveOptions o;
    o.force_iterative = true;
    double worst = 0.0;
    for (double eps : {1.0, 0.1, 0.01}) {
        const ViscosityPoint p = solve_viscosity_point(f, eps, o);
        const Vec exact = Vec::Constant(f.dimension(), 1.0 / (2.0 + eps));
        worst = std::max(worst, (p.point - exact).lpNorm<Eigen::Infinity>());
    }
    SelfCheck r{"quadratic-viscosity", false, worst, 1e-8, {}};
    r.passed = worst <= r.threshold;
    r.detail = fmt("max |x_eps - 1/(2+eps)| %.3g over eps in {1, 0.1, 0.01} (dim %g)", worst,
                   f.dimension());
    return r;
}

SelfCheck huber_envelope() {
    const ObjectiveFunction f = make_abs_value();
    constexpr double theta = 0.7;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = -4.0 + 8.0 * i / 99.0;
        const double huber = std::abs(x) <= theta ? x * x / (2.0 * theta) : std::abs(x) - theta / 2.0;
        const MoreauEvaluation m = moreau(f, theta, Vec::Constant(1, x));
        worst = std::max(worst, std::abs(m.envelope_value - huber));
    }
    SelfCheck r{"huber-envelope", false, worst, 1e-12, {}};
    r.passed = worst <= r.threshold;
    r.detail = fmt("max |f_theta - huber| %.3g at 100 points, theta %.3g", worst, theta);
    return r;
}

SelfCheck integrator_order() {
    double errs[3];
    const double hs[3] = {0.1, 0.05, 0.025};
    for (int i = 0; i < 3; ++i) {
        StepControl c;
        c.fixed_step = hs[i];
        c.samples = 2;
        c.grid = SampleGrid::linear;
        errs[i] = spring_error(c, 5.0);
    }
    const double order = std::min(std::log2(errs[0] / errs[1]), std::log2(errs[1] / errs[2]));
    SelfCheck r{"integrator-order", false, order, 3.7, {}};
    r.passed = std::isfinite(order) && order >= r.threshold;
    r.detail = fmt("fixed-step order %.3f (error at h = 0.025: %.3g)", order, errs[2]);
    return r;
}

}  // namespace

std::vector<std::string> self_check_names() {
    return {"critically-damped", "quadratic-viscosity", "huber-envelope", "integrator-order"};
}

std::vector<SelfCheck> run_self_checks(std::optional<double> rel_tol) {
    std::vector<SelfCheck> out;
    auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back(SelfCheck{name, false, 0.0, 0.0, e.what()});
        }
    };
    guarded("critically-damped", [&] { return critically_damped(rel_tol); });
    guarded("quadratic-viscosity", quadratic_viscosity);
    guarded("huber-envelope", huber_envelope);
    guarded("integrator-order", integrator_order);
    return out;
}

}  // namespace trigs
