// One line per acceptance criterion. Expected values come from closed forms
// computed here, not from the library's own diagnostics.
#include "trigs/harness.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace trigs;

namespace {

constexpr double kP = 2.0 / 3.0;
constexpr double kDelta = 1.0;
constexpr double kLambda = 0.6;
constexpr double kA = 2.0;
constexpr double kC = 10.0;
constexpr double kXstarSq = 5.0;

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Closed forms for the 20-dimensional pair quadratic with eps = 1/t^p.
double eps_of(double t, double p) { return std::pow(t, -p); }
double eps_dot_of(double t, double p) { return -p * std::pow(t, -p - 1); }
double pair_value(const Vec& x) {
    double acc = 0;
    for (Eigen::Index i = 0; i < x.size(); i += 2) acc += 0.5 * std::pow(x[i] + x[i + 1] - 1, 2);
    return acc;
}
double viscosity_coord(double eps) { return 1.0 / (2.0 + eps); }

double energy_oracle(const DynamicsState& s, double p) {
    const double eps = eps_of(s.t, p);
    const Vec xe = Vec::Constant(s.x.size(), viscosity_coord(eps));
    const Vec d = s.x - xe;
    // phi(x) - phi(x_eps) expanded around x_eps, which avoids cancellation late in the run.
    double gap = 0.5 * eps * d.squaredNorm();
    for (Eigen::Index i = 0; i < d.size(); i += 2) gap += 0.5 * std::pow(d[i] + d[i + 1], 2);
    const Vec v = kLambda * std::sqrt(eps) * d + s.v;
    return gap + 0.5 * v.squaredNorm();
}

// log gamma(t) - log gamma(t1) from mu = p/(2t) + (delta - lambda) t^{-p/2}.
double log_gamma_oracle(double t1, double t, double p) {
    auto F = [p](double s) { return 0.5 * p * std::log(s) + (kDelta - kLambda) * std::pow(s, 1 - p / 2) / (1 - p / 2); };
    return F(t) - F(t1);
}

double forcing_oracle(double t, double p) {
    const double e = eps_of(t, p), ed = eps_dot_of(t, p);
    return (kLambda * kC + kA) * kLambda * ed * ed / std::pow(e, 1.5) - ed;
}

struct Fit {
    double slope = NAN;
    int used = 0;
};

// Least squares on (log t, log v) over [lo, hi], values <= 1e-14 dropped.
Fit loglog_fit(const std::vector<double>& t, const std::vector<double>& v, double lo, double hi) {
    std::vector<double> X, Y;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] >= lo && t[k] <= hi && v[k] > 1e-14) {
            X.push_back(std::log(t[k]));
            Y.push_back(std::log(v[k]));
        }
    Fit f;
    f.used = static_cast<int>(X.size());
    if (X.size() < 10) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < X.size(); ++i) mx += X[i], my += Y[i];
    mx /= X.size();
    my /= X.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < X.size(); ++i) sxx += (X[i] - mx) * (X[i] - mx), sxy += (X[i] - mx) * (Y[i] - my);
    f.slope = sxy / sxx;
    return f;
}

struct Scaled {
    double ratio = NAN;  // sup / reference
    bool floor_limited = false;
};

// sup_{[lo,hi]} v t^k against v t^k at the first sample >= lo; floor values count as 0.
Scaled scaled_sup(const std::vector<double>& t, const std::vector<double>& v, double k, double lo, double hi) {
    Scaled s;
    std::size_t first = 0;
    while (first < t.size() && t[first] < lo) ++first;
    const double ref = std::max(v[first], 1e-14) * std::pow(t[first], k);
    s.floor_limited = v[first] <= 1e-14;
    double sup = 0;
    for (std::size_t j = first; j < t.size() && t[j] <= hi; ++j)
        if (v[j] > 1e-14) sup = std::max(sup, v[j] * std::pow(t[j], k));
    s.ratio = sup / ref;
    return s;
}

struct EnergyAudit {
    int pairs = 0;
    int violations = 0;
    double dissipation = 0;
    double bound = INFINITY;
};

// W nonincreasing (1e-9 relative; pairs with W - min f <= 1e-14 at both ends are rounding noise)
// and the trapezoidal integral of weight(t)|x'|^2.
EnergyAudit audit_energy(const Trajectory& tr, const std::function<double(const Vec&)>& f,
                         const std::function<double(double)>& eps, const std::function<double(double)>& weight,
                         double delta) {
    EnergyAudit a;
    std::vector<double> W;
    for (const auto& s : tr.samples) W.push_back(0.5 * s.v.squaredNorm() + f(s.x) + 0.5 * eps(s.t) * s.x.squaredNorm());
    for (std::size_t k = 0; k + 1 < W.size(); ++k) {
        if (std::max(W[k], W[k + 1]) <= 1e-14) continue;
        ++a.pairs;
        if (W[k + 1] - W[k] > 1e-9 * std::max(std::abs(W[k]), std::abs(W[k + 1]))) ++a.violations;
        const auto& s0 = tr.samples[k];
        const auto& s1 = tr.samples[k + 1];
        a.dissipation += 0.5 * (s1.t - s0.t) * (weight(s0.t) * s0.v.squaredNorm() + weight(s1.t) * s1.v.squaredNorm());
    }
    a.bound = W.front() / delta;
    return a;
}

ExperimentConfig paper_config(double p = kP) {
    ExperimentConfig c;
    c.problem = "paper-quadratic-20";
    c.p = p;
    c.delta = kDelta;
    c.lambda = kLambda;
    c.a = kA;
    c.c = kC;
    c.t0 = 1.0;
    c.t_end = 1e4;
    return c;
}

}  // namespace

int main() {
    const auto t_all = std::chrono::steady_clock::now();

    // Shared run for criteria 1-4 and 7.
    auto t_run = std::chrono::steady_clock::now();
    const RunResult run = run_experiment(paper_config());
    const double run_secs = seconds_since(t_run);
    if (run.failure) {
        std::printf("paper run failed in %s: %s\n", run.failure->stage.c_str(), run.failure->message.c_str());
        return 1;
    }
    const auto& samples = run.trajectory->samples;
    std::vector<double> ts, gap, dist, energy;
    for (const auto& s : samples) {
        const double eps = eps_of(s.t, kP);
        ts.push_back(s.t);
        gap.push_back(pair_value(s.x));
        dist.push_back((s.x - Vec::Constant(20, viscosity_coord(eps))).squaredNorm());
        energy.push_back(energy_oracle(s, kP));
    }
    const double t1_exact = std::pow(10.0 / 3.0, 1.5);

    // 1. Lemma inequalities.
    {
        int bad = 0;
        double worst_energy = 0;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double eps = eps_of(ts[k], kP);
            if (gap[k] > energy[k] + 0.5 * eps * kXstarSq + 1e-8) ++bad;
            if (dist[k] > 2 * energy[k] / eps + 1e-8) ++bad;
            worst_energy = std::max(worst_energy, std::abs(energy[k] - run.lyapunov[k].E) / std::max(1e-12, energy[k]));
        }
        report(1, bad == 0 && worst_energy < 1e-6,
               fmt("%d violations over %zu samples; library E vs oracle rel diff %.2e (%.2f s run)", bad,
                   samples.size(), worst_energy, run_secs));
    }

    // 2. Integrated energy bound from t1.
    {
        std::size_t anchor = 0;
        while (ts[anchor] < t1_exact) ++anchor;
        int bad = 0, checked = 0;
        double worst_oracle = 0;
        double log_int = -INFINITY;  // log of int_{t_a}^t forcing gamma, gamma(t1) = 1
        for (std::size_t k = anchor; k < ts.size(); ++k) {
            if (k > anchor) {
                // Fine trapezoid in log space on each sample interval.
                const int m = 256;
                for (int i = 0; i < m; ++i) {
                    const double a = ts[k - 1] + (ts[k] - ts[k - 1]) * i / m;
                    const double b = ts[k - 1] + (ts[k] - ts[k - 1]) * (i + 1) / m;
                    const double la = std::log(forcing_oracle(a, kP)) + log_gamma_oracle(t1_exact, a, kP);
                    const double lb = std::log(forcing_oracle(b, kP)) + log_gamma_oracle(t1_exact, b, kP);
                    const double hi = std::max(la, lb);
                    const double piece = hi + std::log(0.5 * (b - a) * (std::exp(la - hi) + std::exp(lb - hi)));
                    const double top = std::max(log_int, piece);
                    log_int = top + std::log(std::exp(log_int - top) + std::exp(piece - top));
                }
            }
            const double lg = log_gamma_oracle(t1_exact, ts[k], kP);
            const double lg_a = log_gamma_oracle(t1_exact, ts[anchor], kP);
            const double first = std::log(energy[anchor]) + lg_a - lg;
            const double second = std::log(0.5 * kXstarSq) + log_int - lg;
            const double top = std::max(first, second);
            const double oracle = std::exp(top) * (std::exp(first - top) + std::exp(second - top));
            const double lib = run.bound[k].bound;
            ++checked;
            if (!(energy[k] <= lib + std::max(1e-8, 1e-6 * lib))) ++bad;
            worst_oracle = std::max(worst_oracle, std::abs(lib - oracle) / oracle);
        }
        report(2, run.h1.satisfied && std::abs(run.h1.t1 - t1_exact) < 1e-9 && bad == 0 && worst_oracle < 1e-4,
               fmt("t1 = %.6f; %d/%d samples violate E <= bound; library bound vs oracle rel diff %.2e",
                   run.h1.t1, bad, checked, worst_oracle));
    }

    // 3. Sign terms.
    {
        int bad = 0, checked = 0;
        for (double t : ts) {
            if (t < t1_exact) continue;
            const double e = eps_of(t, kP), ed = eps_dot_of(t, kP), e32 = std::pow(e, 1.5);
            const double A = -ed + 2 * (kDelta - 2 * kLambda) * e32;
            const double B = 2 * ((1 + 1 / kA) * kLambda - kDelta) * e32 - ed;
            const double C = kLambda * ed + 2 * ((kDelta + 1 / kC) * kLambda - kLambda * kLambda - 1) * e32;
            const double tol = 1e-12 * e32;
            ++checked;
            if (A > tol || B > tol || C > tol) ++bad;
        }
        const auto* suite = run.suite("sign_terms");
        report(3, bad == 0 && suite && suite->passed, fmt("%d/%d samples with a positive term", bad, checked));
    }

    // 4. Scaling and slopes over the tail.
    {
        const auto sg = scaled_sup(ts, gap, kP, 1e3, 1e4);
        const auto sd = scaled_sup(ts, dist, (2 - kP) / 2, 1e3, 1e4);
        const auto se = scaled_sup(ts, energy, (kP + 2) / 2, 1e3, 1e4);
        const auto fg = loglog_fit(ts, gap, 1e2, 1e4);
        const auto fd = loglog_fit(ts, dist, 1e2, 1e4);
        const bool bounded = sg.ratio <= 10 && sd.ratio <= 10 && se.ratio <= 10;
        const bool value_band = std::abs(fg.slope + kP) <= 0.2;
        const bool traj_band = std::abs(fd.slope + (2 - kP) / 2) <= 0.25;
        report(4, bounded && value_band && traj_band,
               fmt("sup ratios value %.3f, trajectory %.3f%s, energy %.3f (<= 10: %s); slopes value %.3f "
                   "(band -0.667 +/- 0.2: %s), trajectory %.3f over %d pts (band -0.667 +/- 0.25: %s)",
                   sg.ratio, sd.ratio, sd.floor_limited ? " [floor]" : "", se.ratio, bounded ? "yes" : "no",
                   fg.slope, value_band ? "yes" : "no", fd.slope, fd.used, traj_band ? "yes" : "no"));
    }

    // 5 and 7 share the sweep.
    const std::vector<double> ps = {1.0 / 3.0, 0.5, 2.0 / 3.0, 0.9};
    t_run = std::chrono::steady_clock::now();
    const auto rows = tradeoff_sweep(ps, paper_config());
    const double sweep_secs = seconds_since(t_run);
    {
        std::vector<double> vmag, tmag;
        bool complete = true;
        for (const auto& r : rows) {
            complete = complete && r.error.empty() && r.value_slope && r.trajectory_slope;
            vmag.push_back(r.value_slope ? -*r.value_slope : NAN);
            tmag.push_back(r.trajectory_slope ? -*r.trajectory_slope : NAN);
        }
        bool v_inc = complete, t_dec = complete;
        for (std::size_t i = 1; i < ps.size(); ++i) {
            v_inc = v_inc && vmag[i] > vmag[i - 1];
            t_dec = t_dec && tmag[i] < tmag[i - 1];
        }
        report(5, v_inc && t_dec,
               fmt("value |slope| %.3f %.3f %.3f %.3f (increasing: %s); trajectory |slope| %.3f %.3f %.3f %.3f "
                   "(decreasing: %s); %.2f s",
                   vmag[0], vmag[1], vmag[2], vmag[3], v_inc ? "yes" : "no", tmag[0], tmag[1], tmag[2], tmag[3],
                   t_dec ? "yes" : "no", sweep_secs));
    }

    // 6. Heavy-ball baseline.
    std::vector<HeavyBallProbe> probes;
    {
        t_run = std::chrono::steady_clock::now();
        bool ok = true;
        std::string detail;
        for (double mu : {1.0, 4.0}) {
            probes.push_back(heavy_ball_rate_probe(mu, 0.0, 20.0));
            const double rate = probes.back().fit.rate;
            ok = ok && rate <= -0.9 * std::sqrt(mu);
            detail += fmt("mu=%g rate %.3f (<= %.2f) ", mu, rate, -0.9 * std::sqrt(mu));
        }
        const double secs = seconds_since(t_run);
        report(6, ok && secs < 5.0, detail + fmt("in %.3f s", secs));
    }

    // 7. Global energy on every run above.
    {
        int violations = 0, pairs = 0;
        bool dissipation_ok = true;
        std::string worst;
        auto trigs_audit = [&](const Trajectory& tr, double p) {
            const auto a = audit_energy(tr, pair_value, [p](double t) { return eps_of(t, p); },
                                        [p](double t) { return std::sqrt(eps_of(t, p)); }, kDelta);
            violations += a.violations;
            pairs += a.pairs;
            const bool ok = std::isfinite(a.dissipation) && a.dissipation <= a.bound + 1e-6;
            dissipation_ok = dissipation_ok && ok;
            worst += fmt("p=%.3f %.4f<=%.4f ", p, a.dissipation, a.bound);
        };
        trigs_audit(*run.trajectory, kP);
        for (double p : ps) {
            const RunResult r = run_experiment(paper_config(p));
            trigs_audit(*r.trajectory, p);
        }
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const double mu = i == 0 ? 1.0 : 4.0;
            const auto a = audit_energy(probes[i].trajectory, [mu](const Vec& x) { return 0.5 * mu * x.squaredNorm(); },
                                        [](double) { return 0.0; }, [mu](double) { return 2 * std::sqrt(mu); }, 1.0);
            violations += a.violations;
            pairs += a.pairs;
        }
        report(7, violations == 0 && dissipation_ok,
               fmt("%d/%d W increases; dissipation %s", violations, pairs, worst.c_str()));
    }

    // 8. Viscosity oracle.
    {
        const auto f = make_paper_quadratic(10);
        InnerSolveOptions it;
        it.force_iterative = true;
        double worst = 0;
        for (double eps : {1.0, 0.1, 0.01}) {
            const auto vp = solve_viscosity_point(f, eps, it);
            worst = std::max(worst, (vp.point - Vec::Constant(20, viscosity_coord(eps))).norm());
        }
        double max_norm = 0;
        for (const auto& vp : run.viscosity) max_norm = std::max(max_norm, vp.point.norm());
        report(8, worst <= 1e-8 && max_norm <= std::sqrt(5.0),
               fmt("iterative vs closed form %.2e; max |x_eps| along the run %.6f (sqrt 5 = %.6f)", worst, max_norm,
                   std::sqrt(5.0)));
    }

    // 9. Moreau oracle and nonsmooth scaling.
    {
        const auto absf = make_abs_value();
        double worst_env = 0, worst_fd = 0;
        for (int i = 0; i < 100; ++i) {
            const double x = -5.0 + 10.0 * (i + 0.5) / 100.0;
            const double theta = 1.0;
            const double huber = std::abs(x) <= theta ? x * x / (2 * theta) : std::abs(x) - theta / 2;
            worst_env = std::max(worst_env, std::abs(moreau(absf, theta, Vec::Constant(1, x)).envelope_value - huber));
        }
        const auto env = moreau_objective(absf, 1.0);
        for (int i = 0; i < 100; ++i) {
            const double x = -5.0 + 10.0 * (i + 0.37) / 100.0;
            const double h = 1e-5;
            const double fd = (env.value(Vec::Constant(1, x + h)) - env.value(Vec::Constant(1, x - h))) / (2 * h);
            const double g = env.gradient(Vec::Constant(1, x))[0];
            worst_fd = std::max(worst_fd, std::abs(fd - g) / std::max(1.0, std::abs(g)));
        }
        ExperimentConfig c = paper_config();
        c.problem = "abs";
        c.x0 = {3.0};
        c.lambda.reset();
        const RunResult ns = nonsmooth_experiment(c, 1.0);
        std::vector<double> t9, pv, pr;
        for (const auto& s : ns.trajectory->samples) {
            const double x = s.x[0];
            const double prox = std::copysign(std::max(std::abs(x) - 1.0, 0.0), x);
            t9.push_back(s.t);
            pv.push_back(std::abs(prox));
            pr.push_back((x - prox) * (x - prox));
        }
        const auto sv = scaled_sup(t9, pv, kP, 1e3, 1e4);
        const auto sr = scaled_sup(t9, pr, kP, 1e3, 1e4);
        const bool scaling = sv.ratio <= 10 && sr.ratio <= 10 && !ns.failure;
        report(9, worst_env <= 1e-12 && worst_fd <= 1e-5 && scaling,
               fmt("Huber max diff %.2e; envelope gradient vs FD %.2e; prox gap sup ratio %.3f%s, residual sup "
                   "ratio %.3f%s",
                   worst_env, worst_fd, sv.ratio, sv.floor_limited ? " [floor]" : "", sr.ratio,
                   sr.floor_limited ? " [floor]" : ""));
    }

    // 10. Fixed-step order on the critically damped oscillator.
    {
        Mat one(1, 1);
        one(0, 0) = 1.0;
        const auto f = make_strongly_convex_quadratic(one, Vec::Zero(1));
        double err[3];
        const double hs[3] = {0.1, 0.05, 0.025};
        for (int i = 0; i < 3; ++i) {
            StepControl ctl;
            ctl.fixed_step = hs[i];
            ctl.samples = 2;
            ctl.grid = SampleGrid::linear;
            const auto tr = integrate(f, DampingSchedule::constant(2.0), RegularizationSchedule::zero(), Vec::Ones(1),
                                      Vec::Zero(1), 0.0, 5.0, ctl);
            err[i] = std::abs(tr.samples.back().x[0] - 6.0 * std::exp(-5.0));
        }
        const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
        report(10, o1 >= 3.7 && o2 >= 3.7, fmt("measured orders %.3f, %.3f", o1, o2));
    }

    // 11. Parameter logic.
    {
        const auto i1 = admissible_lambda_interval(1, 2, 10);
        const auto i2 = admissible_lambda_interval(3, 100, 100);
        const auto i3 = admissible_lambda_interval(3, 1.01, 100);
        const bool r1 = i1 && std::abs(i1->lower - 0.5) < 1e-15 && std::abs(i1->upper - 2.0 / 3.0) < 1e-15;
        const bool r2 = i2 && i2->lower < i2->upper;
        const bool r3 = !i3;
        const LyapunovParams lp{kDelta, kLambda, kA, kC};
        const auto h = check_H1(RegularizationSchedule::power_law(1.0, kP), lp, 1e4);
        const bool r4 = h.satisfied && std::abs(h.t1 - t1_exact) <= 1e-6;
        const bool r5 = !check_H1(RegularizationSchedule::power_law(1.0, 2.0), lp, 1e12).satisfied;
        report(11, r1 && r2 && r3 && r4 && r5,
               fmt("(0.5, 2/3): %s; delta=3 a=c=100 nonempty: %s; a=1.01 empty: %s; t1 = %.9f vs %.9f; 1/t^2 fails: %s",
                   r1 ? "yes" : "no", r2 ? "yes" : "no", r3 ? "yes" : "no", h.t1, t1_exact, r5 ? "yes" : "no"));
    }

    std::printf("%d of 11 criteria failed (%.2f s)\n", failures, seconds_since(t_all));
    return failures == 0 ? 0 : 1;
}
