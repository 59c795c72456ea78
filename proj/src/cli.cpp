#include "trigs/cli.hpp"

#include "trigs/config.hpp"
#include "trigs/harness.hpp"
#include "trigs/lyapunov.hpp"
#include "trigs/report.hpp"
#include "trigs/selfcheck.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace trigs::cli {

namespace {

// Values of config-key flags given on the command line, by key.
using Overrides = std::map<std::string, std::string>;

void add_config_flags(CLI::App* app, Overrides& store, std::string& config_path) {
    app->add_option("--config", config_path, "flat key = value config file");
    for (const auto& key : config_keys()) app->add_option("--" + key, store[key]);
}

ExperimentConfig resolve(const CLI::App* app, const Overrides& store,
                         const std::string& config_path) {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& key : config_keys())
        if (app->count("--" + key) > 0) apply_setting(cfg, key, store.at(key));
    return cfg;
}

std::string default_run_dir(const char* prefix) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", std::localtime(&now));
    return std::string(prefix) + "-" + buf;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    ExperimentConfig scratch;
    apply_setting(scratch, "x0", text);
    if (scratch.x0.empty()) throw ConfigError(key, key + " needs at least one value");
    return scratch.x0;
}

int cmd_run(const ExperimentConfig& cfg, std::string out_dir, std::ostream& out) {
    cfg.validate();
    if (out_dir.empty()) out_dir = default_run_dir("run");
    const auto t_start = std::chrono::steady_clock::now();
    const RunResult r = run_experiment(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    if (r.trajectory)
        out << "[integrate] " << r.trajectory->samples.size() << " samples, "
            << r.trajectory->stats.accepted_steps << " steps\n";
    out << "[viscosity] " << r.viscosity.size() << " points\n";
    out << "[lyapunov] decay condition "
        << (r.h1.satisfied ? "holds from t1 = " + format_double(r.h1.t1) : "fails: " + r.h1.reason)
        << '\n';
    for (const auto& e : r.rates)
        out << "[rates] " << e.quantity << " slope " << e.slope << '\n';
    for (const auto& note : r.rate_notes) out << "[rates] " << note << '\n';
    for (const auto& s : r.suites)
        out << "[suite] " << s.name << ": "
            << (!s.applicable ? "n/a (" + s.detail + ")" : s.passed ? "pass" : "FAIL") << " ("
            << s.violations << "/" << s.checked << " violations)\n";
    if (r.failure) out << "[error] " << r.failure->stage << ": " << r.failure->message << '\n';
    write_run_outputs(out_dir, r);
    out << "[done] " << secs << " s, outputs in " << out_dir << '\n';
    return r.all_inequalities_pass() ? kOk : kCheckFailed;
}

int cmd_sweep(const ExperimentConfig& base, const std::string& ps_text, std::string out_dir,
              std::ostream& out) {
    const std::vector<double> ps = parse_list("ps", ps_text);
    for (double p : ps)
        if (!(p > 0.0 && p < 2.0)) throw ConfigError("ps", "sweep values must lie in (0, 2)");
    base.validate();
    if (out_dir.empty()) out_dir = default_run_dir("sweep");
    const auto rows = tradeoff_sweep(ps, base);
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(std::filesystem::path(out_dir) / "tradeoff.csv");
    write_tradeoff_csv(csv, rows);
    bool ok = true;
    for (const auto& row : rows) {
        out << "p = " << row.p << ": value slope "
            << (row.value_slope ? format_double(*row.value_slope) : "n/a") << " (target "
            << -row.value_target << "), trajectory slope "
            << (row.trajectory_slope ? format_double(*row.trajectory_slope) : "n/a")
            << " (target " << -row.trajectory_target << ")"
            << (row.error.empty() ? "" : ", error: " + row.error) << '\n';
        ok = ok && row.error.empty() && row.inequalities_pass;
    }
    out << "[done] " << (std::filesystem::path(out_dir) / "tradeoff.csv").string() << '\n';
    return ok ? kOk : kCheckFailed;
}

int cmd_check_params(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(cfg.delta > 0.0)) throw ConfigError("delta", "delta must be positive");
    const auto iv = admissible_lambda_interval(cfg.delta, cfg.a, cfg.c);
    out << "delta = " << cfg.delta << ", a = " << cfg.a << ", c = " << cfg.c << '\n';
    if (!iv) {
        err << "admissible lambda interval is empty\n";
        return kCheckFailed;
    }
    out << "admissible lambda interval: (" << format_double(iv->lower) << ", "
        << format_double(iv->upper) << ")\n";
    LyapunovParams lp;
    try {
        lp = cfg.lyapunov_params();
    } catch (const ConfigError& e) {
        if (cfg.lambda && *cfg.lambda <= cfg.delta / 2.0)
            err << "λ must exceed δ/2 (λ = " << *cfg.lambda << ", δ = " << cfg.delta << ")\n";
        else
            err << e.what() << '\n';
        return kCheckFailed;
    }
    out << "lambda = " << format_double(lp.lambda) << '\n';
    out << "decay threshold min(2 lambda - delta, delta - (a+1) lambda / a) = "
        << format_double(lp.decay_threshold()) << '\n';
    const auto reg = cfg.schedule();
    const DecayCheck h1 = check_H1(reg, lp, 1e12);
    out << "schedule: " << reg.describe() << '\n';
    if (!h1.satisfied) {
        err << "decay condition fails: " << h1.reason << '\n';
        return kCheckFailed;
    }
    out << "t1 = " << format_double(h1.t1) << '\n';
    return kOk;
}

int cmd_viscosity(const ExperimentConfig& cfg, const std::string& eps_text,
                  const std::string& out_path, bool coordinates, std::ostream& out) {
    const ObjectiveFunction f = make_problem(cfg.problem);
    const std::vector<double> eps = parse_list("eps", eps_text);
    InnerSolveOptions o;
    o.tol = cfg.viscosity_tol;
    const auto points = viscosity_curve(f, eps, o);
    if (out_path.empty()) {
        write_viscosity_csv(out, points, f.known_min_norm_solution(), coordinates);
    } else {
        std::ofstream file(out_path);
        if (!file) throw ConfigError("out", "cannot write '" + out_path + "'");
        write_viscosity_csv(file, points, f.known_min_norm_solution(), coordinates);
    }
    return kOk;
}

int cmd_moreau(const ExperimentConfig& cfg, const std::string& points_text, std::ostream& out) {
    const ObjectiveFunction f = make_problem(cfg.problem);
    const std::vector<double> raw = parse_list("x", points_text);
    std::vector<Vec> points;
    if (f.dimension() == 1) {
        for (double v : raw) points.push_back(Vec::Constant(1, v));
    } else if (raw.size() == 1) {
        points.push_back(Vec::Constant(f.dimension(), raw.front()));
    } else if (static_cast<int>(raw.size()) == f.dimension()) {
        points.push_back(Eigen::Map<const Vec>(raw.data(), f.dimension()));
    } else {
        throw ConfigError("x", "x needs 1 or " + std::to_string(f.dimension()) + " entries");
    }
    out << "x,theta,envelope,prox,gradient\n";
    for (const auto& x : points) {
        const MoreauEvaluation m = moreau(f, cfg.theta, x);
        auto vec = [](const Vec& v) {
            std::string s;
            for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
            return s;
        };
        out << vec(x) << ',' << format_double(cfg.theta) << ',' << format_double(m.envelope_value)
            << ',' << vec(m.prox_point) << ',' << vec(m.envelope_gradient) << '\n';
    }
    return kOk;
}

int cmd_validate(bool list, std::optional<double> rel_tol, std::ostream& out) {
    if (list) {
        for (const auto& n : self_check_names()) out << n << '\n';
        return kOk;
    }
    if (rel_tol && !(*rel_tol > 0.0)) throw ConfigError("rel-tol", "rel-tol must be positive");
    bool ok = true;
    for (const auto& c : run_self_checks(rel_tol)) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
    }
    return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tikhonov-regularized inertial gradient dynamics: experiments and checks", "trigs"};
    app.require_subcommand(1);

    Overrides run_flags, sweep_flags, params_flags, visc_flags, moreau_flags;
    std::string run_cfg, sweep_cfg, params_cfg, visc_cfg, moreau_cfg;
    std::string run_out, sweep_out, visc_out;
    std::string sweep_ps = "0.3333333333333333,0.5,0.6666666666666666,0.9";
    std::string visc_eps = "1,0.1,0.01";
    std::string moreau_x = "-2,-0.5,0,0.5,2";
    bool visc_coords = false, validate_list = false;
    std::optional<double> validate_rel_tol;

    auto* run = app.add_subcommand("run", "integrate one configuration and check every inequality");
    add_config_flags(run, run_flags, run_cfg);
    run->add_option("--out", run_out, "output directory (default: timestamped)");

    auto* sweep = app.add_subcommand("sweep", "rate trade-off across several p");
    add_config_flags(sweep, sweep_flags, sweep_cfg);
    sweep->add_option("--ps", sweep_ps, "comma-separated p values in (0, 2)");
    sweep->add_option("--out", sweep_out, "output directory (default: timestamped)");

    auto* params = app.add_subcommand("check-params", "admissible lambda interval and t1");
    add_config_flags(params, params_flags, params_cfg);

    auto* visc = app.add_subcommand("viscosity-curve", "solve x_eps for a list of eps");
    add_config_flags(visc, visc_flags, visc_cfg);
    visc->add_option("--eps", visc_eps, "comma-separated positive eps values");
    visc->add_option("--out", visc_out, "CSV file (default: stdout)");
    visc->add_flag("--coordinates", visc_coords, "include x_eps coordinates");

    auto* mor = app.add_subcommand("moreau", "Moreau envelope, prox and envelope gradient");
    add_config_flags(mor, moreau_flags, moreau_cfg);
    mor->add_option("--x", moreau_x, "evaluation points (1-dim problems) or one point");

    auto* val = app.add_subcommand("validate", "closed-form oracle self-checks");
    val->add_flag("--list", validate_list, "print check names without running");
    val->add_option("--rel-tol", validate_rel_tol, "integrator tolerance for the oscillator check");

    std::vector<std::string> argv_store = {"trigs"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(resolve(run, run_flags, run_cfg), run_out, out);
        if (*sweep) return cmd_sweep(resolve(sweep, sweep_flags, sweep_cfg), sweep_ps, sweep_out, out);
        if (*params) return cmd_check_params(resolve(params, params_flags, params_cfg), out, err);
        if (*visc)
            return cmd_viscosity(resolve(visc, visc_flags, visc_cfg), visc_eps, visc_out,
                                 visc_coords, out);
        if (*mor) return cmd_moreau(resolve(mor, moreau_flags, moreau_cfg), moreau_x, out);
        if (*val) return cmd_validate(validate_list, validate_rel_tol, out);
    } catch (const ConfigError& e) {
        err << "configuration error (" << e.key() << "): " << e.what() << '\n';
        return kConfigError;
    } catch (const ViscosityCurveError& e) {
        err << "configuration error (eps): " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kConfigError;
}

}  // namespace trigs::cli
