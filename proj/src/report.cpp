#include "trigs/report.hpp"

#include "trigs/config.hpp"

#include <cmath>
#include <fstream>

namespace trigs {

namespace {

using nlohmann::json;

// NaN and infinities have no JSON literal.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

std::ofstream open_file(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const Eigen::Index n = traj.samples.empty() ? 0 : traj.samples.front().x.size();
    out << "t";
    for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
    for (Eigen::Index i = 1; i <= n; ++i) out << ",v" << i;
    out << '\n';
    for (const auto& s : traj.samples) {
        out << format_double(s.t);
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(s.x[i]);
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(s.v[i]);
        out << '\n';
    }
}

void write_diagnostics_csv(std::ostream& out, const std::vector<LyapunovSample>& samples) {
    out << "t,E,W,phi_gap,mu,log_gamma,A,B,C,bound_rhs,keybb_slack,est_basic1_slack\n";
    for (const auto& s : samples) {
        for (double v : {s.t, s.E, s.W, s.phi_gap, s.mu, s.log_gamma, s.A, s.B, s.C})
            out << format_double(v) << ',';
        out << format_double(s.bound_rhs) << ',' << format_double(s.keybb_slack) << ','
            << format_double(s.est_basic1_slack) << '\n';
    }
}

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows) {
    out << "p,value_target,trajectory_target,value_slope,trajectory_slope,value_bounded,"
           "trajectory_bounded,inequalities_pass,error\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& r : rows) {
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
        out << format_double(r.p) << ',' << format_double(r.value_target) << ','
            << format_double(r.trajectory_target) << ',' << opt(r.value_slope) << ','
            << opt(r.trajectory_slope) << ',' << r.value_bounded << ',' << r.trajectory_bounded
            << ',' << r.inequalities_pass << ',' << err << '\n';
    }
}

json rates_json(const RunResult& r) {
    json rates = json::array();
    for (const auto& e : r.rates) {
        rates.push_back({{"quantity", e.quantity},
                         {"t_lo", number(e.t_lo)},
                         {"t_hi", number(e.t_hi)},
                         {"slope", number(e.slope)},
                         {"intercept", number(e.intercept)},
                         {"r_squared", number(e.r_squared)},
                         {"target_exponent", optional_number(e.target_exponent)},
                         {"sup_scaled", optional_number(e.sup_scaled)},
                         {"points_used", e.points_used},
                         {"points_excluded", e.points_excluded}});
    }
    json scaling = json::array();
    for (const auto& c : r.scaling) {
        scaling.push_back({{"quantity", c.quantity},
                           {"exponent", number(c.exponent)},
                           {"t_lo", number(c.t_lo)},
                           {"t_hi", number(c.t_hi)},
                           {"reference", number(c.reference)},
                           {"sup", number(c.sup)},
                           {"factor", number(c.factor)},
                           {"floor_limited", c.floor_limited},
                           {"passed", c.passed}});
    }
    json slopes = json::array();
    for (const auto& b : r.slopes) {
        slopes.push_back({{"quantity", b.quantity},
                          {"target_slope", number(b.target_slope)},
                          {"half_width", number(b.half_width)},
                          {"fitted", optional_number(b.fitted)},
                          {"within", b.within}});
    }
    return {{"rates", rates},
            {"scaling", scaling},
            {"slope_bands", slopes},
            {"notes", r.rate_notes},
            {"trajectory_exploratory", r.exploratory_trajectory}};
}

json summary_json(const RunResult& r) {
    json config = json::object();
    for (const auto& [k, v] : config_entries(r.config)) config[k] = v;
    json suites = json::array();
    for (const auto& s : r.suites) {
        suites.push_back({{"name", s.name},
                          {"applicable", s.applicable},
                          {"passed", s.passed},
                          {"checked", s.checked},
                          {"violations", s.violations},
                          {"worst_margin", number(s.worst_margin)},
                          {"detail", s.detail}});
    }
    json out = {{"config", config},
                {"objective", r.objective_name},
                {"params",
                 {{"delta", r.params.delta},
                  {"lambda", r.params.lambda},
                  {"a", r.params.a},
                  {"c", r.params.c}}},
                {"decay_condition",
                 {{"satisfied", r.h1.satisfied},
                  {"t1", number(r.h1.t1)},
                  {"threshold", number(r.h1.threshold)},
                  {"reason", r.h1.reason}}},
                {"suites", suites},
                {"all_pass", r.all_inequalities_pass()}};
    if (r.trajectory) {
        const auto& st = r.trajectory->stats;
        out["integrator"] = {{"accepted_steps", st.accepted_steps},
                             {"rejected_steps", st.rejected_steps},
                             {"rhs_evaluations", st.rhs_evaluations}};
    }
    if (r.failure) out["failure"] = {{"stage", r.failure->stage}, {"message", r.failure->message}};
    return out;
}

void write_run_outputs(const std::filesystem::path& dir, const RunResult& r) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_file(dir / "trajectory.csv");
        write_trajectory_csv(out, r.trajectory ? *r.trajectory : Trajectory{});
    }
    {
        auto out = open_file(dir / "diagnostics.csv");
        write_diagnostics_csv(out, r.lyapunov);
    }
    open_file(dir / "rates.json") << rates_json(r).dump(2) << '\n';
    open_file(dir / "summary.json") << summary_json(r).dump(2) << '\n';
}

}  // namespace trigs
