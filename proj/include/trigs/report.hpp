#pragma once

#include "trigs/harness.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <ostream>
#include <vector>

namespace trigs {

// CSV writers use 17 significant digits so values round-trip exactly.

/// t, x_1..x_n, v_1..v_n
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// t, E, W, phi_gap, mu, log_gamma, A, B, C, bound_rhs, keybb_slack, est_basic1_slack
void write_diagnostics_csv(std::ostream& out, const std::vector<LyapunovSample>& samples);
/// p, value_target, trajectory_target, value_slope, trajectory_slope,
/// value_bounded, trajectory_bounded, inequalities_pass, error
void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows);

nlohmann::json rates_json(const RunResult& result);
nlohmann::json summary_json(const RunResult& result);

/// trajectory.csv, diagnostics.csv, rates.json and summary.json under `dir`
/// (created if missing).
void write_run_outputs(const std::filesystem::path& dir, const RunResult& result);

}  // namespace trigs
