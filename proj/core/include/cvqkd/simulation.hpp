#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cvqkd/estimators.hpp"
#include "cvqkd/protocol.hpp"
#include "cvqkd/security.hpp"

namespace cvqkd {

struct RunSummary {
  std::size_t shots = 0;
  bool attack = false;
  EstimateWithCI v_ab{};
  EstimateWithCI v_ba{};
  double mean_vnb = 0.0;    // symmetrized over quadratures, attacked runs
  double mean_vnb_x = 0.0;
  double mean_vnb_p = 0.0;
  double mean_pad_variance = 0.0;
  double fallback_fraction = 0.0;
  double filtered_fraction = 0.0;
  double monitor_mean = 0.0;
  double monitor_expected = 0.0;
  bool monitor_pass = false;  // alarm fires when this is false
  std::optional<double> correlation_x;  // resent target vs reading
  std::optional<double> correlation_p;
  SecurityReport report{};
};

struct RunResult {
  ScenarioConfig config{};
  std::vector<ShotRecord> records;
  RunSummary summary{};
};

// Generates all shots for the scenario, estimates the conditional variances,
// runs the monitor check and assembles the security report (verdicts from
// the measured variances).
RunResult run_scenario(const ScenarioConfig& config);

// One loss point of the analytic sweep. Direct-reconciliation columns are
// NaN where that direction cannot be secure at any noise (eta <= 2/3).
struct SweepRow {
  double loss_db = 0.0;
  double eta = 0.0;
  double chi = 0.0;
  double v_ab_max = 0.0;
  double v_ab_normal = 0.0;
  double v_ab_attack = 0.0;
  double v_ba_max = 0.0;
  double v_ba_normal = 0.0;
  double v_ba_attack = 0.0;
  double key_rate_dr = 0.0;
  double key_rate_rr = 0.0;
};

struct SweepResult {
  double v = 0.0;
  double excess_noise = 0.0;
  double vnb = 0.0;
  std::vector<SweepRow> rows;
  // Loss where the attack curve crosses the normal curve (attack sits above
  // at low loss, below beyond the crossover).
  double crossover_db_dr = 0.0;
  double crossover_db_rr = 0.0;
};

SweepResult sweep_figures(double v, double excess_noise, double vnb,
                          std::span<const double> loss_grid_db);

}  // namespace cvqkd
