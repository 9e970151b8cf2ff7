#include "cvqkd/simulation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvqkd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Root of attack - normal on the loss axis by bisection. Both curves are
// continuous and the attack sits above the normal level at vanishing loss.
double crossover_loss_db(double v, double excess_noise, double vnb,
                         bool direct) {
  auto gap = [&](double loss_db) {
    const double eta = eta_from_loss_db(loss_db);
    const double chi = total_added_noise(eta, excess_noise);
    return direct ? v_ab_attack(v, eta, vnb) - v_ab_normal(v, eta, chi)
                  : v_ba_attack(eta, vnb) - v_ba_normal(eta, chi);
  };
  double lo = 1e-9;
  double hi = 3.0;
  if (!(gap(lo) > 0.0)) return 0.0;
  while (gap(hi) > 0.0 && hi < 60.0) hi *= 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  ProtocolEngine engine(config);
  const std::vector<ShotOutcome> outcomes = engine.run_all();

  RunResult result;
  result.config = config;
  result.records.reserve(outcomes.size());

  // All reductions run serially in shot order so the output does not depend
  // on the worker count.
  double sum_vnb_x = 0.0, sum_vnb_p = 0.0, sum_pad = 0.0;
  double sum_monitor = 0.0;
  std::size_t fallbacks = 0, filtered = 0;
  std::vector<double> monitor_readings;
  monitor_readings.reserve(outcomes.size());
  std::vector<double> eve_x, eve_p, bob_x, bob_p;
  for (const ShotOutcome& outcome : outcomes) {
    result.records.push_back(outcome.record);
    sum_vnb_x += outcome.vnb_x;
    sum_vnb_p += outcome.vnb_p;
    sum_pad += outcome.pad_variance;
    sum_monitor += outcome.record.monitor;
    monitor_readings.push_back(outcome.record.monitor);
    if (outcome.record.attack_fallback) ++fallbacks;
    if (outcome.record.filtered) ++filtered;
    if (outcome.record.eve_x && !outcome.record.filtered) {
      eve_x.push_back(*outcome.record.eve_x);
      eve_p.push_back(*outcome.record.eve_p);
      bob_x.push_back(outcome.record.bob_x);
      bob_p.push_back(outcome.record.bob_p);
    }
  }

  RunSummary& summary = result.summary;
  const double n = static_cast<double>(outcomes.size());
  summary.shots = outcomes.size();
  summary.attack = config.attack_enabled;
  summary.mean_vnb_x = sum_vnb_x / n;
  summary.mean_vnb_p = sum_vnb_p / n;
  summary.mean_vnb = 0.5 * (summary.mean_vnb_x + summary.mean_vnb_p);
  summary.mean_pad_variance = sum_pad / n;
  summary.fallback_fraction = static_cast<double>(fallbacks) / n;
  summary.filtered_fraction = static_cast<double>(filtered) / n;
  summary.monitor_mean = sum_monitor / n;
  summary.monitor_expected = engine.expected_monitor();
  summary.monitor_pass =
      monitor_check(monitor_readings, summary.monitor_expected,
                    config.monitor_tolerance);

  // Short monitoring-only runs stay below the estimator's minimum; their
  // verdicts fall back to the analytic predictions.
  std::optional<double> measured_ab;
  std::optional<double> measured_ba;
  if (result.records.size() >= 1000) {
    const ConditionalVariances estimates =
        estimate_conditional_variances(result.records);
    summary.v_ab = estimates.v_ab;
    summary.v_ba = estimates.v_ba;
    measured_ab = estimates.v_ab.value;
    measured_ba = estimates.v_ba.value;
  }

  if (config.attack_enabled && eve_x.size() >= 2) {
    summary.correlation_x = pearson_correlation(eve_x, bob_x);
    summary.correlation_p = pearson_correlation(eve_p, bob_p);
  }

  summary.report = security_verdict(
      config.v(), config.channel_transmission, config.excess_noise,
      config.attack_enabled ? summary.mean_vnb : 0.0, measured_ab,
      measured_ba);
  return result;
}

SweepResult sweep_figures(double v, double excess_noise, double vnb,
                          std::span<const double> loss_grid_db) {
  SweepResult result;
  result.v = v;
  result.excess_noise = excess_noise;
  result.vnb = vnb;
  result.rows.reserve(loss_grid_db.size());
  for (double loss_db : loss_grid_db) {
    if (!(loss_db >= 0.0)) {
      throw std::domain_error("loss grid entries must be non-negative dB");
    }
    const double eta = eta_from_loss_db(loss_db);
    SweepRow row;
    row.loss_db = loss_db;
    row.eta = eta;
    row.chi = total_added_noise(eta, excess_noise);
    row.v_ba_max = v_ba_max(v, eta);
    row.v_ba_normal = v_ba_normal(eta, row.chi);
    row.v_ba_attack = v_ba_attack(eta, vnb);
    row.key_rate_rr = key_rate_rr(v, eta, row.chi);
    if (eta > kDrMinTransmission) {
      row.v_ab_max = v_ab_max(v, eta);
      row.v_ab_normal = v_ab_normal(v, eta, row.chi);
      row.v_ab_attack = v_ab_attack(v, eta, vnb);
      row.key_rate_dr = key_rate_dr(v, eta, row.chi);
    } else {
      row.v_ab_max = kNaN;
      row.v_ab_normal = kNaN;
      row.v_ab_attack = kNaN;
      row.key_rate_dr = kNaN;
    }
    result.rows.push_back(row);
  }
  result.crossover_db_dr = crossover_loss_db(v, excess_noise, vnb, true);
  result.crossover_db_rr = crossover_loss_db(v, excess_noise, vnb, false);
  return result;
}

}  // namespace cvqkd
