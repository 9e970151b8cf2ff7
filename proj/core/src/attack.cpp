#include "cvqkd/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvqkd {

namespace {

constexpr double kIntensityTolerance = 1e-6;  // photons

// Lexicographic candidate order: residual noise first, then total source
// intensity (less light at the receiver is harder to notice).
bool better(double vnb_a, double total_a, double vnb_b, double total_b) {
  if (vnb_a != vnb_b) return vnb_a < vnb_b;
  return total_a < total_b;
}

}  // namespace

AttackSolver::AttackSolver(const SplitterModel& main,
                           const SplitterModel& monitor, double lo_photons,
                           double intensity_cap, AttackSearchConfig config)
    : main_(main),
      monitor_(monitor),
      lo_photons_(lo_photons),
      intensity_cap_(intensity_cap),
      config_(config) {
  if (!(lo_photons > 0.0)) {
    throw std::domain_error("oscillator photon number must be positive");
  }
  if (!(intensity_cap > 0.0) || intensity_cap > 0.01 * lo_photons) {
    throw std::domain_error(
        "intensity cap must be positive and at most 1% of the oscillator "
        "photon number");
  }
  if (config_.grid_points < 8) {
    throw std::domain_error("search grid needs at least 8 points");
  }
  if (!(config_.band_lo > 0.0) || !(config_.band_hi > config_.band_lo)) {
    throw std::domain_error("carrier search band is empty");
  }

  expected_monitor_ =
      (1.0 - monitor_transmission(main_, monitor_, main_.reference_wavelength)) *
      lo_photons_;

  // The compensation pulse sits on a transmission null of the main splitter;
  // among the nulls in band, the one diverting the most light into the
  // monitoring tap needs the least source intensity.
  const std::vector<double> nulls = zeros_of_transmission(
      main_, config_.ancilla_band_lo, config_.ancilla_band_hi);
  if (nulls.empty()) {
    throw std::runtime_error(
        "no transmission null inside the ancilla search band; widen the band");
  }
  double best_feed = -1.0;
  for (double lambda : nulls) {
    const double feed = 1.0 - monitor_transmission(main_, monitor_, lambda);
    if (feed > best_feed) {
      best_feed = feed;
      lambda_ancilla_ = lambda;
    }
  }
  if (best_feed <= 1e-6) {
    throw std::runtime_error(
        "every transmission null is invisible to the monitoring tap");
  }
  t_ancilla_ = main_.transmission(lambda_ancilla_);
  tp_ancilla_ = monitor_transmission(main_, monitor_, lambda_ancilla_);

  const int n = config_.grid_points;
  grid_spacing_ = (config_.band_hi - config_.band_lo) / (n - 1);
  grid_.reserve(n);
  for (int i = 0; i < n; ++i) {
    grid_.push_back(evaluate_point(config_.band_lo + grid_spacing_ * i));
  }

  pairs_.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (std::uint32_t i = 0; i < grid_.size(); ++i) {
    for (std::uint32_t j = 0; j < grid_.size(); ++j) {
      if (i == j) continue;
      const GridPoint& gi = grid_[i];
      const GridPoint& gj = grid_[j];
      const double det = gj.ax * gi.ap - gi.ax * gj.ap;
      if (std::abs(det) < config_.min_determinant) continue;
      PairEntry entry;
      entry.m00 = -gj.ap / det;
      entry.m01 = gj.ax / det;
      entry.m10 = -gi.ap / det;
      entry.m11 = gi.ax / det;
      entry.cap_i = gi.cap;
      entry.cap_j = gj.cap;
      entry.ncx_i = gi.ncx;
      entry.ncx_j = gj.ncx;
      entry.ncp_i = gi.ncp;
      entry.ncp_j = gj.ncp;
      entry.i = i;
      entry.j = j;
      pairs_.push_back(entry);
    }
  }
}

AttackSolver::GridPoint AttackSolver::evaluate_point(double lambda) const {
  GridPoint point;
  point.lambda = lambda;
  point.t = main_.transmission(lambda);
  point.tp = monitor_transmission(main_, monitor_, lambda);
  const ResponseCoefficients coeff = response_coefficients(point.t);
  point.ax = coeff.x;
  point.ap = coeff.p;
  point.ncx = noise_coefficient_x(point.t);
  point.ncp = noise_coefficient_p(point.t);
  if (point.tp <= 1e-12) {
    point.cap = 0.0;  // nothing can pass the monitoring tap
  } else if (1.0 - point.tp <= 1e-15) {
    point.cap = intensity_cap_;
  } else {
    // Transmitted-intensity cap plus the per-pulse bound keeping the
    // monitor-side contribution within half the monitoring budget.
    point.cap = std::min(intensity_cap_,
                         5.0 * point.tp / (1.0 - point.tp) * intensity_cap_);
  }
  return point;
}

AttackSolver::Candidate AttackSolver::evaluate_pair(const GridPoint& gi,
                                                    const GridPoint& gj,
                                                    double rx,
                                                    double rp) const {
  Candidate candidate;
  const double det = gj.ax * gi.ap - gi.ax * gj.ap;
  if (std::abs(det) < config_.min_determinant) return candidate;
  const double i_sig = (-gj.ap * rx + gj.ax * rp) / det;
  const double i_lo = (-gi.ap * rx + gi.ax * rp) / det;
  if (i_sig < -kIntensityTolerance || i_lo < -kIntensityTolerance) {
    return candidate;
  }
  const double is = std::max(i_sig, 0.0);
  const double il = std::max(i_lo, 0.0);
  if (is > gi.cap || il > gj.cap) return candidate;
  const double mon = (gi.tp > 0.0 ? (1.0 - gi.tp) / gi.tp * is : 0.0) +
                     (gj.tp > 0.0 ? (1.0 - gj.tp) / gj.tp * il : 0.0);
  if (mon > expected_monitor_ * (1.0 + 1e-12)) return candidate;

  candidate.feasible = true;
  candidate.lambda_sig = gi.lambda;
  candidate.lambda_lo = gj.lambda;
  candidate.i_sig = is;
  candidate.i_lo = il;
  const double vnb_x = (gi.ncx * is + gj.ncx * il) / lo_photons_;
  const double vnb_p = (gi.ncp * is + gj.ncp * il) / lo_photons_;
  candidate.vnb_max = std::max(vnb_x, vnb_p);
  const double anc_source = (expected_monitor_ - mon) / (1.0 - tp_ancilla_);
  candidate.total_source = (gi.tp > 0.0 ? is / gi.tp : 0.0) +
                           (gj.tp > 0.0 ? il / gj.tp : 0.0) + anc_source;
  return candidate;
}

AttackSolver::Candidate AttackSolver::refine_candidate(const Candidate& start,
                                                       double rx,
                                                       double rp) const {
  Candidate best = start;
  double lambda_sig = start.lambda_sig;
  double lambda_lo = start.lambda_lo;
  double window = grid_spacing_;
  for (int round = 0; round < 2; ++round) {
    for (int coord = 0; coord < 2; ++coord) {
      const double centre = coord == 0 ? lambda_sig : lambda_lo;
      for (int step = -3; step <= 3; ++step) {
        if (step == 0) continue;
        const double shifted = centre + window * step / 3.0;
        if (shifted < config_.band_lo || shifted > config_.band_hi) continue;
        const GridPoint gi =
            evaluate_point(coord == 0 ? shifted : lambda_sig);
        const GridPoint gj = evaluate_point(coord == 0 ? lambda_lo : shifted);
        const Candidate trial = evaluate_pair(gi, gj, rx, rp);
        if (trial.feasible && better(trial.vnb_max, trial.total_source,
                                     best.vnb_max, best.total_source)) {
          best = trial;
          if (coord == 0) {
            lambda_sig = shifted;
          } else {
            lambda_lo = shifted;
          }
        }
      }
    }
    window /= 4.0;
  }
  return best;
}

AttackSolution AttackSolver::assemble(const Candidate& candidate) const {
  AttackSolution solution;
  solution.lambda_sig = candidate.lambda_sig;
  solution.lambda_lo = candidate.lambda_lo;
  solution.lambda_ancilla = lambda_ancilla_;
  solution.t_sig = main_.transmission(candidate.lambda_sig);
  solution.t_lo = main_.transmission(candidate.lambda_lo);
  solution.t_ancilla = t_ancilla_;
  solution.tp_sig = monitor_transmission(main_, monitor_, candidate.lambda_sig);
  solution.tp_lo = monitor_transmission(main_, monitor_, candidate.lambda_lo);
  solution.tp_ancilla = tp_ancilla_;
  solution.i_sig = candidate.i_sig;
  solution.i_lo = candidate.i_lo;

  const double mon_carriers =
      (1.0 - solution.tp_sig) * solution.source_sig() +
      (1.0 - solution.tp_lo) * solution.source_lo();
  solution.i_ancilla_source = std::max(
      (expected_monitor_ - mon_carriers) / (1.0 - tp_ancilla_), 0.0);

  const ResidualNoise noise =
      residual_noise_variance(solution.t_sig, solution.t_lo, solution.i_sig,
                              solution.i_lo, lo_photons_);
  solution.vnb_x = noise.x;
  solution.vnb_p = noise.p;
  return solution;
}

SolveOutcome AttackSolver::solve(const TargetQuadratures& target) const {
  SolveOutcome outcome;

  if (target.x == 0.0 && target.p == 0.0) {
    // Balanced point: both responses vanish at T = 1/2, no carrier light is
    // needed and the ancilla alone fills the monitoring budget.
    Candidate trivial;
    trivial.feasible = true;
    if (main_.coupled_fraction > 0.5 + 1e-9) {
      // Rising/falling flanks give two distinct wavelengths at T = 1/2.
      trivial.lambda_sig = wavelength_for_transmission(main_, 0.5, 0, true);
      trivial.lambda_lo = wavelength_for_transmission(main_, 0.5, 0, false);
    } else {
      trivial.lambda_sig = grid_[grid_.size() / 3].lambda;
      trivial.lambda_lo = grid_[2 * grid_.size() / 3].lambda;
    }
    outcome.feasible = true;
    outcome.solution = assemble(trivial);
    outcome.nearest_achievable = target;
    return outcome;
  }

  const double rx = target.x * std::sqrt(lo_photons_) / 2.0;
  const double rp = target.p * std::sqrt(lo_photons_) / 2.0;

  Candidate best;
  best.vnb_max = std::numeric_limits<double>::infinity();
  best.total_source = std::numeric_limits<double>::infinity();
  double best_scale = 0.0;

  for (const PairEntry& pair : pairs_) {
    const double i_sig = pair.m00 * rx + pair.m01 * rp;
    const double i_lo = pair.m10 * rx + pair.m11 * rp;
    if (i_sig < -kIntensityTolerance || i_lo < -kIntensityTolerance) continue;
    const double is = i_sig > 0.0 ? i_sig : 0.0;
    const double il = i_lo > 0.0 ? i_lo : 0.0;
    const GridPoint& gi = grid_[pair.i];
    const GridPoint& gj = grid_[pair.j];
    const double mon = (1.0 - gi.tp) / gi.tp * is + (1.0 - gj.tp) / gj.tp * il;
    if (is > pair.cap_i || il > pair.cap_j ||
        mon > expected_monitor_ * (1.0 + 1e-12)) {
      // Reachable direction, magnitude beyond a budget: remember how far
      // along the target this cell still gets.
      double scale = 1.0;
      if (is > 0.0) scale = std::min(scale, pair.cap_i / is);
      if (il > 0.0) scale = std::min(scale, pair.cap_j / il);
      if (mon > 0.0) scale = std::min(scale, expected_monitor_ / mon);
      best_scale = std::max(best_scale, scale);
      continue;
    }
    const double vnb_x = (pair.ncx_i * is + pair.ncx_j * il) / lo_photons_;
    const double vnb_p = (pair.ncp_i * is + pair.ncp_j * il) / lo_photons_;
    const double vnb_max = vnb_x > vnb_p ? vnb_x : vnb_p;
    if (vnb_max > best.vnb_max) continue;
    const double anc_source = (expected_monitor_ - mon) / (1.0 - tp_ancilla_);
    const double total = is / gi.tp + il / gj.tp + anc_source;
    if (better(vnb_max, total, best.vnb_max, best.total_source)) {
      best.feasible = true;
      best.lambda_sig = gi.lambda;
      best.lambda_lo = gj.lambda;
      best.i_sig = is;
      best.i_lo = il;
      best.vnb_max = vnb_max;
      best.total_source = total;
      best_scale = 1.0;
    }
  }

  if (!best.feasible) {
    outcome.feasible = false;
    outcome.nearest_achievable = {target.x * best_scale, target.p * best_scale};
    return outcome;
  }

  if (config_.refine) {
    best = refine_candidate(best, rx, rp);
  }

  outcome.feasible = true;
  outcome.solution = assemble(best);
  outcome.nearest_achievable = target;
  return outcome;
}

RegionMap achievable_region(const AttackSolver& solver, int resolution,
                            double extent) {
  if (resolution < 64) {
    throw std::domain_error("region raster needs at least 64 pixels per axis");
  }
  const auto& grid = solver.grid();
  const double scale = 2.0 / std::sqrt(solver.lo_photons());

  struct PairInverse {
    double m00, m01, m10, m11, cap_i, cap_j, mon_i, mon_j;
  };
  std::vector<PairInverse> pairs;
  pairs.reserve(grid.size() * (grid.size() - 1));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (i == j) continue;
      const double det = grid[j].ax * grid[i].ap - grid[i].ax * grid[j].ap;
      if (std::abs(det) < solver.config().min_determinant) continue;
      const double mon_i =
          grid[i].tp > 0.0 ? (1.0 - grid[i].tp) / grid[i].tp : 0.0;
      const double mon_j =
          grid[j].tp > 0.0 ? (1.0 - grid[j].tp) / grid[j].tp : 0.0;
      pairs.push_back({-grid[j].ap / det, grid[j].ax / det, -grid[i].ap / det,
                       grid[i].ax / det, grid[i].cap, grid[j].cap, mon_i,
                       mon_j});
    }
  }

  const double budget = solver.expected_monitor();
  // Largest feasible magnitude along one target-plane direction: intensities
  // scale linearly along a ray, so each cell caps the reach in closed form.
  auto reach_along = [&](double ux, double up) {
    const double rx = ux / scale;
    const double rp = up / scale;
    double best = 0.0;
    for (const PairInverse& pr : pairs) {
      const double i_sig = pr.m00 * rx + pr.m01 * rp;
      const double i_lo = pr.m10 * rx + pr.m11 * rp;
      if (i_sig < 0.0 || i_lo < 0.0) continue;
      double s = std::numeric_limits<double>::infinity();
      if (i_sig > 0.0) s = std::min(s, pr.cap_i / i_sig);
      if (i_lo > 0.0) s = std::min(s, pr.cap_j / i_lo);
      const double mon = pr.mon_i * i_sig + pr.mon_j * i_lo;
      if (mon > 0.0) s = std::min(s, budget / mon);
      if (std::isinf(s)) continue;  // both intensities zero
      best = std::max(best, s);
    }
    return best;
  };

  // Exact largest covered disk: the region is star-shaped about the origin
  // (every cell's set is convex and contains it), so the radius is the
  // minimum directional reach.
  const int directions = 4096;
  double min_reach = std::numeric_limits<double>::infinity();
  double max_reach = 0.0;
  for (int k = 0; k < directions; ++k) {
    const double angle = 6.283185307179586 * k / directions;
    const double reach = reach_along(std::cos(angle), std::sin(angle));
    min_reach = std::min(min_reach, reach);
    max_reach = std::max(max_reach, reach);
  }

  if (extent <= 0.0) {
    extent = 1.05 * max_reach;
  }

  RegionMap map;
  map.extent = extent;
  map.resolution = resolution;
  map.covered.assign(static_cast<std::size_t>(resolution) * resolution, 0);
  map.max_radius = min_reach;
  map.disk20_covered = min_reach >= std::sqrt(20.0);

  const double pixel = 2.0 * extent / resolution;
  for (int ip = 0; ip < resolution; ++ip) {
    const double p = -extent + pixel * (ip + 0.5);
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = -extent + pixel * (ix + 0.5);
      const double rx = x / scale;
      const double rp = p / scale;
      bool covered = (x == 0.0 && p == 0.0);
      for (const PairInverse& pr : pairs) {
        const double i_sig = pr.m00 * rx + pr.m01 * rp;
        const double i_lo = pr.m10 * rx + pr.m11 * rp;
        if (i_sig >= -kIntensityTolerance && i_lo >= -kIntensityTolerance &&
            i_sig <= pr.cap_i && i_lo <= pr.cap_j &&
            pr.mon_i * std::max(i_sig, 0.0) + pr.mon_j * std::max(i_lo, 0.0) <=
                budget * (1.0 + 1e-12)) {
          covered = true;
          break;
        }
      }
      map.covered[static_cast<std::size_t>(ip) * resolution + ix] =
          covered ? 1 : 0;
    }
  }
  return map;
}

double failure_probability(double v) {
  if (!(v > 0.0)) {
    throw std::domain_error("variance must be positive");
  }
  return std::erfc(20.0 / std::sqrt(2.0 * v));
}

double noise_padding_variance(double eta, double excess_noise, double vnb) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw std::domain_error("channel transmission must lie in (0, 1]");
  }
  if (!(excess_noise >= 0.0) || !(vnb >= 0.0)) {
    throw std::domain_error("noise figures must be non-negative");
  }
  const double normal_level = 1.0 + eta * excess_noise / 2.0;
  return std::max((normal_level - eta - vnb) / eta, 0.0);
}

QuadratureSample eve_intercept(const QuadratureSample& state, ShotRng& rng) {
  return heterodyne(state, rng);
}

}  // namespace cvqkd
