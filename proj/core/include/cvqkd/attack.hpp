#pragma once

#include <cstdint>
#include <vector>

#include "cvqkd/detection.hpp"
#include "cvqkd/random.hpp"
#include "cvqkd/splitter.hpp"

namespace cvqkd {

// The quadrature pair the receiver must be steered to read: sqrt(eta) times
// the interceptor's measured values (plus any deliberate padding noise).
struct TargetQuadratures {
  double x = 0.0;
  double p = 0.0;
};

// Full recipe for one resent round: wavelengths, the transmissions they see
// at both couplers, transmitted intensities of the two carrier pulses, the
// source intensity of the monitor-compensation pulse, and the residual noise
// the receiver will suffer.
struct AttackSolution {
  double lambda_sig = 0.0;      // nm
  double lambda_lo = 0.0;       // nm
  double lambda_ancilla = 0.0;  // nm
  double t_sig = 0.0;           // main-splitter transmissions
  double t_lo = 0.0;
  double t_ancilla = 0.0;
  double tp_sig = 0.0;  // monitor-splitter transmissions
  double tp_lo = 0.0;
  double tp_ancilla = 0.0;
  double i_sig = 0.0;             // transmitted intensities (photons)
  double i_lo = 0.0;
  double i_ancilla_source = 0.0;  // ancilla source intensity (photons)
  double vnb_x = 0.0;
  double vnb_p = 0.0;

  double source_sig() const { return tp_sig > 0.0 ? i_sig / tp_sig : 0.0; }
  double source_lo() const { return tp_lo > 0.0 ? i_lo / tp_lo : 0.0; }
  // Photon count delivered to the monitoring detector.
  double monitor_sum() const {
    return (1.0 - tp_sig) * source_sig() + (1.0 - tp_lo) * source_lo() +
           (1.0 - tp_ancilla) * i_ancilla_source;
  }
};

struct SolveOutcome {
  bool feasible = false;
  AttackSolution solution{};
  // When infeasible: the closest point to the requested target along the
  // same direction that the caps still allow.
  TargetQuadratures nearest_achievable{};
};

struct AttackSearchConfig {
  double band_lo = 1200.0;  // nm, carrier-pulse search band
  double band_hi = 2100.0;
  int grid_points = 80;
  double ancilla_band_lo = 1200.0;  // nm, band scanned for transmission nulls
  double ancilla_band_hi = 4000.0;
  double min_determinant = 1e-9;
  bool refine = true;  // local polish of the best grid cell
};

// Precomputed wavelength grid plus the per-pair linear systems. Building the
// grid is a one-time cost; solving per target is read-only and safe to call
// from many threads at once.
class AttackSolver {
 public:
  AttackSolver(const SplitterModel& main, const SplitterModel& monitor,
               double lo_photons, double intensity_cap,
               AttackSearchConfig config = {});

  // Finds wavelengths and intensities reproducing the target through the
  // receiver, feasible under the intensity caps, with the monitoring budget
  // balanced by the ancilla. Among feasible candidates the result minimizes
  // max(vnb_x, vnb_p), then total source intensity.
  SolveOutcome solve(const TargetQuadratures& target) const;

  double lo_photons() const { return lo_photons_; }
  double intensity_cap() const { return intensity_cap_; }
  double expected_monitor() const { return expected_monitor_; }
  double lambda_ancilla() const { return lambda_ancilla_; }
  const AttackSearchConfig& config() const { return config_; }
  const SplitterModel& main_splitter() const { return main_; }
  const SplitterModel& monitor_splitter() const { return monitor_; }

  struct GridPoint {
    double lambda = 0.0;
    double t = 0.0;       // main transmission
    double tp = 0.0;      // monitor transmission
    double ax = 0.0;      // response coefficients, signal port
    double ap = 0.0;
    double ncx = 0.0;     // residual-noise weights
    double ncp = 0.0;
    double cap = 0.0;     // transmitted-intensity cap at this wavelength
  };
  const std::vector<GridPoint>& grid() const { return grid_; }

 private:
  struct PairEntry {
    // Inverse of the 2x2 response matrix, premultiplied by 1/det.
    double m00, m01, m10, m11;
    double cap_i, cap_j;
    double ncx_i, ncx_j, ncp_i, ncp_j;
    std::uint32_t i, j;
  };

  struct Candidate {
    bool feasible = false;
    double lambda_sig = 0.0, lambda_lo = 0.0;
    double i_sig = 0.0, i_lo = 0.0;
    double vnb_max = 0.0;
    double total_source = 0.0;
  };

  GridPoint evaluate_point(double lambda) const;
  Candidate evaluate_pair(const GridPoint& gi, const GridPoint& gj,
                          double rx, double rp) const;
  Candidate refine_candidate(const Candidate& start, double rx,
                             double rp) const;
  AttackSolution assemble(const Candidate& candidate) const;

  SplitterModel main_;
  SplitterModel monitor_;
  double lo_photons_ = 0.0;
  double intensity_cap_ = 0.0;
  double expected_monitor_ = 0.0;
  AttackSearchConfig config_{};
  std::vector<GridPoint> grid_;
  std::vector<PairEntry> pairs_;
  double grid_spacing_ = 0.0;
  double lambda_ancilla_ = 0.0;
  double t_ancilla_ = 0.0;
  double tp_ancilla_ = 0.0;
};

// Rasterized map of the reachable target plane. Every cell's reachable set
// is convex and contains the origin, so the union is star-shaped; the
// largest covered disk radius is therefore the minimum over directions of
// the exact per-direction reach, evaluated on a dense angular scan rather
// than read off the raster.
struct RegionMap {
  double extent = 0.0;  // half-width of the square, target units
  int resolution = 0;   // pixels per axis
  std::vector<std::uint8_t> covered;  // row-major, resolution x resolution
  double max_radius = 0.0;            // largest fully covered centred disk
  bool disk20_covered = false;        // is x^2 + p^2 < 20 fully covered?

  bool at(int ix, int ip) const {
    return covered[static_cast<std::size_t>(ip) * resolution + ix] != 0;
  }
};

// Sweeps every wavelength pair of the solver grid, maps the feasible
// intensity rectangles into the target plane and rasterizes their union.
// resolution >= 64; extent <= 0 selects a bound covering the whole
// reachable set.
RegionMap achievable_region(const AttackSolver& solver, int resolution,
                            double extent = 0.0);

// Probability that a Gaussian target of variance v lands outside the
// guaranteed-reachable range on either quadrature: erfc(20 / sqrt(2 v)).
double failure_probability(double v);

// Extra variance the interceptor adds to its measured quadratures so the
// receiver-side conditional variance is raised back to the undisturbed
// level: eta + vnb + eta * sigma^2 == 1 + eta * excess_noise / 2, clamped
// at zero when the attack already sits above the normal level.
double noise_padding_variance(double eta, double excess_noise, double vnb);

// The interceptor's own dual-quadrature measurement of the outgoing state.
QuadratureSample eve_intercept(const QuadratureSample& state, ShotRng& rng);

}  // namespace cvqkd
