#include "cvqkd/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvqkd {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_wavelength(double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) {
    throw std::domain_error("wavelength must be positive");
  }
}

}  // namespace

SplitterModel SplitterModel::calibrated(double reference_wavelength_nm,
                                        double reference_transmission,
                                        double coupled_fraction) {
  require_positive_wavelength(reference_wavelength_nm);
  if (!(coupled_fraction > 0.0) || coupled_fraction > 1.0) {
    throw std::domain_error("coupled fraction must lie in (0, 1]");
  }
  if (!(reference_transmission >= 0.0) ||
      reference_transmission > coupled_fraction) {
    throw std::domain_error(
        "reference transmission must lie in [0, coupled_fraction]");
  }
  SplitterModel model;
  model.coupled_fraction = coupled_fraction;
  model.reference_wavelength = reference_wavelength_nm;
  model.reference_transmission = reference_transmission;
  const double angle =
      std::asin(std::sqrt(reference_transmission / coupled_fraction));
  model.phase_coefficient = angle / std::pow(reference_wavelength_nm, 2.5);
  return model;
}

double SplitterModel::phase(double wavelength_nm) const {
  require_positive_wavelength(wavelength_nm);
  return phase_coefficient * std::pow(wavelength_nm, 2.5);
}

double SplitterModel::transmission(double wavelength_nm) const {
  const double s = std::sin(phase(wavelength_nm));
  return coupled_fraction * s * s;
}

double wavelength_for_transmission(const SplitterModel& model, double target,
                                   int branch, bool rising) {
  if (branch < 0) {
    throw std::domain_error("branch index must be non-negative");
  }
  if (!(target >= 0.0)) {
    throw std::domain_error("target transmission must be non-negative");
  }
  if (target > model.coupled_fraction * (1.0 + 1e-15)) {
    throw std::domain_error(
        "target transmission exceeds the coupled fraction; infeasible");
  }
  const double angle =
      std::asin(std::sqrt(std::min(target / model.coupled_fraction, 1.0)));
  const double target_phase =
      rising ? branch * kPi + angle : (branch + 1) * kPi - angle;
  if (!(target_phase > 0.0)) {
    throw std::domain_error("no positive wavelength on the requested branch");
  }

  // The phase is strictly monotone in wavelength, so a bracketing bisection
  // is exact. The closed-form seed keeps the bracket tight.
  const double seed =
      std::pow(target_phase / model.phase_coefficient, 0.4);
  double lo = seed * (1.0 - 1e-6);
  double hi = seed * (1.0 + 1e-6);
  while (model.phase(lo) > target_phase) lo *= 1.0 - 1e-6;
  while (model.phase(hi) < target_phase) hi *= 1.0 + 1e-6;
  // Relative phase tolerance 1e-12; the phase scales as lambda^2.5, so an
  // interval of 4e-13 relative in lambda is comfortably inside that.
  while ((hi - lo) > 4e-13 * seed) {
    const double mid = 0.5 * (lo + hi);
    if (model.phase(mid) < target_phase) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double monitor_transmission(const SplitterModel& main,
                            const SplitterModel& monitor,
                            double wavelength_nm) {
  if (std::abs(main.reference_wavelength - monitor.reference_wavelength) >
      1e-9) {
    throw std::invalid_argument(
        "main and monitor couplers must share the calibration wavelength");
  }
  return monitor.transmission(wavelength_nm);
}

std::vector<double> zeros_of_transmission(const SplitterModel& model,
                                          double band_lo_nm,
                                          double band_hi_nm) {
  require_positive_wavelength(band_lo_nm);
  if (!(band_hi_nm >= band_lo_nm)) {
    throw std::domain_error("band must be non-empty");
  }
  const double phase_lo = model.phase(band_lo_nm);
  const double phase_hi = model.phase(band_hi_nm);
  const int k_min = std::max(1, static_cast<int>(std::ceil(phase_lo / kPi - 1e-12)));
  const int k_max = static_cast<int>(std::floor(phase_hi / kPi + 1e-12));
  std::vector<double> zeros;
  for (int k = k_min; k <= k_max; ++k) {
    const double lambda = wavelength_for_transmission(model, 0.0, k, true);
    if (lambda >= band_lo_nm - 1e-9 && lambda <= band_hi_nm + 1e-9) {
      zeros.push_back(lambda);
    }
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

SplitterRecord to_record(const SplitterModel& model) {
  return SplitterRecord{model.reference_wavelength,
                        model.reference_transmission,
                        model.coupled_fraction};
}

SplitterModel from_record(const SplitterRecord& record) {
  return SplitterModel::calibrated(record.reference_wavelength,
                                   record.reference_transmission,
                                   record.coupled_fraction);
}

}  // namespace cvqkd
