#pragma once

#include <vector>

namespace cvqkd {

// Wavelength-dependent intensity transmission of a fused biconical-taper
// fiber coupler:
//
//   T(lambda) = F^2 * sin^2(A * lambda^(5/2))
//
// with F^2 the coupled power fraction and A the phase coefficient in
// rad / nm^(5/2). The phase A * lambda^(5/2) is strictly increasing in
// lambda, which makes every half-period of the sine an invertible branch.
struct SplitterModel {
  double phase_coefficient = 0.0;     // A, rad / nm^(5/2)
  double coupled_fraction = 1.0;      // F^2, peak transmission
  double reference_wavelength = 0.0;  // nm, calibration point
  double reference_transmission = 0.0;

  // Builds a model whose principal branch passes through the calibration
  // point: transmission(reference_wavelength) == reference_transmission.
  static SplitterModel calibrated(double reference_wavelength_nm,
                                  double reference_transmission,
                                  double coupled_fraction = 1.0);

  double phase(double wavelength_nm) const;         // A * lambda^(5/2)
  double transmission(double wavelength_nm) const;  // in [0, coupled_fraction]
};

// Inverts the transmission curve on one monotone branch of the sine.
// Branch k rising covers phases [k*pi, k*pi + pi/2], falling covers
// [k*pi + pi/2, (k+1)*pi]. Throws std::domain_error when the target exceeds
// the coupled fraction or no positive wavelength exists on the branch.
double wavelength_for_transmission(const SplitterModel& model, double target,
                                   int branch, bool rising);

// Transmission of the monitoring tap coupler at the given wavelength. Both
// couplers must share the same calibration wavelength; the monitor's own
// phase model is the ground truth at every wavelength.
double monitor_transmission(const SplitterModel& main,
                            const SplitterModel& monitor,
                            double wavelength_nm);

// All wavelengths in [band_lo, band_hi] where the transmission vanishes,
// sorted ascending, each accurate to 1e-9 nm. May be empty.
std::vector<double> zeros_of_transmission(const SplitterModel& model,
                                          double band_lo_nm,
                                          double band_hi_nm);

// Flat parameter record. The phase coefficient is re-derived on load from
// the principal-branch calibration, so the three stored values round-trip
// a calibrated model exactly.
struct SplitterRecord {
  double reference_wavelength = 0.0;
  double reference_transmission = 0.0;
  double coupled_fraction = 1.0;
};

SplitterRecord to_record(const SplitterModel& model);
SplitterModel from_record(const SplitterRecord& record);

}  // namespace cvqkd
