#pragma once

#include <span>

#include "cvqkd/random.hpp"
#include "cvqkd/splitter.hpp"

namespace cvqkd {

// One optical pulse at the receiver. Quadrature means are bookkept in
// shot-noise units; the photon number is tracked independently (the local
// oscillator and fabricated pulses carry intensities that are unrelated to
// their quadrature bookkeeping).
struct CoherentPulse {
  double wavelength = 1550.0;  // nm
  double mean_x = 0.0;
  double mean_p = 0.0;
  double photon_number = 0.0;  // |alpha|^2
};

struct QuadratureSample {
  double x = 0.0;
  double p = 0.0;
};

// Shot-noise conventions used throughout: the vacuum quadrature variance is
// the unit, and a dual-quadrature measurement scales by 1/sqrt(2) while
// adding one vacuum unit per quadrature.
struct NoiseConvention {
  static constexpr double vacuum_variance = 1.0;
  static constexpr double heterodyne_scale = 0.70710678118654752440;
};

// Dual-quadrature (heterodyne) measurement of a state whose intrinsic noise
// is already part of the input: out = (in + n) / sqrt(2), n ~ N(0, 1) per
// quadrature. Var(out) = (Var(in) + 1) / 2.
QuadratureSample heterodyne(const QuadratureSample& input, ShotRng& rng);

// Response coefficients of the balanced detector pairs for a pulse whose
// wavelength sees main-splitter transmission T. The same-port pulse enters
// with (+x, +p), the oscillator-port pulse with the sign flipped.
struct ResponseCoefficients {
  double x = 0.0;  // (1 - T) * (1 - 2T)
  double p = 0.0;  // T * (1 - 2T)
};
ResponseCoefficients response_coefficients(double transmission);

// Quadratic noise weights of the residual detection noise for one pulse of
// unit transmitted intensity.
double noise_coefficient_x(double transmission);
double noise_coefficient_p(double transmission);

// Residual noise variances (V_NB,x, V_NB,p) of the dual-wavelength response
// for transmitted intensities i_sig, i_lo against a reference oscillator of
// lo_photon_ref photons.
struct ResidualNoise {
  double x = 0.0;
  double p = 0.0;
};
ResidualNoise residual_noise_variance(double t_sig, double t_lo, double i_sig,
                                      double i_lo, double lo_photon_ref);

// Detector output when the incident pulses carry pairwise distinct
// wavelengths: no beat terms survive, the balanced outputs become intensity
// offsets plus Gaussian residual noise. Pulse photon numbers are the
// intensities transmitted past the monitoring tap. The ancilla port is
// special: parked on a transmission null of the main splitter (T < 1e-9) it
// contributes nothing to either quadrature, which is what lets it top up
// the monitor invisibly. Throws std::invalid_argument when two pulses share
// a wavelength within 1e-6 nm (interference is not modeled).
QuadratureSample fake_pulse_response(const CoherentPulse& sig,
                                     const CoherentPulse& lo,
                                     const CoherentPulse& ancilla,
                                     const SplitterModel& main,
                                     double lo_photon_ref, ShotRng& rng);

// Photon count seen by the monitoring detector: sum over pulses of
// (1 - T'(lambda)) * photon_number, with shot-noise-limited fluctuation
// (Gaussian, variance equal to the mean) and clamped at zero. Pulse photon
// numbers here are source intensities at the receiver input.
double monitor_reading(std::span<const CoherentPulse> pulses,
                       const SplitterModel& main, const SplitterModel& monitor,
                       ShotRng& rng);

}  // namespace cvqkd
