#include "cvqkd/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvqkd {

namespace {

constexpr double kNullTransmission = 1e-9;
constexpr double kWavelengthResolution = 1e-6;  // nm

}  // namespace

QuadratureSample heterodyne(const QuadratureSample& input, ShotRng& rng) {
  const double s = NoiseConvention::heterodyne_scale;
  return {(input.x + rng.normal()) * s, (input.p + rng.normal()) * s};
}

ResponseCoefficients response_coefficients(double transmission) {
  const double t = transmission;
  return {(1.0 - t) * (1.0 - 2.0 * t), t * (1.0 - 2.0 * t)};
}

double noise_coefficient_x(double transmission) {
  const double t = transmission;
  const double u = 1.0 - t;
  const double d = 1.0 - 2.0 * t;
  return 4.0 * d * d * u + 16.0 * t * u * u;
}

double noise_coefficient_p(double transmission) {
  const double t = transmission;
  const double u = 1.0 - t;
  const double d = 1.0 - 2.0 * t;
  return 4.0 * d * d * t + 16.0 * t * t * u;
}

ResidualNoise residual_noise_variance(double t_sig, double t_lo, double i_sig,
                                      double i_lo, double lo_photon_ref) {
  if (!(lo_photon_ref > 0.0)) {
    throw std::domain_error("oscillator reference intensity must be positive");
  }
  ResidualNoise noise;
  noise.x = (noise_coefficient_x(t_sig) * i_sig +
             noise_coefficient_x(t_lo) * i_lo) /
            lo_photon_ref;
  noise.p = (noise_coefficient_p(t_sig) * i_sig +
             noise_coefficient_p(t_lo) * i_lo) /
            lo_photon_ref;
  return noise;
}

QuadratureSample fake_pulse_response(const CoherentPulse& sig,
                                     const CoherentPulse& lo,
                                     const CoherentPulse& ancilla,
                                     const SplitterModel& main,
                                     double lo_photon_ref, ShotRng& rng) {
  const CoherentPulse* pulses[3] = {&sig, &lo, &ancilla};
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      if (std::abs(pulses[a]->wavelength - pulses[b]->wavelength) <
          kWavelengthResolution) {
        throw std::invalid_argument(
            "fake pulses must carry pairwise distinct wavelengths");
      }
    }
  }
  if (!(lo_photon_ref > 0.0)) {
    throw std::domain_error("oscillator reference intensity must be positive");
  }

  const double t_sig = main.transmission(sig.wavelength);
  const double t_lo = main.transmission(lo.wavelength);
  const double t_anc = main.transmission(ancilla.wavelength);
  const double scale = 2.0 / std::sqrt(lo_photon_ref);

  const ResponseCoefficients cs = response_coefficients(t_sig);
  const ResponseCoefficients cl = response_coefficients(t_lo);
  double mean_x = scale * (cs.x * sig.photon_number - cl.x * lo.photon_number);
  double mean_p = scale * (cs.p * sig.photon_number - cl.p * lo.photon_number);

  ResidualNoise noise = residual_noise_variance(
      t_sig, t_lo, sig.photon_number, lo.photon_number, lo_photon_ref);

  // On its transmission null the ancilla never reaches the balanced
  // readout; off the null it acts like a third signal-port pulse.
  if (t_anc >= kNullTransmission) {
    const ResponseCoefficients ca = response_coefficients(t_anc);
    mean_x += scale * ca.x * ancilla.photon_number;
    mean_p += scale * ca.p * ancilla.photon_number;
    noise.x += noise_coefficient_x(t_anc) * ancilla.photon_number / lo_photon_ref;
    noise.p += noise_coefficient_p(t_anc) * ancilla.photon_number / lo_photon_ref;
  }

  return {mean_x + std::sqrt(noise.x) * rng.normal(),
          mean_p + std::sqrt(noise.p) * rng.normal()};
}

double monitor_reading(std::span<const CoherentPulse> pulses,
                       const SplitterModel& main, const SplitterModel& monitor,
                       ShotRng& rng) {
  double mean = 0.0;
  for (const CoherentPulse& pulse : pulses) {
    const double tp = monitor_transmission(main, monitor, pulse.wavelength);
    mean += (1.0 - tp) * pulse.photon_number;
  }
  const double reading = mean + std::sqrt(std::max(mean, 0.0)) * rng.normal();
  return std::max(reading, 0.0);
}

}  // namespace cvqkd
