#pragma once

#include <optional>
#include <string>

namespace cvqkd {

// Closed-form security quantities of the heterodyne protocol under
// Heisenberg-limited individual attacks. All noise figures are in shot-noise
// units; V = V_A + 1 is the total modulated variance.
//
// Direct reconciliation can only be secure for eta > 2/3: below that the
// channel's own loss already exceeds the tolerable added noise.
inline constexpr double kDrMinTransmission = 2.0 / 3.0;

// chi = (1 - eta)/eta + epsilon, the channel-referred added noise.
double total_added_noise(double eta, double excess_noise);

double eta_from_loss_db(double loss_db);
double loss_db_from_eta(double eta);

// Secret key rates (bits per pulse, may be negative).
double key_rate_dr(double v, double eta, double chi);
double key_rate_rr(double v, double eta, double chi);

// Largest added noise with a non-negative key rate.
double chi_max_dr(double eta);
double chi_max_rr(double eta, double v);

// Conditional variances of the undisturbed Gaussian channel.
double v_ab_normal(double v, double eta, double chi);
double v_ba_normal(double eta, double chi);

// Security thresholds: the normal-channel conditional variances evaluated at
// the largest tolerable added noise.
double v_ab_max(double v, double eta);
double v_ba_max(double v, double eta);

// Conditional variances when an interceptor resends through the
// dual-wavelength receiver with residual noise vnb.
double v_ab_attack(double v, double eta, double vnb);
double v_ba_attack(double eta, double vnb);

enum class Verdict { secure, insecure, inapplicable };

std::string to_string(Verdict verdict);

struct SecurityReport {
  double v = 0.0;
  double eta = 0.0;
  double excess_noise = 0.0;
  double vnb = 0.0;
  double chi = 0.0;
  double key_rate_dr = 0.0;
  double key_rate_rr = 0.0;
  double v_ab_normal = 0.0;
  double v_ba_normal = 0.0;
  double v_ab_attack = 0.0;
  double v_ba_attack = 0.0;
  double v_ab_max = 0.0;
  double v_ba_max = 0.0;
  std::optional<double> v_ab_measured;
  std::optional<double> v_ba_measured;
  Verdict verdict_dr = Verdict::inapplicable;
  Verdict verdict_rr = Verdict::insecure;
};

// Assembles the full report. Verdicts compare the measured conditional
// variances against the thresholds when measurements are supplied, and the
// attack predictions otherwise. Direct reconciliation is marked inapplicable
// for eta <= 2/3.
SecurityReport security_verdict(double v, double eta, double excess_noise,
                                double vnb,
                                std::optional<double> measured_v_ab = {},
                                std::optional<double> measured_v_ba = {});

}  // namespace cvqkd
