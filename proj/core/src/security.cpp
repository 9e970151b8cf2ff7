#include "cvqkd/security.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqkd {

namespace {

void require_transmission(double eta) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw std::domain_error("channel transmission must lie in (0, 1]");
  }
}

void require_variance(double v) {
  if (!(v > 1.0)) {
    throw std::domain_error("total modulated variance must exceed 1");
  }
}

}  // namespace

double total_added_noise(double eta, double excess_noise) {
  require_transmission(eta);
  if (!(excess_noise >= 0.0)) {
    throw std::domain_error("excess noise must be non-negative");
  }
  return (1.0 - eta) / eta + excess_noise;
}

double eta_from_loss_db(double loss_db) {
  return std::pow(10.0, -loss_db / 10.0);
}

double loss_db_from_eta(double eta) {
  require_transmission(eta);
  return -10.0 * std::log10(eta);
}

double key_rate_dr(double v, double eta, double chi) {
  require_variance(v);
  require_transmission(eta);
  const double num = (1.0 + chi) * (1.0 + eta * (v + chi));
  const double den = (1.0 + chi * v) * (1.0 + eta * (1.0 + chi));
  return std::log2(num / den);
}

double key_rate_rr(double v, double eta, double chi) {
  require_variance(v);
  require_transmission(eta);
  const double num = v + eta * (1.0 + chi * v);
  const double den = eta * (1.0 + chi * v) * (1.0 + eta * (1.0 + chi));
  return std::log2(num / den);
}

double chi_max_dr(double eta) {
  require_transmission(eta);
  return (std::sqrt(4.0 * eta * eta + 1.0) - 1.0) / (2.0 * eta);
}

double chi_max_rr(double eta, double v) {
  require_transmission(eta);
  require_variance(v);
  const double root =
      std::sqrt((4.0 / (eta * eta) + 1.0) * v * v - 2.0 * v + 1.0);
  return (root - v - 1.0) / (2.0 * v);
}

double v_ab_normal(double v, double eta, double chi) {
  require_variance(v);
  require_transmission(eta);
  return (v - 1.0) * (eta * (chi + 1.0) + 1.0) / (eta * (v + chi) + 1.0);
}

double v_ba_normal(double eta, double chi) {
  require_transmission(eta);
  return 0.5 * (eta * (1.0 + chi) + 1.0);
}

double v_ab_max(double v, double eta) {
  require_variance(v);
  require_transmission(eta);
  const double root = std::sqrt(4.0 * eta * eta + 1.0);
  return (v - 1.0) * (root + 2.0 * eta + 1.0) / (root + 2.0 * eta * v + 1.0);
}

double v_ba_max(double v, double eta) {
  require_variance(v);
  require_transmission(eta);
  const double root =
      std::sqrt((4.0 + eta * eta) * v * v - 2.0 * eta * eta * v + eta * eta);
  return (root + (eta + 2.0) * v - eta) / (4.0 * v);
}

double v_ab_attack(double v, double eta, double vnb) {
  require_variance(v);
  require_transmission(eta);
  return 2.0 * (vnb + eta) * (v - 1.0) / (2.0 * vnb + eta * (v + 1.0));
}

double v_ba_attack(double eta, double vnb) {
  require_transmission(eta);
  return eta + vnb;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::secure:
      return "secure";
    case Verdict::insecure:
      return "insecure";
    case Verdict::inapplicable:
      return "dr-inapplicable";
  }
  return "unknown";
}

SecurityReport security_verdict(double v, double eta, double excess_noise,
                                double vnb, std::optional<double> measured_v_ab,
                                std::optional<double> measured_v_ba) {
  SecurityReport report;
  report.v = v;
  report.eta = eta;
  report.excess_noise = excess_noise;
  report.vnb = vnb;
  report.chi = total_added_noise(eta, excess_noise);
  report.key_rate_dr = key_rate_dr(v, eta, report.chi);
  report.key_rate_rr = key_rate_rr(v, eta, report.chi);
  report.v_ab_normal = v_ab_normal(v, eta, report.chi);
  report.v_ba_normal = v_ba_normal(eta, report.chi);
  report.v_ab_attack = v_ab_attack(v, eta, vnb);
  report.v_ba_attack = v_ba_attack(eta, vnb);
  report.v_ab_max = v_ab_max(v, eta);
  report.v_ba_max = v_ba_max(v, eta);
  report.v_ab_measured = measured_v_ab;
  report.v_ba_measured = measured_v_ba;

  const double used_ab = measured_v_ab.value_or(report.v_ab_attack);
  const double used_ba = measured_v_ba.value_or(report.v_ba_attack);
  report.verdict_dr = eta <= kDrMinTransmission
                          ? Verdict::inapplicable
                          : (used_ab < report.v_ab_max ? Verdict::secure
                                                       : Verdict::insecure);
  report.verdict_rr =
      used_ba < report.v_ba_max ? Verdict::secure : Verdict::insecure;
  return report;
}

}  // namespace cvqkd
