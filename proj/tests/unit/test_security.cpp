#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cvqkd/random.hpp"
#include "cvqkd/security.hpp"

using namespace cvqkd;

TEST_SUITE("security") {

TEST_CASE("added noise of clean and lossy channels") {
  CHECK(total_added_noise(1.0, 0.0) == 0.0);
  CHECK(total_added_noise(0.5, 0.01) == doctest::Approx(1.01).epsilon(1e-12));
  CHECK(total_added_noise(0.875, 0.01) ==
        doctest::Approx(0.152857142857142857).epsilon(1e-12));
  CHECK_THROWS_AS(total_added_noise(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(total_added_noise(1.2, 0.0), std::domain_error);
}

TEST_CASE("key rates of the lossless noiseless channel") {
  CHECK(key_rate_dr(11.0, 1.0, 0.0) ==
        doctest::Approx(std::log2(6.0)).epsilon(1e-12));
  CHECK(key_rate_rr(11.0, 1.0, 0.0) ==
        doctest::Approx(std::log2(6.0)).epsilon(1e-12));
}

TEST_CASE("direct-reconciliation rate vanishes at its noise ceiling") {
  for (double eta : {0.7, 0.8, 0.99}) {
    for (double v : {5.0, 11.0, 40.0}) {
      CHECK(std::abs(key_rate_dr(v, eta, chi_max_dr(eta))) <= 1e-9);
    }
  }
}

TEST_CASE("noise ceilings at the branch endpoints") {
  CHECK(chi_max_dr(2.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(chi_max_dr(1.0) ==
        doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
  CHECK(chi_max_rr(1.0, 11.0) ==
        doctest::Approx((std::sqrt(584.0) - 12.0) / 22.0).epsilon(1e-12));
}

TEST_CASE("reverse-reconciliation rate vanishes at its noise ceiling") {
  for (double eta : {0.1, 0.45, 0.9}) {
    for (double v : {5.0, 11.0, 40.0}) {
      CHECK(std::abs(key_rate_rr(v, eta, chi_max_rr(eta, v))) <= 1e-9);
    }
  }
}

TEST_CASE("normal conditional variances at the clean point") {
  CHECK(v_ab_normal(11.0, 1.0, 0.0) ==
        doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(v_ba_normal(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("receiver-side normal variance equals 1 + eta*eps/2") {
  ShotRng rng(201, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const double eta = 0.2 + 0.79 * rng.uniform();
    const double eps = 0.05 * rng.uniform();
    const double chi = total_added_noise(eta, eps);
    CHECK(std::abs(v_ba_normal(eta, chi) - (1.0 + eta * eps / 2.0)) <= 1e-12);
  }
}

TEST_CASE("frozen threshold values at the lossless point") {
  CHECK(v_ab_max(11.0, 1.0) ==
        doctest::Approx(10.0 * (std::sqrt(5.0) + 3.0) / (std::sqrt(5.0) + 23.0))
            .epsilon(1e-12));
  CHECK(v_ba_max(11.0, 1.0) ==
        doctest::Approx((std::sqrt(584.0) + 32.0) / 44.0).epsilon(1e-12));
}

TEST_CASE("thresholds coincide with normal curves at the noise ceilings") {
  for (int i = 0; i < 10; ++i) {
    const double v = 2.0 + (100.0 - 2.0) * i / 9.0;
    for (int j = 0; j < 10; ++j) {
      const double eta_dr = 0.67 + (0.99 - 0.67) * j / 9.0;
      CHECK(std::abs(v_ab_max(v, eta_dr) -
                     v_ab_normal(v, eta_dr, chi_max_dr(eta_dr))) <= 1e-9);
      const double eta_rr = 0.05 + (0.99 - 0.05) * j / 9.0;
      CHECK(std::abs(v_ba_max(v, eta_rr) -
                     v_ba_normal(eta_rr, chi_max_rr(eta_rr, v))) <= 1e-9);
    }
  }
}

TEST_CASE("attack variances at frozen points") {
  CHECK(v_ab_attack(11.0, 1.0, 0.13) ==
        doctest::Approx(22.6 / 12.26).epsilon(1e-12));
  CHECK(v_ba_attack(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  // At the edge of the DR window the attack curve stays below 1.95.
  const double edge = v_ab_attack(11.0, 2.0 / 3.0, 0.13);
  CHECK(edge == doctest::Approx(1.92897497982).epsilon(1e-9));
  CHECK(edge <= 1.95);
}

TEST_CASE("attack curves stay below the thresholds across both windows") {
  for (int i = 1; i < 200; ++i) {
    const double eta_dr = 2.0 / 3.0 + (1.0 - 2.0 / 3.0) * i / 200.0;
    CHECK(v_ab_attack(11.0, eta_dr, 0.13) < v_ab_max(11.0, eta_dr));
  }
  for (int i = 1; i < 200; ++i) {
    const double eta_rr = 0.05 + (1.0 - 0.05) * i / 200.0;
    CHECK(v_ba_attack(eta_rr, 0.13) < v_ba_max(11.0, eta_rr));
  }
}

TEST_CASE("verdicts: the attacked channel still reports secure") {
  const SecurityReport report = security_verdict(11.0, 0.875, 0.01, 0.13);
  CHECK(report.verdict_dr == Verdict::secure);
  CHECK(report.verdict_rr == Verdict::secure);
}

TEST_CASE("verdicts: a measurement above the threshold is insecure") {
  const SecurityReport report =
      security_verdict(11.0, 0.875, 0.01, 0.13, 5.0, 5.0);
  CHECK(report.verdict_dr == Verdict::insecure);
  CHECK(report.verdict_rr == Verdict::insecure);
}

TEST_CASE("verdicts: direct reconciliation is inapplicable at eta = 0.5") {
  const SecurityReport report = security_verdict(11.0, 0.5, 0.01, 0.13);
  CHECK(report.verdict_dr == Verdict::inapplicable);
  CHECK(to_string(report.verdict_dr) == "dr-inapplicable");
}

TEST_CASE("loss/transmission conversions invert each other") {
  for (double eta : {1.0, 0.875, 0.5, 0.1}) {
    CHECK(eta_from_loss_db(loss_db_from_eta(eta)) ==
          doctest::Approx(eta).epsilon(1e-12));
  }
  CHECK(loss_db_from_eta(0.5) == doctest::Approx(3.0102999566).epsilon(1e-9));
}

}  // TEST_SUITE
