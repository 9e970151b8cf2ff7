#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvqkd/io.hpp"
#include "cvqkd/splitter.hpp"

using namespace cvqkd;

namespace {

SplitterModel main_coupler() { return SplitterModel::calibrated(1550.0, 0.5); }
SplitterModel tap_coupler() { return SplitterModel::calibrated(1550.0, 0.9); }

}  // namespace

TEST_SUITE("splitter") {

TEST_CASE("calibration point is reproduced exactly") {
  const SplitterModel model = main_coupler();
  CHECK(std::abs(model.transmission(1550.0) - 0.5) < 1e-12);
  CHECK(std::abs(tap_coupler().transmission(1550.0) - 0.9) < 1e-12);
}

TEST_CASE("transmission peaks where the phase doubles to pi/2") {
  // Doubling the reference phase pi/4 needs lambda^(5/2) to double.
  const double lambda = 1550.0 * std::pow(2.0, 0.4);
  CHECK(lambda == doctest::Approx(2045.2).epsilon(1e-4));
  CHECK(main_coupler().transmission(lambda) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("transmission vanishes at integer multiples of pi") {
  const SplitterModel model = main_coupler();
  const double lambda =
      std::pow(std::numbers::pi / model.phase_coefficient, 0.4);
  CHECK(model.transmission(lambda) < 1e-12);
}

TEST_CASE("transmission stays within [0, coupled_fraction]") {
  const SplitterModel model = SplitterModel::calibrated(1550.0, 0.4, 0.9);
  for (double lambda = 300.0; lambda < 6000.0; lambda += 7.3) {
    const double t = model.transmission(lambda);
    CHECK(t >= 0.0);
    CHECK(t <= 0.9 + 1e-15);
  }
}

TEST_CASE("non-positive wavelengths are rejected") {
  CHECK_THROWS_AS(main_coupler().transmission(0.0), std::domain_error);
  CHECK_THROWS_AS(main_coupler().transmission(-1550.0), std::domain_error);
}

TEST_CASE("inversion returns the calibration wavelength") {
  const double lambda =
      wavelength_for_transmission(main_coupler(), 0.5, 0, true);
  CHECK(lambda == doctest::Approx(1550.0).epsilon(1e-10));
}

TEST_CASE("inversion finds the first transmission null") {
  const SplitterModel model = main_coupler();
  const double lambda = wavelength_for_transmission(model, 0.0, 1, true);
  const double expected =
      std::pow(std::numbers::pi / model.phase_coefficient, 0.4);
  CHECK(lambda == doctest::Approx(expected).epsilon(1e-10));
  CHECK(model.transmission(lambda) < 1e-12);
}

TEST_CASE("targets above the coupled fraction are infeasible") {
  const SplitterModel weak = SplitterModel::calibrated(1550.0, 0.5, 0.9);
  CHECK_THROWS_AS(wavelength_for_transmission(weak, 0.95, 0, true),
                  std::domain_error);
}

TEST_CASE("round trip holds on every branch and slope") {
  const SplitterModel model = main_coupler();
  for (int branch : {0, 1, 2}) {
    for (bool rising : {true, false}) {
      for (int step = 0; step <= 20; ++step) {
        const double target = step / 20.0;
        if (branch == 0 && rising && target == 0.0) continue;  // lambda -> 0
        const double lambda =
            wavelength_for_transmission(model, target, branch, rising);
        CHECK(std::abs(model.transmission(lambda) - target) <= 1e-9);
      }
    }
  }
}

TEST_CASE("rising and falling solutions bracket the branch peak") {
  const SplitterModel model = main_coupler();
  const double up = wavelength_for_transmission(model, 0.3, 1, true);
  const double down = wavelength_for_transmission(model, 0.3, 1, false);
  const double peak = wavelength_for_transmission(model, 1.0, 1, true);
  CHECK(up < peak);
  CHECK(down > peak);
}

TEST_CASE("transmission is invariant under phase shifts of pi") {
  const SplitterModel model = main_coupler();
  for (double target : {0.12, 0.47, 0.81}) {
    const double l0 = wavelength_for_transmission(model, target, 0, true);
    const double l1 = wavelength_for_transmission(model, target, 1, true);
    const double l2 = wavelength_for_transmission(model, target, 2, true);
    CHECK(std::abs(model.transmission(l0) - model.transmission(l1)) < 1e-9);
    CHECK(std::abs(model.transmission(l1) - model.transmission(l2)) < 1e-9);
  }
}

TEST_CASE("monitor tap at the calibration point reads 0.9") {
  CHECK(std::abs(monitor_transmission(main_coupler(), tap_coupler(), 1550.0) -
                 0.9) < 1e-12);
}

TEST_CASE("monitor tap at the main peak is 0.36") {
  // Main phase pi/2 puts the tap phase at 2*asin(sqrt(0.9)), whose sine is
  // exactly 2*sqrt(0.09) = 0.6.
  const double lambda = 1550.0 * std::pow(2.0, 0.4);
  CHECK(std::abs(monitor_transmission(main_coupler(), tap_coupler(), lambda) -
                 0.36) < 1e-9);
}

TEST_CASE("monitor tap matches the arcsin value map on the principal branch") {
  const SplitterModel main = main_coupler();
  const SplitterModel tap = tap_coupler();
  const double a0 = std::asin(std::sqrt(0.5));
  const double b0 = std::asin(std::sqrt(0.9));
  for (int i = 1; i <= 50; ++i) {
    // Wavelengths with main phase in (0, pi/2].
    const double phase = 0.5 * std::numbers::pi * i / 50.0;
    const double lambda = std::pow(phase / main.phase_coefficient, 0.4);
    const double mapped = std::pow(
        std::sin(std::asin(std::sqrt(main.transmission(lambda))) / a0 * b0),
        2.0);
    CHECK(std::abs(monitor_transmission(main, tap, lambda) - mapped) <= 1e-12);
  }
}

TEST_CASE("monitor tap requires a shared calibration wavelength") {
  const SplitterModel other = SplitterModel::calibrated(1310.0, 0.9);
  CHECK_THROWS_AS(monitor_transmission(main_coupler(), other, 1550.0),
                  std::invalid_argument);
}

TEST_CASE("zeros in a wide band include the closed-form null") {
  const SplitterModel model = main_coupler();
  const auto zeros = zeros_of_transmission(model, 1200.0, 4000.0);
  REQUIRE(zeros.size() == 2);
  const double z1 = std::pow(std::numbers::pi / model.phase_coefficient, 0.4);
  CHECK(std::abs(zeros[0] - z1) <= 1e-9);
  CHECK(zeros[0] < zeros[1]);
  for (double z : zeros) CHECK(model.transmission(z) < 1e-12);
}

TEST_CASE("the telecom window contains no transmission null") {
  CHECK(zeros_of_transmission(main_coupler(), 1540.0, 1560.0).empty());
}

TEST_CASE("a tight band around a null returns exactly that null") {
  const SplitterModel model = main_coupler();
  const double z = zeros_of_transmission(model, 1200.0, 4000.0)[0];
  const auto zeros = zeros_of_transmission(model, z - 1.0, z + 1.0);
  REQUIRE(zeros.size() == 1);
  CHECK(std::abs(zeros[0] - z) <= 1e-9);
}

TEST_CASE("transmission is Lipschitz on the search band") {
  const SplitterModel model = main_coupler();
  // |dT/dlambda| <= F^2 * 2.5 * A * lambda^1.5 over the band.
  const double band_hi = 2100.0;
  const double lipschitz = 1.05 * 2.5 * model.phase_coefficient *
                           std::pow(band_hi, 1.5);
  const double delta = 0.05;
  for (double lambda = 1200.0; lambda < band_hi - delta; lambda += 1.7) {
    const double jump =
        std::abs(model.transmission(lambda + delta) - model.transmission(lambda));
    CHECK(jump <= lipschitz * delta);
  }
}

TEST_CASE("parameter record round-trips exactly") {
  const SplitterModel model = SplitterModel::calibrated(1550.0, 0.9, 0.95);
  const SplitterModel back =
      from_record(splitter_record_from_json(splitter_record_to_json(
          to_record(model))));
  CHECK(back.reference_wavelength == model.reference_wavelength);
  CHECK(back.reference_transmission == model.reference_transmission);
  CHECK(back.coupled_fraction == model.coupled_fraction);
  CHECK(back.phase_coefficient == model.phase_coefficient);
}

}  // TEST_SUITE
