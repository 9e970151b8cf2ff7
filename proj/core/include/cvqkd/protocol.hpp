#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cvqkd/attack.hpp"
#include "cvqkd/detection.hpp"
#include "cvqkd/random.hpp"
#include "cvqkd/splitter.hpp"

namespace cvqkd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FilterBand {
  double lo = 1549.0;  // nm
  double hi = 1551.0;
  bool contains(double wavelength_nm) const {
    return wavelength_nm >= lo && wavelength_nm <= hi;
  }
};

// Full experiment description; every run is a pure function of this struct.
struct ScenarioConfig {
  double modulation_variance = 10.0;  // V_A; total state variance V = V_A + 1
  double channel_transmission = 1.0;  // eta in (0, 1]
  double excess_noise = 0.01;         // shot-noise units
  double lo_photons = 1e8;            // oscillator photons at the receiver
  double intensity_cap = 1e6;         // max transmitted fake-pulse intensity
  long long shots = 100000;
  std::uint64_t seed = 42;
  bool attack_enabled = false;
  double filter_probability = 0.0;  // per-shot chance the filter is inserted
  FilterBand filter_passband{};
  double monitor_tolerance = 0.01;  // relative alarm band
  bool noise_padding_enabled = false;
  int threads = 0;  // 0 = hardware concurrency
  // Wavelength-independent efficiency of the receiver's detectors. In
  // attacked rounds the interceptor absorbs it into the resent intensities,
  // so only genuine detection feels it.
  double detector_efficiency = 1.0;

  // Receiver optics.
  double reference_wavelength = 1550.0;
  double main_reference_transmission = 0.5;
  double monitor_reference_transmission = 0.9;
  double coupled_fraction = 1.0;
  AttackSearchConfig attack_search{};

  double v() const { return modulation_variance + 1.0; }
  SplitterModel main_splitter() const;
  SplitterModel monitor_splitter() const;
  void validate() const;  // throws ConfigError
};

// One protocol round. Interceptor fields are engaged only in attacked runs.
struct ShotRecord {
  double alice_x = 0.0;
  double alice_p = 0.0;
  double bob_x = 0.0;
  double bob_p = 0.0;
  std::optional<double> eve_x;  // resent target quadratures
  std::optional<double> eve_p;
  double monitor = 0.0;
  bool filtered = false;
  bool attack_fallback = false;
};

// Per-shot extras the summary needs but the record schema does not carry.
struct ShotOutcome {
  ShotRecord record{};
  double vnb_x = 0.0;
  double vnb_p = 0.0;
  double pad_variance = 0.0;
};

// Gaussian modulation: independent zero-mean draws of variance v_a per
// quadrature.
QuadratureSample alice_prepare(double v_a, ShotRng& rng);

// Gaussian channel: out = sqrt(eta) * in + N(0, (1 - eta) + eta * epsilon)
// per quadrature. The input carries the state's intrinsic vacuum unit.
QuadratureSample channel_transmit(const QuadratureSample& input, double eta,
                                  double excess_noise, ShotRng& rng);

// Alarm test on the oscillator monitor: pass when the mean reading stays
// within tolerance * expected of the expected tap.
bool monitor_check(std::span<const double> readings, double expected,
                   double tolerance);

// Orchestrates rounds for one scenario. Every shot draws from its own
// (seed, index) substream, so any parallel schedule produces identical
// records.
class ProtocolEngine {
 public:
  explicit ProtocolEngine(const ScenarioConfig& config);
  ~ProtocolEngine();

  ShotOutcome run_shot(std::uint64_t index) const;
  std::vector<ShotOutcome> run_all() const;

  const ScenarioConfig& config() const { return config_; }
  const AttackSolver* solver() const { return solver_.get(); }
  double expected_monitor() const { return expected_monitor_; }

 private:
  ShotOutcome run_normal_shot(ShotRng& rng, const QuadratureSample& alice,
                              const QuadratureSample& state,
                              bool filter_fired) const;
  ShotOutcome run_attack_shot(ShotRng& rng, const QuadratureSample& alice,
                              const QuadratureSample& state,
                              bool filter_fired) const;

  ScenarioConfig config_;
  SplitterModel main_;
  SplitterModel monitor_;
  double expected_monitor_ = 0.0;
  std::unique_ptr<AttackSolver> solver_;
};

}  // namespace cvqkd
