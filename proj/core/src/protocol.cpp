#include "cvqkd/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <thread>

namespace cvqkd {

SplitterModel ScenarioConfig::main_splitter() const {
  return SplitterModel::calibrated(reference_wavelength,
                                   main_reference_transmission,
                                   coupled_fraction);
}

SplitterModel ScenarioConfig::monitor_splitter() const {
  return SplitterModel::calibrated(reference_wavelength,
                                   monitor_reference_transmission,
                                   coupled_fraction);
}

void ScenarioConfig::validate() const {
  std::ostringstream problems;
  auto reject = [&problems](const char* message) {
    if (problems.tellp() > 0) problems << "; ";
    problems << message;
  };
  if (!(modulation_variance > 0.0)) reject("modulation_variance must be > 0");
  if (!(channel_transmission > 0.0) || channel_transmission > 1.0) {
    reject("channel_transmission must lie in (0, 1]");
  }
  if (!(excess_noise >= 0.0)) reject("excess_noise must be >= 0");
  if (!(lo_photons > 0.0)) reject("lo_photons must be > 0");
  if (!(intensity_cap > 0.0) || intensity_cap > 0.01 * lo_photons) {
    reject("intensity_cap must be positive and at most 0.01 * lo_photons");
  }
  if (shots < 1) reject("shots must be >= 1");
  if (filter_probability < 0.0 || filter_probability > 1.0) {
    reject("filter_probability must lie in [0, 1]");
  }
  if (!(filter_passband.lo > 0.0) ||
      !(filter_passband.hi >= filter_passband.lo)) {
    reject("filter_passband must be a non-empty positive band");
  }
  if (!(monitor_tolerance > 0.0)) reject("monitor_tolerance must be > 0");
  if (threads < 0) reject("threads must be >= 0");
  if (!(detector_efficiency > 0.0) || detector_efficiency > 1.0) {
    reject("detector_efficiency must lie in (0, 1]");
  }
  if (!(reference_wavelength > 0.0)) reject("reference_wavelength must be > 0");
  if (!(coupled_fraction > 0.0) || coupled_fraction > 1.0) {
    reject("coupled_fraction must lie in (0, 1]");
  }
  if (!(main_reference_transmission >= 0.0) ||
      main_reference_transmission > coupled_fraction) {
    reject("main_reference_transmission must lie in [0, coupled_fraction]");
  }
  if (!(monitor_reference_transmission >= 0.0) ||
      monitor_reference_transmission > coupled_fraction) {
    reject("monitor_reference_transmission must lie in [0, coupled_fraction]");
  }
  if (problems.tellp() > 0) {
    throw ConfigError(problems.str());
  }
}

QuadratureSample alice_prepare(double v_a, ShotRng& rng) {
  if (!(v_a > 0.0)) {
    throw std::domain_error("modulation variance must be positive");
  }
  const double sigma = std::sqrt(v_a);
  return {sigma * rng.normal(), sigma * rng.normal()};
}

QuadratureSample channel_transmit(const QuadratureSample& input, double eta,
                                  double excess_noise, ShotRng& rng) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw std::domain_error("channel transmission must lie in (0, 1]");
  }
  if (!(excess_noise >= 0.0)) {
    throw std::domain_error("excess noise must be non-negative");
  }
  const double root_eta = std::sqrt(eta);
  const double noise_var = (1.0 - eta) + eta * excess_noise;
  const double sigma = std::sqrt(noise_var);
  return {root_eta * input.x + sigma * rng.normal(),
          root_eta * input.p + sigma * rng.normal()};
}

bool monitor_check(std::span<const double> readings, double expected,
                   double tolerance) {
  if (readings.empty()) {
    throw std::invalid_argument("monitor check needs at least one reading");
  }
  double sum = 0.0;
  for (double reading : readings) sum += reading;
  const double mean = sum / static_cast<double>(readings.size());
  return std::abs(mean - expected) <= tolerance * expected;
}

ProtocolEngine::ProtocolEngine(const ScenarioConfig& config)
    : config_(config) {
  config_.validate();
  main_ = config_.main_splitter();
  monitor_ = config_.monitor_splitter();
  expected_monitor_ =
      (1.0 - config_.monitor_reference_transmission) * config_.lo_photons;
  if (config_.attack_enabled) {
    solver_ = std::make_unique<AttackSolver>(
        main_, monitor_, config_.lo_photons, config_.intensity_cap,
        config_.attack_search);
  }
}

ProtocolEngine::~ProtocolEngine() = default;

ShotOutcome ProtocolEngine::run_shot(std::uint64_t index) const {
  ShotRng rng(config_.seed, index);
  // Fixed draw order per shot: modulation, intrinsic state noise, filter
  // coin, then the mode-specific draws. Reordering would silently change
  // every seeded result.
  const QuadratureSample alice = alice_prepare(config_.modulation_variance, rng);
  const QuadratureSample state = {alice.x + rng.normal(),
                                  alice.p + rng.normal()};
  const bool filter_fired = rng.uniform() < config_.filter_probability;
  if (config_.attack_enabled) {
    return run_attack_shot(rng, alice, state, filter_fired);
  }
  return run_normal_shot(rng, alice, state, filter_fired);
}

ShotOutcome ProtocolEngine::run_normal_shot(ShotRng& rng,
                                            const QuadratureSample& alice,
                                            const QuadratureSample& state,
                                            bool filter_fired) const {
  ShotOutcome outcome;
  outcome.record.alice_x = alice.x;
  outcome.record.alice_p = alice.p;
  outcome.record.filtered = filter_fired;

  QuadratureSample received = channel_transmit(
      state, config_.channel_transmission, config_.excess_noise, rng);
  if (config_.detector_efficiency < 1.0) {
    // Detector loss as vacuum substitution in front of the readout.
    const double root_e = std::sqrt(config_.detector_efficiency);
    const double root_loss = std::sqrt(1.0 - config_.detector_efficiency);
    received.x = root_e * received.x + root_loss * rng.normal();
    received.p = root_e * received.p + root_loss * rng.normal();
  }
  const QuadratureSample measured = heterodyne(received, rng);
  outcome.record.bob_x = measured.x;
  outcome.record.bob_p = measured.p;

  // Signal and oscillator share the calibration wavelength, so the ideal
  // passband filter leaves the genuine pulses untouched.
  std::array<CoherentPulse, 2> pulses = {
      CoherentPulse{config_.reference_wavelength, alice.x, alice.p,
                    (alice.x * alice.x + alice.p * alice.p) / 4.0},
      CoherentPulse{config_.reference_wavelength, 0.0, 0.0,
                    config_.lo_photons}};
  std::array<CoherentPulse, 2> surviving = pulses;
  std::size_t count = 0;
  for (const CoherentPulse& pulse : pulses) {
    if (!filter_fired || config_.filter_passband.contains(pulse.wavelength)) {
      surviving[count++] = pulse;
    }
  }
  outcome.record.monitor = monitor_reading(
      std::span<const CoherentPulse>(surviving.data(), count), main_, monitor_,
      rng);
  return outcome;
}

ShotOutcome ProtocolEngine::run_attack_shot(ShotRng& rng,
                                            const QuadratureSample& alice,
                                            const QuadratureSample& state,
                                            bool filter_fired) const {
  ShotOutcome outcome;
  outcome.record.alice_x = alice.x;
  outcome.record.alice_p = alice.p;
  outcome.record.filtered = filter_fired;

  const double eta = config_.channel_transmission;
  const double root_eta = std::sqrt(eta);

  // Interception happens at the sender's output; the channel is replaced by
  // a lossless link and the expected transmission is emulated in the resent
  // values.
  QuadratureSample eve = eve_intercept(state, rng);

  double pad_variance = 0.0;
  if (config_.noise_padding_enabled) {
    // Pad against the residual noise the unpadded target would suffer, then
    // re-solve for the padded target.
    const SolveOutcome probe =
        solver_->solve({root_eta * eve.x, root_eta * eve.p});
    const double vnb_probe =
        probe.feasible ? std::max(probe.solution.vnb_x, probe.solution.vnb_p)
                       : 1.0;
    pad_variance = noise_padding_variance(eta, config_.excess_noise, vnb_probe);
  }
  const double pad_sigma = std::sqrt(pad_variance);
  eve.x += pad_sigma * rng.normal();
  eve.p += pad_sigma * rng.normal();
  outcome.pad_variance = pad_variance;

  const TargetQuadratures target = {root_eta * eve.x, root_eta * eve.p};
  outcome.record.eve_x = target.x;
  outcome.record.eve_p = target.p;

  const SolveOutcome solve = solver_->solve(target);

  if (!solve.feasible) {
    // Out-of-reach target: plain intercept-resend at the genuine
    // wavelengths. The resent state centres the receiver's dual-quadrature
    // readout on the target at the cost of one full vacuum unit.
    outcome.record.attack_fallback = true;
    outcome.vnb_x = 1.0;
    outcome.vnb_p = 1.0;
    const double s = NoiseConvention::heterodyne_scale;
    const QuadratureSample resent = {target.x / s + rng.normal(),
                                     target.p / s + rng.normal()};
    const QuadratureSample measured = heterodyne(resent, rng);
    outcome.record.bob_x = measured.x;
    outcome.record.bob_p = measured.p;
    std::array<CoherentPulse, 2> pulses = {
        CoherentPulse{config_.reference_wavelength, resent.x, resent.p,
                      (resent.x * resent.x + resent.p * resent.p) / 4.0},
        CoherentPulse{config_.reference_wavelength, 0.0, 0.0,
                      config_.lo_photons}};
    std::array<CoherentPulse, 2> surviving = pulses;
    std::size_t count = 0;
    for (const CoherentPulse& pulse : pulses) {
      if (!filter_fired ||
          config_.filter_passband.contains(pulse.wavelength)) {
        surviving[count++] = pulse;
      }
    }
    outcome.record.monitor = monitor_reading(
        std::span<const CoherentPulse>(surviving.data(), count), main_,
        monitor_, rng);
    return outcome;
  }

  const AttackSolution& solution = solve.solution;
  outcome.vnb_x = solution.vnb_x;
  outcome.vnb_p = solution.vnb_p;

  // Detection side carries transmitted intensities; a filtered-out pulse is
  // replaced by a dark placeholder at its own wavelength.
  auto keep = [&](double wavelength) {
    return !filter_fired || config_.filter_passband.contains(wavelength);
  };
  CoherentPulse sig{solution.lambda_sig, 0.0, 0.0,
                    keep(solution.lambda_sig) ? solution.i_sig : 0.0};
  CoherentPulse osc{solution.lambda_lo, 0.0, 0.0,
                    keep(solution.lambda_lo) ? solution.i_lo : 0.0};
  CoherentPulse anc{solution.lambda_ancilla, 0.0, 0.0,
                    keep(solution.lambda_ancilla)
                        ? solution.tp_ancilla * solution.i_ancilla_source
                        : 0.0};
  const QuadratureSample measured =
      fake_pulse_response(sig, osc, anc, main_, config_.lo_photons, rng);
  outcome.record.bob_x = measured.x;
  outcome.record.bob_p = measured.p;

  // Monitor side carries source intensities.
  std::array<CoherentPulse, 3> sources = {
      CoherentPulse{solution.lambda_sig, 0.0, 0.0, solution.source_sig()},
      CoherentPulse{solution.lambda_lo, 0.0, 0.0, solution.source_lo()},
      CoherentPulse{solution.lambda_ancilla, 0.0, 0.0,
                    solution.i_ancilla_source}};
  std::array<CoherentPulse, 3> surviving;
  std::size_t count = 0;
  for (const CoherentPulse& pulse : sources) {
    if (keep(pulse.wavelength)) surviving[count++] = pulse;
  }
  outcome.record.monitor = monitor_reading(
      std::span<const CoherentPulse>(surviving.data(), count), main_, monitor_,
      rng);
  return outcome;
}

std::vector<ShotOutcome> ProtocolEngine::run_all() const {
  const std::size_t total = static_cast<std::size_t>(config_.shots);
  std::vector<ShotOutcome> outcomes(total);
  unsigned workers = config_.threads > 0
                         ? static_cast<unsigned>(config_.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, 64);
  if (workers <= 1 || total < 2048) {
    for (std::size_t i = 0; i < total; ++i) {
      outcomes[i] = run_shot(i);
    }
    return outcomes;
  }
  // Static index partition; results are identical for any worker count
  // because every shot owns its substream.
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([this, &outcomes, total, workers, w] {
      for (std::size_t i = w; i < total; i += workers) {
        outcomes[i] = run_shot(i);
      }
    });
  }
  for (std::thread& worker : pool) worker.join();
  return outcomes;
}

}  // namespace cvqkd
