// Command-line front end: Monte Carlo runs, analytic sweeps, reachable-region
// rasters, bound checks and a self-test suite. Data goes to --out (or
// stdout); progress and summaries go to stderr so CSV can be piped.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvqkd/attack.hpp"
#include "cvqkd/io.hpp"
#include "cvqkd/simulation.hpp"

namespace {

using namespace cvqkd;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitSelfTestFailure = 2;

// Grid spec: "start:stop:step", a comma list, or a single value.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
        !(step > 0.0) || stop < start) {
      throw ConfigError("bad grid spec '" + spec + "', want start:stop:step");
    }
    for (double value = start; value <= stop + 1e-12 * step; value += step) {
      grid.push_back(value);
    }
    return grid;
  }
  std::stringstream stream(spec);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad grid entry '" + item + "'");
    }
  }
  if (grid.empty()) throw ConfigError("empty grid spec");
  return grid;
}

class DataSink {
 public:
  explicit DataSink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  ~DataSink() {
    if (file_) file_->flush();
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct SimulateOptions {
  std::string config_path;
  std::string out = "-";
  std::string format = "csv";
  std::string report_path;
  std::optional<std::uint64_t> seed;
  std::optional<long long> shots;
  std::optional<double> loss_db;
  std::optional<double> eta;
  std::optional<double> filter_prob;
  std::optional<int> threads;
  bool attack = false;
  bool padding = false;
};

int run_simulate(const SimulateOptions& opt) {
  ScenarioConfig config;
  if (!opt.config_path.empty()) {
    config = load_scenario_config(opt.config_path);
  }
  if (opt.seed) config.seed = *opt.seed;
  if (opt.shots) config.shots = *opt.shots;
  if (opt.loss_db && opt.eta) {
    throw ConfigError("give either --loss-db or --eta, not both");
  }
  if (opt.loss_db) {
    config.channel_transmission = std::pow(10.0, -*opt.loss_db / 10.0);
  }
  if (opt.eta) config.channel_transmission = *opt.eta;
  if (opt.filter_prob) config.filter_probability = *opt.filter_prob;
  if (opt.threads) config.threads = *opt.threads;
  if (opt.attack) config.attack_enabled = true;
  if (opt.padding) config.noise_padding_enabled = true;
  config.validate();

  std::cerr << "simulate: " << config.shots << " shots, eta="
            << config.channel_transmission
            << (config.attack_enabled ? ", attack on" : ", attack off")
            << (config.filter_probability > 0.0 ? ", filter armed" : "")
            << "\n";

  const RunResult result = run_scenario(config);

  DataSink sink(opt.out);
  if (opt.format == "csv") {
    write_records_csv(sink.stream(), result.records);
  } else if (opt.format == "json") {
    sink.stream() << "{\n\"config\": " << scenario_to_json(result.config)
                  << ",\n\"summary\": " << summary_to_json(result.summary)
                  << ",\n\"records\": " << records_to_json(result.records)
                  << "\n}\n";
  } else {
    throw ConfigError("unknown format: " + opt.format);
  }

  const RunSummary& s = result.summary;
  std::cerr << "V(A|B) = " << s.v_ab.value << " +- " << s.v_ab.std_error
            << ", V(B|A) = " << s.v_ba.value << " +- " << s.v_ba.std_error
            << "\n"
            << "monitor mean " << s.monitor_mean << " (expected "
            << s.monitor_expected << "): "
            << (s.monitor_pass ? "pass" : "ALARM") << "\n"
            << "verdict DR=" << to_string(s.report.verdict_dr)
            << " RR=" << to_string(s.report.verdict_rr) << "\n";
  if (s.attack) {
    std::cerr << "mean vnb " << s.mean_vnb << ", fallback fraction "
              << s.fallback_fraction;
    if (s.correlation_x) {
      std::cerr << ", corr(eve,bob) x=" << *s.correlation_x
                << " p=" << *s.correlation_p;
    }
    std::cerr << "\n";
  }
  if (!opt.report_path.empty()) {
    std::ofstream report(opt.report_path);
    if (!report) {
      throw ConfigError("cannot open report file: " + opt.report_path);
    }
    report << summary_to_json(result.summary) << "\n";
  }
  return kExitOk;
}

int run_sweep(double v, double eps, double vnb, const std::string& grid_spec,
              const std::string& out, const std::string& format) {
  const std::vector<double> grid = parse_grid(grid_spec);
  const SweepResult sweep = sweep_figures(v, eps, vnb, grid);
  DataSink sink(out);
  if (format == "csv") {
    write_sweep_csv(sink.stream(), sweep);
  } else if (format == "json") {
    sink.stream() << sweep_to_json(sweep) << "\n";
  } else {
    throw ConfigError("unknown format: " + format);
  }
  std::cerr << "sweep: " << sweep.rows.size() << " loss points, crossover DR "
            << sweep.crossover_db_dr << " dB, RR " << sweep.crossover_db_rr
            << " dB\n";
  return kExitOk;
}

int run_region(int resolution, double extent, double lo_photons, double cap,
               const std::string& out, const std::string& format) {
  ScenarioConfig defaults;
  const AttackSolver solver(defaults.main_splitter(),
                            defaults.monitor_splitter(), lo_photons, cap,
                            defaults.attack_search);
  const RegionMap region = achievable_region(solver, resolution, extent);
  DataSink sink(out);
  if (format == "csv") {
    write_region_csv(sink.stream(), region);
  } else if (format == "json") {
    sink.stream() << region_to_json(region) << "\n";
  } else {
    throw ConfigError("unknown format: " + format);
  }
  std::cerr << "region: extent " << region.extent << ", max covered radius "
            << region.max_radius << ", disk radius sqrt(20) "
            << (region.disk20_covered ? "covered" : "NOT covered") << "\n";
  return kExitOk;
}

int run_bounds(double v, int grid, const std::string& out,
               const std::string& format) {
  ScenarioConfig defaults;
  // Worst-case residual noise over the whole transmission square with both
  // carriers at the intensity cap.
  double worst = 0.0;
  double worst_t1 = 0.0, worst_t2 = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t1 = static_cast<double>(i) / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double t2 = static_cast<double>(j) / (grid - 1);
      const ResidualNoise noise = residual_noise_variance(
          t1, t2, defaults.intensity_cap, defaults.intensity_cap,
          defaults.lo_photons);
      const double value = std::max(noise.x, noise.p);
      if (value > worst) {
        worst = value;
        worst_t1 = t1;
        worst_t2 = t2;
      }
    }
  }

  // Threshold identities over a (V, eta) grid.
  double worst_dr_rate = 0.0, worst_rr_rate = 0.0;
  double worst_dr_gap = 0.0, worst_rr_gap = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double vv = 2.0 + (100.0 - 2.0) * i / 9.0;
    for (int j = 0; j < 10; ++j) {
      const double eta_dr = 0.67 + (0.99 - 0.67) * j / 9.0;
      const double chi_dr = chi_max_dr(eta_dr);
      worst_dr_rate =
          std::max(worst_dr_rate, std::abs(key_rate_dr(vv, eta_dr, chi_dr)));
      worst_dr_gap = std::max(
          worst_dr_gap,
          std::abs(v_ab_max(vv, eta_dr) - v_ab_normal(vv, eta_dr, chi_dr)));
      const double eta_rr = 0.05 + (0.99 - 0.05) * j / 9.0;
      const double chi_rr = chi_max_rr(eta_rr, vv);
      worst_rr_rate =
          std::max(worst_rr_rate, std::abs(key_rate_rr(vv, eta_rr, chi_rr)));
      worst_rr_gap = std::max(
          worst_rr_gap,
          std::abs(v_ba_max(vv, eta_rr) - v_ba_normal(eta_rr, chi_rr)));
    }
  }

  const double failure = failure_probability(v);
  DataSink sink(out);
  if (format == "json") {
    sink.stream() << "{\n"
                  << "  \"vnb_grid\": " << grid << ",\n"
                  << "  \"vnb_max\": " << format_double(worst) << ",\n"
                  << "  \"vnb_argmax_t1\": " << format_double(worst_t1)
                  << ",\n"
                  << "  \"vnb_argmax_t2\": " << format_double(worst_t2)
                  << ",\n"
                  << "  \"vnb_bound\": 0.13,\n"
                  << "  \"failure_probability_v\": " << format_double(v)
                  << ",\n"
                  << "  \"failure_probability\": " << format_double(failure)
                  << ",\n"
                  << "  \"max_abs_key_rate_dr_at_chi_max\": "
                  << format_double(worst_dr_rate) << ",\n"
                  << "  \"max_abs_key_rate_rr_at_chi_max\": "
                  << format_double(worst_rr_rate) << ",\n"
                  << "  \"max_abs_v_ab_threshold_gap\": "
                  << format_double(worst_dr_gap) << ",\n"
                  << "  \"max_abs_v_ba_threshold_gap\": "
                  << format_double(worst_rr_gap) << "\n"
                  << "}\n";
  } else if (format == "csv") {
    sink.stream() << "quantity,value\n"
                  << "vnb_max," << format_double(worst) << "\n"
                  << "vnb_bound,0.13\n"
                  << "failure_probability," << format_double(failure) << "\n"
                  << "max_abs_key_rate_dr_at_chi_max,"
                  << format_double(worst_dr_rate) << "\n"
                  << "max_abs_key_rate_rr_at_chi_max,"
                  << format_double(worst_rr_rate) << "\n"
                  << "max_abs_v_ab_threshold_gap,"
                  << format_double(worst_dr_gap) << "\n"
                  << "max_abs_v_ba_threshold_gap,"
                  << format_double(worst_rr_gap) << "\n";
  } else {
    throw ConfigError("unknown format: " + format);
  }
  std::cerr << "bounds: vnb max " << worst << " (<= 0.13), erfc tail "
            << failure << "\n";
  return kExitOk;
}

int run_selftest() {
  int failures = 0;
  auto check = [&failures](bool ok, const std::string& label) {
    std::cerr << (ok ? "[ok]   " : "[FAIL] ") << label << "\n";
    if (!ok) ++failures;
  };

  const SplitterModel main = SplitterModel::calibrated(1550.0, 0.5);
  const SplitterModel monitor = SplitterModel::calibrated(1550.0, 0.9);

  {
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      for (int step = 0; step <= 10 && ok; ++step) {
        const double target = 0.5 * step / 10.0 + (k == 0 ? 0.01 : 0.0);
        for (bool rising : {true, false}) {
          const double lambda =
              wavelength_for_transmission(main, target, k, rising);
          if (std::abs(main.transmission(lambda) - target) > 1e-9) ok = false;
        }
      }
    }
    check(ok, "splitter inversion round-trip on three branches");
  }
  {
    bool ok = true;
    const double a0 = std::asin(std::sqrt(0.5));
    const double b0 = std::asin(std::sqrt(0.9));
    for (int i = 0; i <= 40; ++i) {
      const double phase = 1.5707963267948966 * i / 40.0;
      const double lambda = std::pow(phase > 0 ? phase / main.phase_coefficient
                                               : 1e-12,
                                     0.4);
      if (!(lambda > 0.0)) continue;
      const double mapped =
          std::pow(std::sin(std::asin(std::sqrt(main.transmission(lambda))) /
                            a0 * b0),
                   2.0);
      if (std::abs(monitor_transmission(main, monitor, lambda) - mapped) >
          1e-12) {
        ok = false;
      }
    }
    check(ok, "monitor tap matches the principal-branch value map");
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 201; ++i) {
      for (int j = 0; j < 201; ++j) {
        const ResidualNoise noise = residual_noise_variance(
            i / 200.0, j / 200.0, 1e6, 1e6, 1e8);
        worst = std::max(worst, std::max(noise.x, noise.p));
      }
    }
    check(worst <= 0.13, "residual noise bounded by 0.13 at the caps");
  }
  {
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i) {
      const double vv = 2.0 + 98.0 * i / 9.0;
      for (int j = 0; j < 10 && ok; ++j) {
        const double eta = 0.67 + 0.32 * j / 9.0;
        if (std::abs(key_rate_dr(vv, eta, chi_max_dr(eta))) > 1e-9) ok = false;
        if (std::abs(v_ab_max(vv, eta) -
                     v_ab_normal(vv, eta, chi_max_dr(eta))) > 1e-9) {
          ok = false;
        }
        const double eta_rr = 0.05 + 0.94 * j / 9.0;
        if (std::abs(key_rate_rr(vv, eta_rr, chi_max_rr(eta_rr, vv))) > 1e-9) {
          ok = false;
        }
        if (std::abs(v_ba_max(vv, eta_rr) -
                     v_ba_normal(eta_rr, chi_max_rr(eta_rr, vv))) > 1e-9) {
          ok = false;
        }
      }
    }
    check(ok, "zero-rate and threshold identities on the (V, eta) grid");
  }
  check(std::abs(failure_probability(11.0) - 1.637e-9) <= 0.001e-9,
        "failure probability at V = 11");
  {
    const AttackSolver solver(main, monitor, 1e8, 1e6);
    ShotRng rng(7, 0);
    bool ok = true;
    int infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const double sigma = std::sqrt(6.0 * 0.875);
      const TargetQuadratures target = {sigma * rng.normal(),
                                        sigma * rng.normal()};
      const SolveOutcome outcome = solver.solve(target);
      if (!outcome.feasible) {
        ++infeasible;
        continue;
      }
      const AttackSolution& s = outcome.solution;
      const double rec_x =
          2.0 * (response_coefficients(s.t_sig).x * s.i_sig -
                 response_coefficients(s.t_lo).x * s.i_lo) /
          std::sqrt(1e8);
      const double rec_p =
          2.0 * (response_coefficients(s.t_sig).p * s.i_sig -
                 response_coefficients(s.t_lo).p * s.i_lo) /
          std::sqrt(1e8);
      const double norm = std::hypot(target.x, target.p);
      if (std::hypot(rec_x - target.x, rec_p - target.p) >
          1e-6 * std::max(norm, 1e-9)) {
        ok = false;
      }
      if (std::abs(s.monitor_sum() - 1e7) > 1e-3 * 1e7) ok = false;
      if (std::max(s.vnb_x, s.vnb_p) > 0.13) ok = false;
    }
    check(ok && infeasible == 0, "attack solutions land on their targets");
  }
  {
    ScenarioConfig config;
    config.shots = 5000;
    config.attack_enabled = true;
    config.threads = 1;
    const RunResult one = run_scenario(config);
    config.threads = 4;
    const RunResult four = run_scenario(config);
    std::ostringstream csv_one, csv_four;
    write_records_csv(csv_one, one.records);
    write_records_csv(csv_four, four.records);
    check(csv_one.str() == csv_four.str(),
          "identical records for any worker count");
  }
  {
    ShotRng rng(11, 3);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const QuadratureSample out = heterodyne({4.0, 0.0}, rng);
      sum += out.x;
      sum2 += out.x * out.x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const bool ok = std::abs(mean - 4.0 / std::sqrt(2.0)) <
                        4.0 * std::sqrt(0.5 / n) &&
                    std::abs(var - 0.5) < 4.0 * 0.5 * std::sqrt(2.0 / n);
    check(ok, "heterodyne mean scaling and variance law");
  }
  {
    const std::vector<double> grid = {0.1, 0.5, 1.0};
    const SweepResult sweep = sweep_figures(11.0, 0.01, 0.13, grid);
    check(std::abs(sweep.crossover_db_dr - 0.58) <= 0.02 &&
              std::abs(sweep.crossover_db_rr - 0.58) <= 0.02,
          "attack/normal crossover near 0.58 dB");
  }

  if (failures > 0) {
    std::cerr << failures << " self-test failure(s)\n";
    return kExitSelfTestFailure;
  }
  std::cerr << "self-test passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-variable QKD heterodyne simulator and "
               "wavelength-attack analysis toolkit"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run one Monte Carlo scenario and emit shot records");
  simulate->add_option("--config", sim.config_path,
                       "Scenario config (JSON file)");
  simulate->add_option("--seed", sim.seed, "Override RNG seed");
  simulate->add_option("--shots", sim.shots, "Override shot count");
  simulate->add_option("--loss-db", sim.loss_db, "Channel loss in dB");
  simulate->add_option("--eta", sim.eta, "Channel transmission in (0, 1]");
  simulate->add_flag("--attack", sim.attack, "Enable the interception attack");
  simulate->add_option("--filter-prob", sim.filter_prob,
                       "Per-shot wavelength-filter probability");
  simulate->add_flag("--padding", sim.padding,
                     "Enable deliberate noise padding");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = auto)");
  simulate->add_option("--out", sim.out, "Output path ('-' for stdout)");
  simulate->add_option("--format", sim.format, "csv or json");
  simulate->add_option("--report", sim.report_path,
                       "Also write the JSON run summary here");

  double sweep_v = 11.0, sweep_eps = 0.01, sweep_vnb = 0.13;
  std::string sweep_grid = "0.01:5.0:0.01";
  std::string sweep_out = "-", sweep_format = "csv";
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Analytic threshold/attack curves over a loss grid");
  sweep->add_option("--v", sweep_v, "Total modulated variance V");
  sweep->add_option("--eps", sweep_eps, "Excess noise");
  sweep->add_option("--vnb", sweep_vnb, "Residual attack noise");
  sweep->add_option("--loss-db", sweep_grid,
                    "Loss grid: start:stop:step or comma list");
  sweep->add_option("--out", sweep_out, "Output path ('-' for stdout)");
  sweep->add_option("--format", sweep_format, "csv or json");

  int region_resolution = 256;
  double region_extent = 0.0, region_lo = 1e8, region_cap = 1e6;
  std::string region_out = "-", region_format = "csv";
  CLI::App* region = app.add_subcommand(
      "region", "Raster the reachable target plane of the attack");
  region->add_option("--resolution", region_resolution,
                     "Pixels per axis (>= 64)");
  region->add_option("--extent", region_extent,
                     "Half-width of the raster (0 = auto)");
  region->add_option("--lo-photons", region_lo, "Oscillator photon number");
  region->add_option("--cap", region_cap, "Transmitted-intensity cap");
  region->add_option("--out", region_out, "Output path ('-' for stdout)");
  region->add_option("--format", region_format, "csv or json");

  double bounds_v = 11.0;
  int bounds_grid = 256;
  std::string bounds_out = "-", bounds_format = "json";
  CLI::App* bounds = app.add_subcommand(
      "bounds", "Residual-noise bound sweep, failure tail and identities");
  bounds->add_option("--v", bounds_v, "Variance for the failure probability");
  bounds->add_option("--grid", bounds_grid, "Transmission grid per axis");
  bounds->add_option("--out", bounds_out, "Output path ('-' for stdout)");
  bounds->add_option("--format", bounds_format, "csv or json");

  CLI::App* selftest =
      app.add_subcommand("selftest", "Run the invariant self-test suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (sweep->parsed()) {
      return run_sweep(sweep_v, sweep_eps, sweep_vnb, sweep_grid, sweep_out,
                       sweep_format);
    }
    if (region->parsed()) {
      return run_region(region_resolution, region_extent, region_lo,
                        region_cap, region_out, region_format);
    }
    if (bounds->parsed()) {
      return run_bounds(bounds_v, bounds_grid, bounds_out, bounds_format);
    }
    if (selftest->parsed()) return run_selftest();
  } catch (const ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
