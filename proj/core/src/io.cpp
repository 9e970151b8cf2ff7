#include "cvqkd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace cvqkd {

using nlohmann::json;

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_records_csv(std::ostream& out,
                       std::span<const ShotRecord> records) {
  out << "shot,alice_x,alice_p,bob_x,bob_p,eve_x,eve_p,monitor,filtered,"
         "attack_fallback\n";
  std::size_t index = 0;
  for (const ShotRecord& r : records) {
    out << index++ << ',' << format_double(r.alice_x) << ','
        << format_double(r.alice_p) << ',' << format_double(r.bob_x) << ','
        << format_double(r.bob_p) << ',';
    if (r.eve_x) out << format_double(*r.eve_x);
    out << ',';
    if (r.eve_p) out << format_double(*r.eve_p);
    out << ',' << format_double(r.monitor) << ',' << (r.filtered ? 1 : 0)
        << ',' << (r.attack_fallback ? 1 : 0) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "loss_db,eta,chi,v_ab_max,v_ab_normal,v_ab_attack,v_ba_max,"
         "v_ba_normal,v_ba_attack,key_rate_dr,key_rate_rr,"
         "crossover_db_dr,crossover_db_rr\n";
  for (const SweepRow& row : sweep.rows) {
    out << format_double(row.loss_db) << ',' << format_double(row.eta) << ','
        << format_double(row.chi) << ',' << format_double(row.v_ab_max) << ','
        << format_double(row.v_ab_normal) << ','
        << format_double(row.v_ab_attack) << ',' << format_double(row.v_ba_max)
        << ',' << format_double(row.v_ba_normal) << ','
        << format_double(row.v_ba_attack) << ','
        << format_double(row.key_rate_dr) << ','
        << format_double(row.key_rate_rr) << ','
        << format_double(sweep.crossover_db_dr) << ','
        << format_double(sweep.crossover_db_rr) << '\n';
  }
}

void write_region_csv(std::ostream& out, const RegionMap& region) {
  out << "x,p,covered\n";
  const double pixel = 2.0 * region.extent / region.resolution;
  for (int ip = 0; ip < region.resolution; ++ip) {
    const double p = -region.extent + pixel * (ip + 0.5);
    for (int ix = 0; ix < region.resolution; ++ix) {
      const double x = -region.extent + pixel * (ix + 0.5);
      out << format_double(x) << ',' << format_double(p) << ','
          << (region.at(ix, ip) ? 1 : 0) << '\n';
    }
  }
}

void write_report_csv(std::ostream& out, const SecurityReport& report) {
  out << "v,eta,excess_noise,vnb,chi,key_rate_dr,key_rate_rr,v_ab_normal,"
         "v_ba_normal,v_ab_attack,v_ba_attack,v_ab_max,v_ba_max,"
         "v_ab_measured,v_ba_measured,verdict_dr,verdict_rr\n";
  out << format_double(report.v) << ',' << format_double(report.eta) << ','
      << format_double(report.excess_noise) << ',' << format_double(report.vnb)
      << ',' << format_double(report.chi) << ','
      << format_double(report.key_rate_dr) << ','
      << format_double(report.key_rate_rr) << ','
      << format_double(report.v_ab_normal) << ','
      << format_double(report.v_ba_normal) << ','
      << format_double(report.v_ab_attack) << ','
      << format_double(report.v_ba_attack) << ','
      << format_double(report.v_ab_max) << ',' << format_double(report.v_ba_max)
      << ',';
  if (report.v_ab_measured) out << format_double(*report.v_ab_measured);
  out << ',';
  if (report.v_ba_measured) out << format_double(*report.v_ba_measured);
  out << ',' << to_string(report.verdict_dr) << ','
      << to_string(report.verdict_rr) << '\n';
}

void write_attack_solutions_csv(std::ostream& out,
                                std::span<const AttackSolution> solutions) {
  out << "lambda_sig,lambda_lo,lambda_ancilla,t_sig,t_lo,t_ancilla,tp_sig,"
         "tp_lo,tp_ancilla,i_sig,i_lo,i_ancilla_source,vnb_x,vnb_p\n";
  for (const AttackSolution& s : solutions) {
    out << format_double(s.lambda_sig) << ',' << format_double(s.lambda_lo)
        << ',' << format_double(s.lambda_ancilla) << ','
        << format_double(s.t_sig) << ',' << format_double(s.t_lo) << ','
        << format_double(s.t_ancilla) << ',' << format_double(s.tp_sig) << ','
        << format_double(s.tp_lo) << ',' << format_double(s.tp_ancilla) << ','
        << format_double(s.i_sig) << ',' << format_double(s.i_lo) << ','
        << format_double(s.i_ancilla_source) << ',' << format_double(s.vnb_x)
        << ',' << format_double(s.vnb_p) << '\n';
  }
}

std::string attack_solution_to_json(const AttackSolution& solution) {
  return json{{"lambda_sig", solution.lambda_sig},
              {"lambda_lo", solution.lambda_lo},
              {"lambda_ancilla", solution.lambda_ancilla},
              {"t_sig", solution.t_sig},
              {"t_lo", solution.t_lo},
              {"t_ancilla", solution.t_ancilla},
              {"tp_sig", solution.tp_sig},
              {"tp_lo", solution.tp_lo},
              {"tp_ancilla", solution.tp_ancilla},
              {"i_sig", solution.i_sig},
              {"i_lo", solution.i_lo},
              {"i_ancilla_source", solution.i_ancilla_source},
              {"vnb_x", solution.vnb_x},
              {"vnb_p", solution.vnb_p}}
      .dump(2);
}

namespace {

json report_json(const SecurityReport& report) {
  json j{{"v", report.v},
         {"eta", report.eta},
         {"excess_noise", report.excess_noise},
         {"vnb", report.vnb},
         {"chi", report.chi},
         {"key_rate_dr", report.key_rate_dr},
         {"key_rate_rr", report.key_rate_rr},
         {"v_ab_normal", report.v_ab_normal},
         {"v_ba_normal", report.v_ba_normal},
         {"v_ab_attack", report.v_ab_attack},
         {"v_ba_attack", report.v_ba_attack},
         {"v_ab_max", report.v_ab_max},
         {"v_ba_max", report.v_ba_max},
         {"verdict_dr", to_string(report.verdict_dr)},
         {"verdict_rr", to_string(report.verdict_rr)}};
  if (report.v_ab_measured) j["v_ab_measured"] = *report.v_ab_measured;
  if (report.v_ba_measured) j["v_ba_measured"] = *report.v_ba_measured;
  return j;
}

json scenario_json(const ScenarioConfig& config) {
  return json{{"modulation_variance", config.modulation_variance},
              {"channel_transmission", config.channel_transmission},
              {"excess_noise", config.excess_noise},
              {"lo_photons", config.lo_photons},
              {"intensity_cap", config.intensity_cap},
              {"shots", config.shots},
              {"seed", config.seed},
              {"attack", config.attack_enabled},
              {"filter_probability", config.filter_probability},
              {"filter_passband",
               json::array({config.filter_passband.lo,
                            config.filter_passband.hi})},
              {"monitor_tolerance", config.monitor_tolerance},
              {"noise_padding", config.noise_padding_enabled},
              {"threads", config.threads},
              {"detector_efficiency", config.detector_efficiency},
              {"reference_wavelength", config.reference_wavelength},
              {"main_reference_transmission",
               config.main_reference_transmission},
              {"monitor_reference_transmission",
               config.monitor_reference_transmission},
              {"coupled_fraction", config.coupled_fraction},
              {"search_band", json::array({config.attack_search.band_lo,
                                           config.attack_search.band_hi})},
              {"search_grid_points", config.attack_search.grid_points},
              {"ancilla_band",
               json::array({config.attack_search.ancilla_band_lo,
                            config.attack_search.ancilla_band_hi})}};
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& config) {
  return scenario_json(config).dump(2);
}

ScenarioConfig scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& error) {
    throw ConfigError(std::string("config is not valid JSON: ") +
                      error.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  ScenarioConfig config;
  bool have_eta = false;
  bool have_loss = false;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "modulation_variance") {
        config.modulation_variance = value.get<double>();
      } else if (key == "channel_transmission") {
        config.channel_transmission = value.get<double>();
        have_eta = true;
      } else if (key == "channel_loss_db") {
        config.channel_transmission =
            std::pow(10.0, -value.get<double>() / 10.0);
        have_loss = true;
      } else if (key == "excess_noise") {
        config.excess_noise = value.get<double>();
      } else if (key == "lo_photons") {
        config.lo_photons = value.get<double>();
      } else if (key == "intensity_cap") {
        config.intensity_cap = value.get<double>();
      } else if (key == "shots") {
        config.shots = value.get<long long>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "attack") {
        config.attack_enabled = value.get<bool>();
      } else if (key == "filter_probability") {
        config.filter_probability = value.get<double>();
      } else if (key == "filter_passband") {
        config.filter_passband.lo = value.at(0).get<double>();
        config.filter_passband.hi = value.at(1).get<double>();
      } else if (key == "monitor_tolerance") {
        config.monitor_tolerance = value.get<double>();
      } else if (key == "noise_padding") {
        config.noise_padding_enabled = value.get<bool>();
      } else if (key == "threads") {
        config.threads = value.get<int>();
      } else if (key == "detector_efficiency") {
        config.detector_efficiency = value.get<double>();
      } else if (key == "reference_wavelength") {
        config.reference_wavelength = value.get<double>();
      } else if (key == "main_reference_transmission") {
        config.main_reference_transmission = value.get<double>();
      } else if (key == "monitor_reference_transmission") {
        config.monitor_reference_transmission = value.get<double>();
      } else if (key == "coupled_fraction") {
        config.coupled_fraction = value.get<double>();
      } else if (key == "search_band") {
        config.attack_search.band_lo = value.at(0).get<double>();
        config.attack_search.band_hi = value.at(1).get<double>();
      } else if (key == "search_grid_points") {
        config.attack_search.grid_points = value.get<int>();
      } else if (key == "ancilla_band") {
        config.attack_search.ancilla_band_lo = value.at(0).get<double>();
        config.attack_search.ancilla_band_hi = value.at(1).get<double>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const json::exception& error) {
      throw ConfigError("bad value for config key '" + key +
                        "': " + error.what());
    }
  }
  if (have_eta && have_loss) {
    throw ConfigError(
        "give either channel_transmission or channel_loss_db, not both");
  }
  config.validate();
  return config;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json(buffer.str());
}

std::string report_to_json(const SecurityReport& report) {
  return report_json(report).dump(2);
}

std::string summary_to_json(const RunSummary& summary) {
  json j{{"shots", summary.shots},
         {"attack", summary.attack},
         {"v_ab", {{"value", summary.v_ab.value},
                   {"std_error", summary.v_ab.std_error},
                   {"n", summary.v_ab.n}}},
         {"v_ba", {{"value", summary.v_ba.value},
                   {"std_error", summary.v_ba.std_error},
                   {"n", summary.v_ba.n}}},
         {"mean_vnb", summary.mean_vnb},
         {"mean_vnb_x", summary.mean_vnb_x},
         {"mean_vnb_p", summary.mean_vnb_p},
         {"mean_pad_variance", summary.mean_pad_variance},
         {"fallback_fraction", summary.fallback_fraction},
         {"filtered_fraction", summary.filtered_fraction},
         {"monitor_mean", summary.monitor_mean},
         {"monitor_expected", summary.monitor_expected},
         {"monitor_pass", summary.monitor_pass},
         {"report", report_json(summary.report)}};
  if (summary.correlation_x) j["correlation_x"] = *summary.correlation_x;
  if (summary.correlation_p) j["correlation_p"] = *summary.correlation_p;
  return j.dump(2);
}

std::string records_to_json(std::span<const ShotRecord> records) {
  json array = json::array();
  for (const ShotRecord& r : records) {
    json entry{{"alice_x", r.alice_x},   {"alice_p", r.alice_p},
               {"bob_x", r.bob_x},       {"bob_p", r.bob_p},
               {"monitor", r.monitor},   {"filtered", r.filtered},
               {"attack_fallback", r.attack_fallback}};
    if (r.eve_x) entry["eve_x"] = *r.eve_x;
    if (r.eve_p) entry["eve_p"] = *r.eve_p;
    array.push_back(std::move(entry));
  }
  return array.dump(2);
}

std::string sweep_to_json(const SweepResult& sweep) {
  json rows = json::array();
  for (const SweepRow& row : sweep.rows) {
    rows.push_back(json{{"loss_db", row.loss_db},
                        {"eta", row.eta},
                        {"chi", row.chi},
                        {"v_ab_max", row.v_ab_max},
                        {"v_ab_normal", row.v_ab_normal},
                        {"v_ab_attack", row.v_ab_attack},
                        {"v_ba_max", row.v_ba_max},
                        {"v_ba_normal", row.v_ba_normal},
                        {"v_ba_attack", row.v_ba_attack},
                        {"key_rate_dr", row.key_rate_dr},
                        {"key_rate_rr", row.key_rate_rr}});
  }
  return json{{"v", sweep.v},
              {"excess_noise", sweep.excess_noise},
              {"vnb", sweep.vnb},
              {"crossover_db_dr", sweep.crossover_db_dr},
              {"crossover_db_rr", sweep.crossover_db_rr},
              {"rows", std::move(rows)}}
      .dump(2);
}

std::string region_to_json(const RegionMap& region) {
  json covered = json::array();
  for (std::uint8_t cell : region.covered) covered.push_back(cell != 0);
  return json{{"extent", region.extent},
              {"resolution", region.resolution},
              {"axis", "row-major grid of pixel centres; x fastest, both axes "
                       "span [-extent, extent]"},
              {"max_radius", region.max_radius},
              {"disk20_covered", region.disk20_covered},
              {"covered", std::move(covered)}}
      .dump();
}

std::string splitter_record_to_json(const SplitterRecord& record) {
  return json{{"reference_wavelength", record.reference_wavelength},
              {"reference_transmission", record.reference_transmission},
              {"coupled_fraction", record.coupled_fraction}}
      .dump(2);
}

SplitterRecord splitter_record_from_json(const std::string& text) {
  const json j = json::parse(text);
  SplitterRecord record;
  record.reference_wavelength = j.at("reference_wavelength").get<double>();
  record.reference_transmission =
      j.at("reference_transmission").get<double>();
  record.coupled_fraction = j.at("coupled_fraction").get<double>();
  return record;
}

}  // namespace cvqkd
