#pragma once

#include <iosfwd>
#include <string>

#include "cvqkd/attack.hpp"
#include "cvqkd/simulation.hpp"

namespace cvqkd {

// All tabular output is plain RFC-style CSV: '.' decimal separator, one
// header line, fixed column order (documented in the README), doubles
// printed with 17 significant digits so equal runs produce equal bytes.
std::string format_double(double value);

void write_records_csv(std::ostream& out, std::span<const ShotRecord> records);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
void write_region_csv(std::ostream& out, const RegionMap& region);
void write_report_csv(std::ostream& out, const SecurityReport& report);
void write_attack_solutions_csv(std::ostream& out,
                                std::span<const AttackSolution> solutions);

// JSON forms of the same artifacts.
std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

std::string report_to_json(const SecurityReport& report);
std::string attack_solution_to_json(const AttackSolution& solution);
std::string summary_to_json(const RunSummary& summary);
std::string records_to_json(std::span<const ShotRecord> records);
std::string sweep_to_json(const SweepResult& sweep);
std::string region_to_json(const RegionMap& region);

std::string splitter_record_to_json(const SplitterRecord& record);
SplitterRecord splitter_record_from_json(const std::string& text);

}  // namespace cvqkd
