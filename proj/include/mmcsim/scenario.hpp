#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmcsim/control.hpp"
#include "mmcsim/converter.hpp"
#include "mmcsim/detection.hpp"
#include "mmcsim/params.hpp"

namespace mmcsim {

struct RunConfig {
  std::string name = "scenario";
  double t_end = 0.3;   // s
  int decimation = 10;  // record every n-th step
};

struct ScenarioConfig {
  ConverterParams converter;
  ControlParams control;
  DetectorConfig detector;
  std::optional<FaultSpec> fault;
  RunConfig run;

  void validate() const;  // throws ConfigError
};

struct TimeSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

enum class RunStatus { Ok, Diverged };

struct ScenarioResult {
  TimeSeries series;
  LocationReport report;
  RunStatus status = RunStatus::Ok;
  bool negative_u_cap = false;
  std::string message;
  /// Only meaningful when the scenario seeded a fault: true when no module or
  /// the wrong module was flagged is false / true respectively.
  bool located_wrong_sm = false;
};

/// Deterministic fixed-step run of one scenario. Identical configs produce
/// identical results, sample for sample.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Named configurations reproducing the reference waveform studies. Known
/// names: healthy, fig11, fig12, fig13, fig14. Throws ConfigError otherwise.
ScenarioConfig builtin_scenario(const std::string& name);

std::vector<std::string> builtin_scenario_names();

/// Writes <name>_timeseries.csv and <name>_summary.json into out_dir.
void write_outputs(const ScenarioResult& result, const ScenarioConfig& cfg,
                   const std::filesystem::path& out_dir);

std::string summary_json(const ScenarioResult& result, const ScenarioConfig& cfg);

/// Writes the four threshold-sweep CSVs (one per case group) into out_dir.
/// case_ids empty means all nine cases.
void write_sweep_outputs(const std::vector<int>& case_ids,
                         const std::filesystem::path& out_dir);

}  // namespace mmcsim
