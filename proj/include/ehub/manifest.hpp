#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ehub/frameworks.hpp"
#include "ehub/scenarios.hpp"

namespace ehub {

/// A run described in one JSON file. Relative paths resolve against the
/// manifest's directory. Unknown keys are rejected.
struct RunManifest {
  std::string origin;
  std::string hub;
  std::map<std::string, std::string> series;  // energy -> CSV
  int periods = 24;
  double dt = 1.0;
  int days = 365;
  int representative_days = 10;
  std::uint64_t seed = 1;
  int years = 20;
  double discount_rate = 0.10;
  double fuel_growth = 0.02;
  double demand_growth = 0.04;

  Framework framework = Framework::F1;
  std::optional<double> emissions_cap;      // t/yr
  std::optional<double> reduction_percent;  // cut from the framework's baseline
  std::vector<Framework> frameworks;        // pareto; defaults to {framework}
  int resolution = 10;

  double price_tolerance = 0.5;
  double gap_tolerance = 1e-9;
  double time_limit_s = 0.0;
  long node_limit = 0;
  int benders = 0;  // 1: solve F1 by decomposition
  int threads = 1;
  std::string output = "out";
};

RunManifest parse_manifest(const std::string& text, const std::string& origin);
RunManifest load_manifest(const std::string& path);
std::string manifest_to_json(const RunManifest& m);

/// Loads the hub and series and reduces them to representative days over
/// the planning horizon.
struct LoadedRun {
  HubSpec spec;
  HubTopology topo;
  YearSeries year;
  ScenarioSet scenarios;
};

LoadedRun load_run(const RunManifest& m);
EconConfig econ_of(const RunManifest& m);

}  // namespace ehub
