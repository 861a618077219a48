#include "ehub/manifest.hpp"

#include <filesystem>
#include <set>

#include <json.hpp>

#include "ehub/errors.hpp"
#include "ehub/hub_io.hpp"

namespace ehub {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKeys = {
    "hub",        "series",          "periods",        "dt",          "days",          "representative_days",
    "seed",       "years",           "discount_rate",  "fuel_growth", "demand_growth", "framework",
    "emissions_cap", "reduction_percent", "frameworks", "resolution", "price_tolerance", "gap_tolerance",
    "time_limit_s", "node_limit",    "benders",        "threads",     "output"};

Framework framework_of(const json& j, const std::string& origin) {
  try {
    return parse_framework(j.is_string() ? j.get<std::string>() : std::to_string(j.get<int>()));
  } catch (const std::invalid_argument& e) {
    throw DataError(origin + ": " + e.what());
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

}  // namespace

RunManifest parse_manifest(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1, col = 1;
    locate_offset(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
    throw ParseError(origin, line, col, "malformed JSON");
  }
  if (!j.is_object()) throw DataError(origin + ": manifest must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw DataError(origin + ": unknown key '" + k + "'");
  }
  RunManifest m;
  m.origin = origin;
  const std::string base = fs::path(origin).parent_path().string();
  try {
    if (!j.contains("hub")) throw DataError(origin + ": 'hub' is required");
    m.hub = resolve(base, j["hub"].get<std::string>());
    if (j.contains("series")) {
      for (const auto& [e, p] : j["series"].items()) m.series[e] = resolve(base, p.get<std::string>());
    }
    auto opt = [&](const char* key, auto& field) {
      if (j.contains(key) && !j[key].is_null()) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    opt("periods", m.periods);
    opt("dt", m.dt);
    opt("days", m.days);
    opt("representative_days", m.representative_days);
    opt("seed", m.seed);
    opt("years", m.years);
    opt("discount_rate", m.discount_rate);
    opt("fuel_growth", m.fuel_growth);
    opt("demand_growth", m.demand_growth);
    if (j.contains("framework")) m.framework = framework_of(j["framework"], origin);
    if (j.contains("emissions_cap") && !j["emissions_cap"].is_null()) m.emissions_cap = j["emissions_cap"].get<double>();
    if (j.contains("reduction_percent") && !j["reduction_percent"].is_null()) {
      m.reduction_percent = j["reduction_percent"].get<double>();
    }
    if (j.contains("frameworks")) {
      for (const auto& f : j["frameworks"]) m.frameworks.push_back(framework_of(f, origin));
    }
    opt("resolution", m.resolution);
    opt("price_tolerance", m.price_tolerance);
    opt("gap_tolerance", m.gap_tolerance);
    opt("time_limit_s", m.time_limit_s);
    opt("node_limit", m.node_limit);
    opt("benders", m.benders);
    opt("threads", m.threads);
    if (j.contains("output")) m.output = resolve(base, j["output"].get<std::string>());
    else m.output = resolve(base, m.output);
  } catch (const json::type_error& e) {
    throw DataError(origin + ": wrong value type (" + std::string(e.what()) + ")");
  }
  if (m.frameworks.empty()) m.frameworks = {m.framework};
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw DataError(origin + ": " + what);
  };
  need(m.periods >= 1, "periods must be at least 1");
  need(m.dt > 0.0, "dt must be positive");
  need(m.days >= 1, "days must be at least 1");
  need(m.representative_days >= 1, "representative_days must be at least 1");
  need(m.years >= 1, "years must be at least 1");
  need(m.discount_rate > -1.0, "discount_rate must exceed -1");
  need(m.resolution >= 1, "resolution must be at least 1");
  need(m.price_tolerance > 0.0, "price_tolerance must be positive");
  need(m.gap_tolerance >= 0.0, "gap_tolerance must be non-negative");
  need(m.threads >= 1, "threads must be at least 1");
  need(!(m.emissions_cap && m.reduction_percent), "give emissions_cap or reduction_percent, not both");
  if (m.reduction_percent) need(*m.reduction_percent >= 0.0 && *m.reduction_percent <= 100.0, "reduction_percent must be in [0, 100]");
  return m;
}

RunManifest load_manifest(const std::string& path) { return parse_manifest(read_text_file(path), path); }

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["hub"] = m.hub;
  j["series"] = m.series;
  j["periods"] = m.periods;
  j["dt"] = m.dt;
  j["days"] = m.days;
  j["representative_days"] = m.representative_days;
  j["seed"] = m.seed;
  j["years"] = m.years;
  j["discount_rate"] = m.discount_rate;
  j["fuel_growth"] = m.fuel_growth;
  j["demand_growth"] = m.demand_growth;
  j["framework"] = static_cast<int>(m.framework);
  j["emissions_cap"] = m.emissions_cap ? json(*m.emissions_cap) : json(nullptr);
  j["reduction_percent"] = m.reduction_percent ? json(*m.reduction_percent) : json(nullptr);
  j["frameworks"] = json::array();
  for (auto f : m.frameworks) j["frameworks"].push_back(static_cast<int>(f));
  j["resolution"] = m.resolution;
  j["price_tolerance"] = m.price_tolerance;
  j["gap_tolerance"] = m.gap_tolerance;
  j["time_limit_s"] = m.time_limit_s;
  j["node_limit"] = m.node_limit;
  j["benders"] = m.benders;
  j["threads"] = m.threads;
  j["output"] = m.output;
  return j.dump(2) + "\n";
}

LoadedRun load_run(const RunManifest& m) {
  LoadedRun r;
  r.spec = load_hub_spec(m.hub);
  r.topo = build_topology(r.spec);
  r.year = load_year_series(r.topo.energies, m.series, m.periods, m.dt, m.days);
  const auto base = reduce_days(r.year, m.representative_days, m.seed);
  r.scenarios = grow_years(base, m.fuel_growth, m.demand_growth, m.years);
  r.scenarios.discount_rate = m.discount_rate;
  return r;
}

EconConfig econ_of(const RunManifest& m) {
  EconConfig e;
  e.emissions_cap = m.emissions_cap;
  e.price_tolerance = m.price_tolerance;
  e.milp.gap_tol = m.gap_tolerance;
  e.milp.time_limit_s = m.time_limit_s;
  e.milp.node_limit = m.node_limit;
  e.threads = m.threads;
  return e;
}

}  // namespace ehub
