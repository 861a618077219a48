#include "ehub/hub_io.hpp"

#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>

namespace ehub {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void locate_offset(const std::string& text, std::size_t offset, int& line, int& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw SpecError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw SpecError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
void get(const json& j, const char* key, T& out, const std::string& where, bool required = false) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw SpecError(where + ": missing '" + key + "'");
    return;
  }
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw SpecError(where + ": field '" + std::string(key) + "' has the wrong type");
  }
}

const json& section(const json& root, const char* key) {
  static const json empty = json::array();
  auto it = root.find(key);
  if (it == root.end()) return empty;
  if (!it->is_array()) throw SpecError(std::string("section '") + key + "' must be a list");
  return *it;
}

}  // namespace

HubSpec parse_hub_spec(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 0, col = 0;
    locate_offset(text, e.byte == 0 ? 0 : e.byte - 1, line, col);
    throw ParseError(origin, line, col, "malformed JSON");
  }
  only_keys(root, origin, {"energies", "grid", "converters", "storages", "defaults"});
  HubSpec spec;
  if (root.contains("defaults")) {
    const auto& d = root["defaults"];
    only_keys(d, "defaults", {"capacity_step", "bits"});
    get(d, "capacity_step", spec.default_capacity_step, "defaults");
    get(d, "bits", spec.default_bits, "defaults");
  }
  int idx = 0;
  for (const auto& e : section(root, "energies")) {
    const std::string where = "energies[" + std::to_string(idx++) + "]";
    only_keys(e, where, {"id", "importable", "exportable", "demand", "carrier"});
    EnergySpec es;
    get(e, "id", es.id, where, true);
    get(e, "importable", es.importable, where);
    get(e, "exportable", es.exportable, where);
    get(e, "demand", es.demand, where);
    get(e, "carrier", es.carrier, where);
    spec.energies.push_back(es);
  }
  idx = 0;
  for (const auto& g : section(root, "grid")) {
    const std::string where = "grid[" + std::to_string(idx++) + "]";
    only_keys(g, where, {"energy", "capacity_cost", "capacity_step", "bits"});
    GridSpec gs;
    gs.capacity_step = spec.default_capacity_step;
    gs.bits = spec.default_bits;
    get(g, "energy", gs.energy, where, true);
    get(g, "capacity_cost", gs.capacity_cost, where);
    get(g, "capacity_step", gs.capacity_step, where);
    get(g, "bits", gs.bits, where);
    spec.grid.push_back(gs);
  }
  idx = 0;
  for (const auto& c : section(root, "converters")) {
    const std::string where = "converters[" + std::to_string(idx++) + "]";
    only_keys(c, where, {"id", "input", "outputs", "unit_rating", "unit_cost", "bits"});
    ConverterSpec cs;
    get(c, "id", cs.id, where, true);
    get(c, "input", cs.input, where, true);
    get(c, "unit_rating", cs.unit_rating, where, true);
    get(c, "unit_cost", cs.unit_cost, where, true);
    get(c, "bits", cs.bits, where);
    if (!c.contains("outputs") || !c["outputs"].is_array()) throw SpecError(where + ": 'outputs' must be a list");
    for (const auto& o : c["outputs"]) {
      only_keys(o, where + ".outputs", {"energy", "efficiency"});
      ConverterOutput co;
      get(o, "energy", co.energy, where + ".outputs", true);
      get(o, "efficiency", co.efficiency, where + ".outputs", true);
      cs.outputs.push_back(co);
    }
    spec.converters.push_back(cs);
  }
  idx = 0;
  for (const auto& s : section(root, "storages")) {
    const std::string where = "storages[" + std::to_string(idx++) + "]";
    only_keys(s, where,
              {"id", "energy", "charge_efficiency", "discharge_efficiency", "power_cost", "energy_cost",
               "power_step", "energy_step", "power_bits", "energy_bits"});
    StorageSpec ss;
    get(s, "id", ss.id, where, true);
    get(s, "energy", ss.energy, where, true);
    get(s, "charge_efficiency", ss.charge_efficiency, where);
    get(s, "discharge_efficiency", ss.discharge_efficiency, where);
    get(s, "power_cost", ss.power_cost, where);
    get(s, "energy_cost", ss.energy_cost, where);
    get(s, "power_step", ss.power_step, where);
    get(s, "energy_step", ss.energy_step, where);
    get(s, "power_bits", ss.power_bits, where);
    get(s, "energy_bits", ss.energy_bits, where);
    spec.storages.push_back(ss);
  }
  return spec;
}

HubSpec load_hub_spec(const std::string& path) { return parse_hub_spec(read_text_file(path), path); }

std::string hub_spec_to_json(const HubSpec& spec) {
  json root;
  root["defaults"] = {{"capacity_step", spec.default_capacity_step}, {"bits", spec.default_bits}};
  root["energies"] = json::array();
  for (const auto& e : spec.energies) {
    json j = {{"id", e.id}, {"importable", e.importable}, {"exportable", e.exportable}, {"demand", e.demand}};
    if (!e.carrier.empty()) j["carrier"] = e.carrier;
    root["energies"].push_back(j);
  }
  root["grid"] = json::array();
  for (const auto& g : spec.grid) {
    root["grid"].push_back(
        {{"energy", g.energy}, {"capacity_cost", g.capacity_cost}, {"capacity_step", g.capacity_step}, {"bits", g.bits}});
  }
  root["converters"] = json::array();
  for (const auto& c : spec.converters) {
    json outs = json::array();
    for (const auto& o : c.outputs) outs.push_back({{"energy", o.energy}, {"efficiency", o.efficiency}});
    root["converters"].push_back({{"id", c.id},
                                  {"input", c.input},
                                  {"outputs", outs},
                                  {"unit_rating", c.unit_rating},
                                  {"unit_cost", c.unit_cost},
                                  {"bits", c.bits}});
  }
  root["storages"] = json::array();
  for (const auto& s : spec.storages) {
    root["storages"].push_back({{"id", s.id},
                                {"energy", s.energy},
                                {"charge_efficiency", s.charge_efficiency},
                                {"discharge_efficiency", s.discharge_efficiency},
                                {"power_cost", s.power_cost},
                                {"energy_cost", s.energy_cost},
                                {"power_step", s.power_step},
                                {"energy_step", s.energy_step},
                                {"power_bits", s.power_bits},
                                {"energy_bits", s.energy_bits}});
  }
  return root.dump(2) + "\n";
}

}  // namespace ehub
