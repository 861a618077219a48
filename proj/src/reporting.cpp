#include "ehub/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ehub/errors.hpp"

namespace ehub {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double num(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  throw DataError("not a number: '" + s + "'");
}

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> vec(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(num(x));
  return v;
}

json plan_json(const HubTopology& topo, const InvestmentPlan& p) {
  check_plan(topo, p);
  json j;
  for (std::size_t m = 0; m < p.grid.size(); ++m) j["grid"][topo.energies[m]] = p.grid[m];
  j["units"] = json::object();
  for (int g = 0; g < topo.num_converters(); ++g) j["units"][topo.spec.converters[g].id] = p.units[g];
  j["storage_power"] = json::object();
  j["storage_energy"] = json::object();
  for (int g = 0; g < topo.num_storages(); ++g) {
    j["storage_power"][topo.spec.storages[g].id] = p.storage_power[g];
    j["storage_energy"][topo.spec.storages[g].id] = p.storage_energy[g];
  }
  return j;
}

InvestmentPlan plan_from(const HubTopology& topo, const json& j) {
  auto p = InvestmentPlan::zero(topo);
  auto get = [&](const char* section, const std::string& id) -> long {
    if (!j.contains(section) || !j[section].contains(id)) {
      throw DataError(std::string("plan is missing ") + section + " entry '" + id + "'");
    }
    return j[section][id].get<long>();
  };
  for (std::size_t m = 0; m < p.grid.size(); ++m) p.grid[m] = get("grid", topo.energies[m]);
  for (int g = 0; g < topo.num_converters(); ++g) p.units[g] = get("units", topo.spec.converters[g].id);
  for (int g = 0; g < topo.num_storages(); ++g) {
    p.storage_power[g] = get("storage_power", topo.spec.storages[g].id);
    p.storage_energy[g] = get("storage_energy", topo.spec.storages[g].id);
  }
  return p;
}

std::string csv_num(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

const char* framework_name(Framework f) {
  switch (f) {
    case Framework::F1: return "F1";
    case Framework::F2: return "F2";
    case Framework::F3: return "F3";
    case Framework::F4: return "F4";
  }
  return "?";
}

std::string format_money(double v, int decimals) {
  if (!std::isfinite(v)) return csv_num(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v));
  std::string s = buf;
  const auto dot = s.find('.');
  std::string whole = s.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : s.substr(dot);
  for (int i = static_cast<int>(whole.size()) - 3; i > 0; i -= 3) whole.insert(static_cast<std::size_t>(i), ",");
  return (v < 0 && std::stod(buf) != 0.0 ? "-" : "") + whole + frac;
}

std::string result_to_json(const FrameworkResult& r, const HubTopology& topo, const RunInfo& info) {
  json j;
  j["framework"] = static_cast<int>(r.framework);
  j["feasible"] = r.feasible;
  j["status"] = r.status;
  j["message"] = r.message;
  j["plan"] = plan_json(topo, r.plan);
  j["plan_text"] = describe_plan(topo, r.plan);
  const auto& b = r.breakdown;
  j["breakdown"] = {{"investment", num(b.investment)}, {"operate", vec(b.operate)},     {"revenue", vec(b.revenue)},
                    {"emissions", vec(b.emissions)},   {"tax", vec(b.tax)},             {"npv_operate", num(b.npv_operate)},
                    {"total", num(b.total)}};
  j["total"] = num(r.total);
  j["total_ex_tax"] = num(r.total_ex_tax);
  j["achieved_emissions"] = num(r.achieved_emissions);
  j["price"] = r.price ? num(*r.price) : json(nullptr);
  j["objective"] = num(r.objective);
  j["bound"] = num(r.bound);
  j["gap"] = num(r.gap);
  j["nodes"] = r.nodes;
  j["iterations"] = r.iterations;
  j["warm_start_used"] = r.warm_start_used;
  j["warm_start_reason"] = r.warm_start_reason;
  j["big_m"] = num(r.big_m);
  j["seconds"] = num(r.seconds);
  j["probes"] = json::array();
  for (const auto& p : r.probes) {
    j["probes"].push_back({{"price", num(p.price)},
                           {"feasible", p.feasible},
                           {"emissions", num(p.emissions)},
                           {"total", num(p.total)},
                           {"plan", plan_json(topo, p.plan)}});
  }
  j["warnings"] = r.warnings;
  j["complexity"] = {{"integer", r.complexity.integer_vars},
                     {"binary", r.complexity.binary_vars},
                     {"continuous", r.complexity.continuous_vars},
                     {"constraints", r.complexity.constraints}};
  j["certificate"] = r.certificate ? plan_json(topo, *r.certificate) : json(nullptr);
  j["certificate_emissions"] = num(r.certificate_emissions);
  j["trajectory"] = json::array();
  for (const auto& t : r.trajectory) {
    j["trajectory"].push_back({num(t.seconds), t.nodes, num(t.bound), num(t.incumbent)});
  }
  j["run"] = {{"manifest", info.manifest}, {"seed", info.seed}, {"target", info.target ? num(*info.target) : json(nullptr)}};
  return j.dump(2) + "\n";
}

FrameworkResult result_from_json(const std::string& text, const HubTopology& topo) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("result document: ") + e.what());
  }
  FrameworkResult r;
  try {
    r.framework = static_cast<Framework>(j.at("framework").get<int>());
    r.feasible = j.at("feasible").get<bool>();
    r.status = j.at("status").get<std::string>();
    r.message = j.at("message").get<std::string>();
    r.plan = plan_from(topo, j.at("plan"));
    const auto& b = j.at("breakdown");
    r.breakdown.investment = num(b.at("investment"));
    r.breakdown.operate = vec(b.at("operate"));
    r.breakdown.revenue = vec(b.at("revenue"));
    r.breakdown.emissions = vec(b.at("emissions"));
    r.breakdown.tax = vec(b.at("tax"));
    r.breakdown.npv_operate = num(b.at("npv_operate"));
    r.breakdown.total = num(b.at("total"));
    r.total = num(j.at("total"));
    r.total_ex_tax = num(j.at("total_ex_tax"));
    r.achieved_emissions = num(j.at("achieved_emissions"));
    if (!j.at("price").is_null()) r.price = num(j.at("price"));
    r.objective = num(j.at("objective"));
    r.bound = num(j.at("bound"));
    r.gap = num(j.at("gap"));
    r.nodes = j.at("nodes").get<long>();
    r.iterations = j.at("iterations").get<int>();
    r.warm_start_used = j.at("warm_start_used").get<bool>();
    r.warm_start_reason = j.at("warm_start_reason").get<std::string>();
    r.big_m = num(j.at("big_m"));
    r.seconds = num(j.at("seconds"));
    for (const auto& p : j.at("probes")) {
      r.probes.push_back({num(p.at("price")), p.at("feasible").get<bool>(), num(p.at("emissions")), num(p.at("total")),
                          plan_from(topo, p.at("plan"))});
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    const auto& c = j.at("complexity");
    r.complexity = {c.at("integer").get<long>(), c.at("binary").get<long>(), c.at("continuous").get<long>(),
                    c.at("constraints").get<long>()};
    if (!j.at("certificate").is_null()) r.certificate = plan_from(topo, j.at("certificate"));
    r.certificate_emissions = num(j.at("certificate_emissions"));
    for (const auto& t : j.at("trajectory")) {
      r.trajectory.push_back({num(t.at(0)), t.at(1).get<long>(), num(t.at(2)), num(t.at(3))});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("result document: ") + e.what());
  }
  return r;
}

std::string summary_text(const FrameworkResult& r, const HubTopology& topo, const ScenarioSet& scen,
                         const RunInfo& info) {
  std::ostringstream s;
  s << "framework: " << framework_name(r.framework) << "\n";
  s << "status: " << r.status << "\n";
  if (!r.message.empty()) s << "message: " << r.message << "\n";
  if (info.target) s << "emissions_target_t: " << format_money(*info.target) << "\n";
  s << "seed: " << info.seed << "\n";
  if (r.feasible) {
    s << "plan: " << describe_plan(topo, r.plan) << "\n";
    s << "total_cost: " << format_money(r.total) << " ¥\n";
    if (r.framework == Framework::F2) s << "total_cost_ex_tax: " << format_money(r.total_ex_tax) << " ¥\n";
    s << "investment_cost: " << format_money(r.breakdown.investment) << " ¥\n";
    s << "net_operating_cost_npv: " << format_money(r.breakdown.npv_operate) << " ¥\n";
    s << "max_annual_emissions_t: " << format_money(r.achieved_emissions) << "\n";
    for (int y = 0; y < scen.num_years(); ++y) {
      s << "year_" << y + 1 << ": operate " << format_money(r.breakdown.operate[y]) << " ¥, revenue "
        << format_money(r.breakdown.revenue[y]) << " ¥, emissions " << format_money(r.breakdown.emissions[y])
        << " t, tax " << format_money(r.breakdown.tax[y]) << " ¥\n";
    }
  }
  if (r.price) {
    s << (r.framework == Framework::F4 ? "social_cost_of_carbon" : "carbon_tax") << ": " << format_money(*r.price, 2)
      << " ¥/t\n";
  }
  if (r.certificate) {
    s << "least_emitting_plan: " << describe_plan(topo, *r.certificate) << " ("
      << format_money(r.certificate_emissions) << " t)\n";
  }
  s << "solver: objective " << csv_num(r.objective) << ", bound " << csv_num(r.bound) << ", gap " << csv_num(r.gap)
    << ", nodes " << r.nodes << ", iterations " << r.iterations << "\n";
  if (r.big_m > 0.0) s << "big_m: " << csv_num(r.big_m) << "\n";
  s << "warm_start: " << (r.warm_start_used ? "used" : "not used");
  if (!r.warm_start_reason.empty()) s << " (" << r.warm_start_reason << ")";
  s << "\n";
  s << "model_size: " << r.complexity.integer_vars << " integer, " << r.complexity.binary_vars << " binary, "
    << r.complexity.continuous_vars << " continuous, " << r.complexity.constraints << " constraints\n";
  for (const auto& w : r.warnings) s << "warning: " << w << "\n";
  return s.str();
}

void write_dispatch_csv(const HubTopology& topo, const Evaluation& ev, std::ostream& out) {
  out << "year,day,period,kind,id,value\n";
  for (std::size_t y = 0; y < ev.days.size(); ++y) {
    for (std::size_t d = 0; d < ev.days[y].size(); ++d) {
      const auto& o = ev.days[y][d];
      for (std::size_t t = 0; t < o.flows.size(); ++t) {
        const std::string key = std::to_string(y + 1) + "," + std::to_string(d) + "," + std::to_string(t + 1) + ",";
        for (std::size_t l = 0; l < topo.branches.size(); ++l) {
          out << key << "flow," << topo.branches[l].id << "," << csv_num(o.flows[t][l]) << "\n";
        }
        for (int g = 0; g < topo.num_storages(); ++g) {
          out << key << "soc," << topo.spec.storages[g].id << "," << csv_num(o.soc[t][g]) << "\n";
        }
        for (std::size_t m = 0; m < topo.energies.size(); ++m) {
          if (!topo.spec.energies[m].exportable) continue;
          out << key << "export," << topo.energies[m] << "," << csv_num(o.exports[t][m]) << "\n";
        }
      }
    }
  }
}

void write_frontier_csv(const std::vector<ParetoPoint>& points, std::ostream& out) {
  out << "target_tCO2e,total_cost,invest_cost,net_operate_cost,carbon_price,achieved_tCO2e,gap,source\n";
  for (const auto& p : points) {
    out << csv_num(p.target) << ",";
    if (!p.feasible) {
      out << ",,,,,,failed\n";
      continue;
    }
    out << csv_num(p.upper) << "," << csv_num(p.invest) << "," << csv_num(p.net_operate) << ","
        << (p.price ? csv_num(*p.price) : "") << "," << csv_num(p.achieved) << "," << csv_num(p.gap) << ","
        << to_string(p.source) << "\n";
  }
}

void write_combined_csv(const std::map<Framework, std::vector<ParetoPoint>>& frontiers, std::ostream& out) {
  out << "step";
  std::size_t rows = 0;
  for (const auto& [f, pts] : frontiers) {
    const std::string n = framework_name(f);
    out << "," << n << "_target_tCO2e," << n << "_total_cost," << n << "_achieved_tCO2e";
    rows = std::max(rows, pts.size());
  }
  out << "\n";
  for (std::size_t k = 0; k < rows; ++k) {
    out << k;
    for (const auto& [f, pts] : frontiers) {
      if (k >= pts.size()) {
        out << ",,,";
        continue;
      }
      const auto& p = pts[k];
      out << "," << csv_num(p.target) << ",";
      if (p.feasible) out << csv_num(p.upper) << "," << csv_num(p.achieved);
      else out << ",";
    }
    out << "\n";
  }
}

std::string cost_table(const std::vector<ParetoPoint>& points) {
  std::ostringstream s;
  char line[160];
  std::snprintf(line, sizeof line, "%14s %16s %16s %18s\n", "target (t)", "total (¥)", "investment (¥)",
                "net operational (¥)");
  s << line;
  for (const auto& p : points) {
    if (!p.feasible) {
      std::snprintf(line, sizeof line, "%14s %16s %16s %18s\n", format_money(p.target).c_str(), "-", "-", "-");
    } else {
      std::snprintf(line, sizeof line, "%14s %16s %16s %18s\n", format_money(p.target).c_str(),
                    format_money(p.upper).c_str(), format_money(p.invest).c_str(),
                    format_money(p.net_operate).c_str());
    }
    s << line;
  }
  return s.str();
}

}  // namespace ehub
