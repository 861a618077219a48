// Command-line front end: validate inputs, reduce days, solve one framework,
// sweep Pareto frontiers, and print reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehub/errors.hpp"
#include "ehub/hub_io.hpp"
#include "ehub/manifest.hpp"
#include "ehub/reporting.hpp"

namespace fs = std::filesystem;
using namespace ehub;

namespace {

enum Exit { kOk = 0, kData = 1, kUsage = 2, kBudget = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All file output goes through here, from the main thread.
void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

Framework framework_arg(const std::string& s) {
  try {
    return parse_framework(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int exit_for(const FrameworkResult& r) {
  if (r.feasible && r.status == "optimal") return kOk;
  if (r.status == "infeasible" || r.status == "tax-infeasible" || r.status == "scoc-infeasible") return kData;
  return kBudget;
}

struct Overrides {
  std::string framework;
  std::string frameworks;
  double cap = 0.0;
  double reduction = 0.0;
  int resolution = 0;
  double price_tol = 0.0;
  double gap_tol = -1.0;
  double time_limit = -1.0;
  long node_limit = -1;
  int threads = 0;
  bool benders = false;
  std::string out;
  CLI::Option* cap_opt = nullptr;
  CLI::Option* reduction_opt = nullptr;

  void apply(RunManifest& m) const {
    if (!framework.empty()) {
      m.framework = framework_arg(framework);
      if (frameworks.empty()) m.frameworks = {m.framework};
    }
    if (!frameworks.empty()) {
      m.frameworks.clear();
      std::stringstream ss(frameworks);
      std::string f;
      while (std::getline(ss, f, ',')) m.frameworks.push_back(framework_arg(f));
    }
    if (cap_opt && cap_opt->count()) {
      m.emissions_cap = cap;
      m.reduction_percent.reset();
    }
    if (reduction_opt && reduction_opt->count()) {
      if (reduction < 0.0 || reduction > 100.0) throw UsageError("--reduction-percent must be in [0, 100]");
      m.reduction_percent = reduction;
      m.emissions_cap.reset();
    }
    if (resolution != 0) {
      if (resolution < 1) throw UsageError("--resolution must be at least 1");
      m.resolution = resolution;
    }
    if (price_tol != 0.0) {
      if (price_tol < 0.0) throw UsageError("--price-tolerance must be positive");
      m.price_tolerance = price_tol;
    }
    if (gap_tol >= 0.0) m.gap_tolerance = gap_tol;
    if (time_limit >= 0.0) m.time_limit_s = time_limit;
    if (node_limit >= 0) m.node_limit = node_limit;
    if (threads != 0) {
      if (threads < 1) throw UsageError("--threads must be at least 1");
      m.threads = threads;
    }
    if (benders) m.benders = 1;
    if (!out.empty()) m.output = out;
  }
};

void add_overrides(CLI::App* sub, Overrides& o, bool sweep) {
  if (sweep) {
    sub->add_option("--frameworks", o.frameworks, "Comma-separated frameworks, e.g. F1,F3");
    sub->add_option("--resolution", o.resolution, "Number of targets from the baseline down");
  } else {
    sub->add_option("--framework", o.framework, "F1, F2, F3 or F4");
    o.cap_opt = sub->add_option("--emissions-cap", o.cap, "Annual emissions limit, t");
    o.reduction_opt = sub->add_option("--reduction-percent", o.reduction, "Cut from the baseline emissions, %");
    sub->add_flag("--benders", o.benders, "Solve framework 1 by Benders decomposition");
  }
  sub->add_option("--price-tolerance", o.price_tol, "Bisection tolerance, per t");
  sub->add_option("--gap-tolerance", o.gap_tol, "Relative MILP gap");
  sub->add_option("--time-limit", o.time_limit, "Seconds per MILP, 0 for none");
  sub->add_option("--node-limit", o.node_limit, "Nodes per MILP, 0 for none");
  sub->add_option("--threads", o.threads, "Worker threads");
  sub->add_option("--out", o.out, "Output directory");
}

FrameworkResult solve_one(const RunManifest& m, const LoadedRun& run, std::optional<double>& target) {
  EconConfig econ = econ_of(m);
  if (m.reduction_percent) {
    EconConfig base = econ;
    base.emissions_cap.reset();
    const auto b = solve_framework(m.framework, run.topo, run.scenarios, base);
    if (!b.feasible) return b;
    econ.emissions_cap = b.achieved_emissions * (1.0 - *m.reduction_percent / 100.0);
    econ.warm_start = b.plan;
  }
  target = econ.emissions_cap;
  if (m.benders) {
    if (m.framework != Framework::F1) throw UsageError("--benders applies to framework 1 only");
    econ.benders_iterations = 50;
    return solve_f1_benders(run.topo, run.scenarios, econ);
  }
  return solve_framework(m.framework, run.topo, run.scenarios, econ);
}

int cmd_validate(const std::string& manifest, const std::string& hub, const std::vector<std::string>& series,
                 int periods, int days) {
  RunManifest m;
  if (!manifest.empty()) {
    m = load_manifest(manifest);
  } else {
    if (hub.empty()) throw UsageError("give --manifest or --hub");
    m.hub = hub;
    m.periods = periods;
    m.days = days;
    for (const auto& s : series) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--series expects energy=path, got '" + s + "'");
      m.series[s.substr(0, eq)] = s.substr(eq + 1);
    }
  }
  const auto spec = load_hub_spec(m.hub);
  const auto topo = build_topology(spec);
  std::cout << "hub: " << topo.energies.size() << " energies, " << topo.num_converters() << " converters, "
            << topo.num_storages() << " storages, " << topo.branches.size() << " branches\n";
  if (!m.series.empty()) {
    const auto year = load_year_series(topo.energies, m.series, m.periods, m.dt, m.days);
    std::cout << "series: " << year.days.size() << " days of " << year.periods << " periods\n";
  }
  std::cout << "ok\n";
  return kOk;
}

int cmd_reduce(const std::string& manifest, int k, std::uint64_t seed, bool seed_given, const std::string& out) {
  auto m = load_manifest(manifest);
  if (k != 0) m.representative_days = k;
  if (seed_given) m.seed = seed;
  if (m.representative_days < 1) throw UsageError("--k must be at least 1");
  const auto spec = load_hub_spec(m.hub);
  const auto topo = build_topology(spec);
  const auto year = load_year_series(topo.energies, m.series, m.periods, m.dt, m.days);
  const auto reduced = reduce_days(year, m.representative_days, m.seed);
  const fs::path dir = out.empty() ? fs::path(m.output) / "days" : fs::path(out);
  nlohmann::json j;
  j["seed"] = m.seed;
  j["k"] = m.representative_days;
  j["days"] = nlohmann::json::array();
  YearSeries reps;
  reps.energies = year.energies;
  reps.periods = year.periods;
  reps.dt = year.dt;
  for (const auto& d : reduced.days) {
    j["days"].push_back({{"source_day", d.source_day + 1}, {"weight", d.weight}});
    reps.days.push_back(d.years.front());
  }
  write_file(dir / "representative_days.json", j.dump(2) + "\n");
  for (std::size_t e = 0; e < reps.energies.size(); ++e) {
    std::ostringstream csv;
    write_series_csv(reps, static_cast<int>(e), csv);
    write_file(dir / (reps.energies[e] + ".csv"), csv.str());
  }
  for (const auto& d : reduced.days) {
    std::cout << "day " << d.source_day + 1 << " weight " << d.weight << "\n";
  }
  return kOk;
}

int cmd_solve(const std::string& manifest, const Overrides& o) {
  auto m = load_manifest(manifest);
  o.apply(m);
  const auto run = load_run(m);
  std::optional<double> target;
  const auto r = solve_one(m, run, target);
  const RunInfo info{manifest, m.seed, target};
  const fs::path dir = m.output;
  const auto summary = summary_text(r, run.topo, run.scenarios, info);
  write_file(dir / "summary.txt", summary);
  write_file(dir / "result.json", result_to_json(r, run.topo, info));
  write_file(dir / "manifest.json", manifest_to_json(m));
  if (r.feasible) {
    EvalOptions eo;
    eo.keep_dispatch = true;
    eo.threads = m.threads;
    if (r.framework == Framework::F1 || r.framework == Framework::F2) {
      eo.mode = DispatchMode::Cooperative;
      eo.emissions_cap = target;
      if (r.framework == Framework::F2 && r.price) eo.tax = *r.price;
    }
    std::ostringstream csv;
    write_dispatch_csv(run.topo, evaluate_plan(run.topo, run.scenarios, r.plan, eo), csv);
    write_file(dir / "dispatch.csv", csv.str());
  }
  std::cout << summary;
  return exit_for(r);
}

int cmd_pareto(const std::string& manifest, const Overrides& o) {
  auto m = load_manifest(manifest);
  o.apply(m);
  const auto run = load_run(m);
  const fs::path dir = m.output;
  std::map<Framework, std::vector<ParetoPoint>> all;
  std::ostringstream report;
  int code = kOk;
  for (auto f : m.frameworks) {
    const auto pts = pareto_sweep(f, run.topo, run.scenarios, m.resolution, econ_of(m), m.threads);
    std::ostringstream csv;
    write_frontier_csv(pts, csv);
    write_file(dir / (std::string("frontier_") + framework_name(f) + ".csv"), csv.str());
    report << framework_name(f) << "\n" << cost_table(pts) << "\n";
    // Targets below the least achievable emissions are part of a frontier;
    // only an empty frontier is an error. Re-evaluation adds float noise to
    // the gap, hence the floor.
    bool any = false;
    for (const auto& p : pts) {
      any = any || p.feasible;
      if (p.feasible && p.gap > std::max(m.gap_tolerance, 1e-6)) code = kBudget;
    }
    if (!any) code = std::max(code, static_cast<int>(kData));
    all[f] = pts;
  }
  if (all.size() > 1) {
    std::ostringstream csv;
    write_combined_csv(all, csv);
    write_file(dir / "frontier_combined.csv", csv.str());
  }
  write_file(dir / "report.txt", report.str());
  write_file(dir / "manifest.json", manifest_to_json(m));
  std::cout << report.str();
  return code;
}

std::vector<ParetoPoint> read_frontier(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);
  if (line.rfind("target_tCO2e,", 0) != 0) throw DataError(path + ": not a frontier file");
  std::vector<ParetoPoint> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw ParseError(path, lineno, 1, "expected 8 fields");
    ParetoPoint p;
    try {
      p.target = std::stod(f[0]);
      p.feasible = f[7] != "failed";
      if (p.feasible) {
        p.upper = std::stod(f[1]);
        p.invest = std::stod(f[2]);
        p.net_operate = std::stod(f[3]);
        p.achieved = std::stod(f[5]);
      }
    } catch (const std::exception&) {
      throw ParseError(path, lineno, 1, "bad number");
    }
    pts.push_back(p);
  }
  return pts;
}

int cmd_report(const std::vector<std::string>& frontiers, const std::string& result, const std::string& manifest) {
  if (frontiers.empty() && result.empty()) throw UsageError("give --frontier or --result");
  for (const auto& path : frontiers) std::cout << path << "\n" << cost_table(read_frontier(path)) << "\n";
  if (!result.empty()) {
    if (manifest.empty()) throw UsageError("--result needs --manifest for the hub and days");
    const auto m = load_manifest(manifest);
    const auto run = load_run(m);
    const auto r = result_from_json(read_text_file(result), run.topo);
    std::cout << summary_text(r, run.topo, run.scenarios, {manifest, m.seed, std::nullopt});
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy hub capacity planning under emissions policies"};
  app.require_subcommand(1);

  std::string manifest, hub;
  std::vector<std::string> series;
  int periods = 24, days = 365;
  auto* validate = app.add_subcommand("validate", "Check a hub description and its time series");
  validate->add_option("--manifest", manifest, "Run manifest");
  validate->add_option("--hub", hub, "Hub description (JSON)");
  validate->add_option("--series", series, "energy=path, repeatable");
  validate->add_option("--periods", periods, "Periods per day");
  validate->add_option("--days", days, "Days per year");

  int k = 0;
  std::uint64_t seed = 0;
  std::string reduce_out;
  auto* reduce = app.add_subcommand("reduce-days", "Cluster the year into representative days");
  reduce->add_option("--manifest", manifest, "Run manifest")->required();
  reduce->add_option("--k", k, "Number of representative days");
  auto* seed_opt = reduce->add_option("--seed", seed, "Clustering seed");
  reduce->add_option("--out", reduce_out, "Output directory");

  Overrides solve_o, pareto_o;
  auto* solve = app.add_subcommand("solve", "Solve one framework");
  solve->add_option("--manifest", manifest, "Run manifest")->required();
  add_overrides(solve, solve_o, false);

  auto* pareto = app.add_subcommand("pareto", "Sweep emissions targets from the baseline down");
  pareto->add_option("--manifest", manifest, "Run manifest")->required();
  add_overrides(pareto, pareto_o, true);

  std::vector<std::string> frontiers;
  std::string result;
  auto* report = app.add_subcommand("report", "Print cost tables or a result summary");
  report->add_option("--frontier", frontiers, "Frontier CSV, repeatable");
  report->add_option("--result", result, "Result document");
  report->add_option("--manifest", manifest, "Run manifest of the result");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(manifest, hub, series, periods, days);
    if (*reduce) return cmd_reduce(manifest, k, seed, seed_opt->count() > 0, reduce_out);
    if (*solve) return cmd_solve(manifest, solve_o);
    if (*pareto) return cmd_pareto(manifest, pareto_o);
    if (*report) return cmd_report(frontiers, result, manifest);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kBudget;
  }
  return kUsage;
}
