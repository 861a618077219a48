#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ehub/frameworks.hpp"

namespace ehub {

/// Run context echoed into every output so results can be reproduced.
struct RunInfo {
  std::string manifest;
  std::uint64_t seed = 0;
  std::optional<double> target;
};

/// Machine-readable result. `result_from_json` restores every field;
/// non-finite numbers are written as the strings "inf" and "-inf".
std::string result_to_json(const FrameworkResult& r, const HubTopology& topo, const RunInfo& info);
FrameworkResult result_from_json(const std::string& text, const HubTopology& topo);

/// Human-readable `key: value` summary with the model size tally.
std::string summary_text(const FrameworkResult& r, const HubTopology& topo, const ScenarioSet& scen,
                         const RunInfo& info);

/// Long-format dispatch: year,day,period,kind,id,value with kind one of
/// flow (MW on a branch), soc (MWh in a storage), export (MW sold).
void write_dispatch_csv(const HubTopology& topo, const Evaluation& ev, std::ostream& out);

/// target_tCO2e,total_cost,invest_cost,net_operate_cost,carbon_price,achieved_tCO2e,gap,source
void write_frontier_csv(const std::vector<ParetoPoint>& points, std::ostream& out);

/// Frontiers side by side, aligned on the k-th target of each sweep.
void write_combined_csv(const std::map<Framework, std::vector<ParetoPoint>>& frontiers, std::ostream& out);

/// Plain-text cost table: target, total, investment, net operational.
std::string cost_table(const std::vector<ParetoPoint>& points);

/// 41355.56 -> "41,355.6"
std::string format_money(double v, int decimals = 1);

const char* framework_name(Framework f);

}  // namespace ehub
