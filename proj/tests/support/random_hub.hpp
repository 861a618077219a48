#pragma once

#include <algorithm>
#include <random>

#include "ehub/hub_model.hpp"
#include "ehub/operation_model.hpp"
#include "ehub/scenarios.hpp"

namespace fixtures {

struct RandomHub {
  ehub::HubSpec spec;
  ehub::DayValues day;
  int periods = 3;
};

// Small elec/gas/heat hub with 1-3 converters drawn from a fixed pool and an
// optional storage. Heat always has a source, so a large enough plan is feasible.
inline RandomHub random_hub(std::mt19937_64& rng, bool allow_storage = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomHub h;
  auto& s = h.spec;
  const bool export_elec = u(rng) < 0.5;
  s.energies = {{"elec", true, export_elec, u(rng) < 0.5, ""},
                {"gas", true, false, false, ""},
                {"heat", false, false, true, ""}};
  s.grid = {{"elec", 10.0 + 40 * u(rng), 0.5, 4}, {"gas", 10.0 + 40 * u(rng), 0.5, 4}, {"heat", 0.0, 0.5, 4}};
  const std::vector<ehub::ConverterSpec> pool = {
      {"EB", "elec", {{"heat", 0.95 + 0.05 * u(rng)}}, 1.0, 100 + 900 * u(rng), 2},
      {"AB", "gas", {{"heat", 0.8 + 0.15 * u(rng)}}, 1.0, 100 + 900 * u(rng), 2},
      {"CHP", "gas", {{"elec", 0.3 + 0.1 * u(rng)}, {"heat", 0.4 + 0.1 * u(rng)}}, 1.0, 100 + 900 * u(rng), 2},
      {"HP", "elec", {{"heat", 0.5 + 0.5 * u(rng)}}, 0.5, 100 + 900 * u(rng), 2},
  };
  std::vector<int> pick = {static_cast<int>(rng() % 2)};  // EB or AB guarantees a heat source
  for (int i = 2; i < 4; ++i) {
    if (u(rng) < 0.5) pick.push_back(i);
  }
  if (u(rng) < 0.3) pick.push_back(1 - pick[0]);
  std::sort(pick.begin(), pick.end());
  for (int i : pick) s.converters.push_back(pool[i]);
  if (allow_storage && u(rng) < 0.5) {
    ehub::StorageSpec st;
    st.id = "TES";
    st.energy = u(rng) < 0.5 ? "heat" : "elec";
    st.charge_efficiency = 0.8 + 0.2 * u(rng);
    st.discharge_efficiency = 0.8 + 0.2 * u(rng);
    st.power_cost = 50 * u(rng);
    st.energy_cost = 50 * u(rng);
    st.power_step = 0.5;
    st.energy_step = 1.0;
    s.storages.push_back(st);
  }

  h.day = ehub::DayValues::zeros(3, h.periods);
  for (int t = 0; t < h.periods; ++t) {
    h.day.price[0][t] = 40 + 120 * u(rng);
    h.day.feedin[0][t] = export_elec ? 0.5 * h.day.price[0][t] * u(rng) : 0.0;
    h.day.emissions[0][t] = -0.05 + 0.5 * u(rng);
    h.day.price[1][t] = 30 + 40 * u(rng);
    h.day.emissions[1][t] = 0.181;
    h.day.availability[0][t] = 0.5 + 0.5 * u(rng);
    h.day.availability[2][t] = 0.0;
    h.day.demand[0][t] = s.energies[0].demand ? 0.5 * u(rng) : 0.0;
    h.day.demand[2][t] = 0.2 + 1.3 * u(rng);
  }
  return h;
}

// Uniform plan within every bit range.
inline ehub::InvestmentPlan random_plan(const ehub::HubTopology& topo, std::mt19937_64& rng) {
  auto p = ehub::InvestmentPlan::zero(topo);
  auto draw = [&](int bits) { return static_cast<long>(rng() % (ehub::max_count(bits) + 1)); };
  for (std::size_t m = 0; m < p.grid.size(); ++m) p.grid[m] = draw(topo.grid[m].bits);
  for (int g = 0; g < topo.num_converters(); ++g) p.units[g] = draw(topo.spec.converters[g].bits);
  for (int g = 0; g < topo.num_storages(); ++g) {
    p.storage_power[g] = draw(topo.spec.storages[g].power_bits);
    p.storage_energy[g] = draw(topo.spec.storages[g].energy_bits);
  }
  return p;
}

// Every count at its maximum.
inline ehub::InvestmentPlan full_plan(const ehub::HubTopology& topo) {
  auto p = ehub::InvestmentPlan::zero(topo);
  for (std::size_t m = 0; m < p.grid.size(); ++m) p.grid[m] = ehub::max_count(topo.grid[m].bits);
  for (int g = 0; g < topo.num_converters(); ++g) p.units[g] = ehub::max_count(topo.spec.converters[g].bits);
  for (int g = 0; g < topo.num_storages(); ++g) {
    p.storage_power[g] = ehub::max_count(topo.spec.storages[g].power_bits);
    p.storage_energy[g] = ehub::max_count(topo.spec.storages[g].energy_bits);
  }
  return p;
}

}  // namespace fixtures
