#pragma once

#include "ehub/hub_model.hpp"
#include "ehub/operation_model.hpp"
#include "ehub/scenarios.hpp"

namespace fixtures {

// Three energies, two boilers, flat 1 MW heat demand over two hours.
// Electricity may be exported but earns nothing.
inline ehub::HubSpec desk_a_spec() {
  ehub::HubSpec spec;
  spec.energies = {{"elec", true, true, false, ""}, {"gas", true, false, false, ""}, {"heat", false, false, true, ""}};
  spec.grid = {{"elec", 0.0, 0.25, 4}, {"gas", 0.0, 0.25, 4}, {"heat", 0.0, 0.25, 4}};
  spec.converters = {{"EB", "elec", {{"heat", 1.0}}, 1.0, 1000.0, 2}, {"AB", "gas", {{"heat", 0.9}}, 2.0, 800.0, 2}};
  return spec;
}

inline ehub::DayValues desk_a_day() {
  auto d = ehub::DayValues::zeros(3, 2);
  for (int t = 0; t < 2; ++t) {
    d.price[0][t] = 100.0;
    d.emissions[0][t] = 0.1;
    d.price[1][t] = 50.0;
    d.emissions[1][t] = 0.181;
    d.availability[2][t] = 0.0;
    d.demand[2][t] = 1.0;
  }
  return d;
}

inline ehub::ScenarioSet desk_a_scenarios() {
  return ehub::single_day({"elec", "gas", "heat"}, desk_a_day(), 1.0, 365);
}

// Plan in counts: units of EB, AB; grid steps of 0.25 MW for elec, gas.
inline ehub::InvestmentPlan desk_a_plan(long eb, long ab, long elec_steps, long gas_steps) {
  ehub::InvestmentPlan p;
  p.grid = {elec_steps, gas_steps, 0};
  p.units = {eb, ab};
  return p;
}

// Device set around an electricity bus: grid, PV, CHP and a battery feed it;
// chiller, electric boiler, heat pump, power-to-gas, the battery and the
// electric demand draw from it.
inline ehub::HubSpec fig2_spec() {
  ehub::HubSpec spec;
  spec.energies = {{"elec", true, true, true, ""},  {"pv", true, false, false, "elec"}, {"gas", true, false, false, ""},
                   {"heat", false, false, true, ""}, {"cool", false, false, true, ""}};
  spec.converters = {
      {"CHP", "gas", {{"elec", 0.35}, {"heat", 0.45}}, 1.0, 100.0, 2},
      {"CERG", "elec", {{"cool", 0.9}}, 1.0, 100.0, 2},
      {"EB", "elec", {{"heat", 0.95}}, 1.0, 100.0, 2},
      {"HP", "elec", {{"heat", 0.9}}, 1.0, 100.0, 2},
      {"PTG", "elec", {{"gas", 0.6}}, 1.0, 100.0, 2},
  };
  ehub::StorageSpec bat;
  bat.id = "BAT";
  bat.energy = "elec";
  bat.charge_efficiency = 0.95;
  bat.discharge_efficiency = 0.95;
  spec.storages = {bat};
  return spec;
}

}  // namespace fixtures
