#include "ehub/hub_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ehub {

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols != o.rows) throw std::invalid_argument("matrix shape mismatch");
  Matrix r(rows, o.cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < o.cols; ++j) r(i, j) += a * o(k, j);
    }
  }
  return r;
}

namespace {

std::string carrier_of(const HubSpec& spec, const std::string& energy) {
  for (const auto& e : spec.energies) {
    if (e.id == energy) return e.carrier.empty() ? e.id : e.carrier;
  }
  return energy;
}

bool efficiency_ok(double eta) { return eta > 0.0 && eta <= 1.0 && std::isfinite(eta); }

}  // namespace

void validate_spec(const HubSpec& spec) {
  if (spec.energies.empty()) throw SpecError("no energies declared");
  std::set<std::string> energies;
  for (const auto& e : spec.energies) {
    if (e.id.empty()) throw SpecError("energy with empty id");
    if (!energies.insert(e.id).second) throw SpecError("duplicate energy id '" + e.id + "'");
  }
  bool any_demand = false;
  for (const auto& e : spec.energies) {
    any_demand = any_demand || e.demand;
    if (!e.carrier.empty()) {
      if (!energies.count(e.carrier)) {
        throw SpecError("energy '" + e.id + "' has unknown carrier '" + e.carrier + "'");
      }
      if (carrier_of(spec, e.carrier) != e.carrier) {
        throw SpecError("carrier '" + e.carrier + "' of energy '" + e.id + "' is not a bus energy");
      }
    }
  }
  if (!any_demand) throw SpecError("no end-use energy declared");

  std::set<std::string> grids;
  for (const auto& g : spec.grid) {
    if (!energies.count(g.energy)) throw SpecError("grid entry for unknown energy '" + g.energy + "'");
    if (!grids.insert(g.energy).second) throw SpecError("duplicate grid entry for '" + g.energy + "'");
    if (!(g.capacity_step > 0.0)) throw SpecError("grid '" + g.energy + "' needs a positive capacity step");
    if (g.bits < 1) throw SpecError("grid '" + g.energy + "' needs at least one bit");
    if (g.capacity_cost < 0.0) throw SpecError("grid '" + g.energy + "' has negative capacity cost");
  }
  if (!(spec.default_capacity_step > 0.0) || spec.default_bits < 1) {
    throw SpecError("defaults need a positive capacity step and at least one bit");
  }

  std::set<std::string> devices;
  for (const auto& c : spec.converters) {
    if (!devices.insert(c.id).second) throw SpecError("duplicate device id '" + c.id + "'");
    if (!energies.count(c.input)) throw SpecError("converter '" + c.id + "' has unknown input '" + c.input + "'");
    if (c.outputs.empty()) throw SpecError("converter '" + c.id + "' has no outputs");
    for (const auto& o : c.outputs) {
      if (!energies.count(o.energy)) {
        throw SpecError("converter '" + c.id + "' has unknown output '" + o.energy + "'");
      }
      if (!efficiency_ok(o.efficiency)) {
        throw SpecError("converter '" + c.id + "' efficiency must lie in (0,1]");
      }
    }
    if (!(c.unit_rating > 0.0)) throw SpecError("converter '" + c.id + "' needs a positive unit rating");
    if (c.unit_cost < 0.0) throw SpecError("converter '" + c.id + "' has negative unit cost");
    if (c.bits < 1) throw SpecError("converter '" + c.id + "' needs at least one bit");
  }
  for (const auto& s : spec.storages) {
    if (!devices.insert(s.id).second) throw SpecError("duplicate device id '" + s.id + "'");
    if (!energies.count(s.energy)) throw SpecError("storage '" + s.id + "' has unknown energy '" + s.energy + "'");
    if (!efficiency_ok(s.charge_efficiency) || !efficiency_ok(s.discharge_efficiency)) {
      throw SpecError("storage '" + s.id + "' efficiency must lie in (0,1]");
    }
    if (!(s.power_step > 0.0) || !(s.energy_step > 0.0)) {
      throw SpecError("storage '" + s.id + "' needs positive capacity steps");
    }
    if (s.power_bits < 1 || s.energy_bits < 1) throw SpecError("storage '" + s.id + "' needs at least one bit");
    if (s.power_cost < 0.0 || s.energy_cost < 0.0) throw SpecError("storage '" + s.id + "' has negative cost");
  }

  // Every demanded energy must be reachable from some grid input.
  std::set<std::string> reach;
  for (const auto& e : spec.energies) {
    if (e.importable) reach.insert(carrier_of(spec, e.id));
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& c : spec.converters) {
      if (!reach.count(carrier_of(spec, c.input))) continue;
      for (const auto& o : c.outputs) grew = reach.insert(carrier_of(spec, o.energy)).second || grew;
    }
  }
  for (const auto& e : spec.energies) {
    if (e.demand && !reach.count(carrier_of(spec, e.id))) {
      throw SpecError("dangling energy '" + e.id + "': demanded but no source path");
    }
  }
}

int HubTopology::energy_index(const std::string& id) const {
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (energies[i] == id) return static_cast<int>(i);
  }
  return -1;
}

int HubTopology::port_index(const std::string& id) const {
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (ports[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int HubTopology::branch_index(const std::string& id) const {
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (branches[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

HubTopology build_topology(const HubSpec& spec) {
  validate_spec(spec);
  HubTopology t;
  t.spec = spec;
  for (const auto& e : spec.energies) {
    t.energies.push_back(e.id);
    GridSpec g{e.id, 0.0, spec.default_capacity_step, spec.default_bits};
    for (const auto& gs : spec.grid) {
      if (gs.energy == e.id) g = gs;
    }
    t.grid.push_back(g);
    if (e.carrier.empty() || e.carrier == e.id) t.buses.push_back(e.id);
  }

  std::map<std::string, int> bus_in, bus_out;
  auto add_port = [&](std::string id, PortOwner owner, std::string owner_id, PortDir dir, std::string energy,
                      bool virt = false) {
    t.ports.push_back(Port{std::move(id), owner, std::move(owner_id), dir, std::move(energy), virt});
    return static_cast<int>(t.ports.size() - 1);
  };
  for (const auto& b : t.buses) {
    bus_in[b] = add_port("bus:" + b + ":in", PortOwner::Bus, b, PortDir::Input, b);
    bus_out[b] = add_port("bus:" + b + ":out", PortOwner::Bus, b, PortDir::Output, b);
  }
  std::vector<int> grid_port(spec.energies.size(), -1), output_port(spec.energies.size(), -1);
  for (std::size_t m = 0; m < spec.energies.size(); ++m) {
    const auto& e = spec.energies[m];
    const std::string c = carrier_of(spec, e.id);
    if (e.importable) grid_port[m] = add_port("grid:" + e.id, PortOwner::GridIn, e.id, PortDir::Output, c);
    if (e.demand || e.exportable) output_port[m] = add_port("out:" + e.id, PortOwner::Output, e.id, PortDir::Input, c);
  }
  struct ConvPorts {
    int in;
    std::vector<int> out;
  };
  std::vector<ConvPorts> conv;
  for (const auto& c : spec.converters) {
    ConvPorts cp;
    cp.in = add_port(c.id + ":in", PortOwner::Converter, c.id, PortDir::Input, carrier_of(spec, c.input));
    for (const auto& o : c.outputs) {
      cp.out.push_back(add_port(c.id + ":out:" + o.energy, PortOwner::Converter, c.id, PortDir::Output,
                                carrier_of(spec, o.energy)));
    }
    conv.push_back(cp);
  }
  struct StorPorts {
    int charge, discharge, soc, tail;
  };
  std::vector<StorPorts> stor;
  for (const auto& s : spec.storages) {
    const std::string c = carrier_of(spec, s.energy);
    StorPorts sp;
    sp.charge = add_port(s.id + ":charge", PortOwner::Storage, s.id, PortDir::Input, c);
    sp.discharge = add_port(s.id + ":discharge", PortOwner::Storage, s.id, PortDir::Output, c);
    sp.soc = add_port(s.id + ":soc", PortOwner::Storage, s.id, PortDir::Input, c, true);
    sp.tail = add_port(s.id + ":soc_tail", PortOwner::Storage, s.id, PortDir::Output, c, true);
    stor.push_back(sp);
  }

  auto add_branch = [&](int from, int to, bool real) {
    t.branches.push_back(Branch{t.ports[from].id + "->" + t.ports[to].id, from, to, real});
    return static_cast<int>(t.branches.size() - 1);
  };
  std::vector<int> grid_branch(spec.energies.size(), -1), output_branch(spec.energies.size(), -1);
  for (std::size_t m = 0; m < spec.energies.size(); ++m) {
    if (grid_port[m] >= 0) grid_branch[m] = add_branch(grid_port[m], bus_in[t.ports[grid_port[m]].energy], true);
  }
  for (const auto& cp : conv) {
    for (int p : cp.out) add_branch(p, bus_in[t.ports[p].energy], true);
  }
  for (const auto& sp : stor) add_branch(sp.discharge, bus_in[t.ports[sp.discharge].energy], true);
  for (const auto& cp : conv) add_branch(bus_out[t.ports[cp.in].energy], cp.in, true);
  for (const auto& sp : stor) add_branch(bus_out[t.ports[sp.charge].energy], sp.charge, true);
  for (std::size_t m = 0; m < spec.energies.size(); ++m) {
    if (output_port[m] >= 0) {
      output_branch[m] = add_branch(bus_out[t.ports[output_port[m]].energy], output_port[m], true);
    }
  }
  for (const auto& sp : stor) add_branch(sp.tail, sp.soc, false);

  const int P = static_cast<int>(t.ports.size());
  const int L = static_cast<int>(t.branches.size());
  const int M = static_cast<int>(t.energies.size());
  const int G = t.num_devices();

  t.A = Matrix(P, L);
  t.K.assign(L, 0);
  for (int l = 0; l < L; ++l) {
    t.A(t.branches[l].from, l) = -1.0;
    t.A(t.branches[l].to, l) = 1.0;
    t.K[l] = t.branches[l].real ? 1 : 0;
  }

  for (const auto& cp : conv) {
    for (int p : cp.out) t.out_ports.push_back(p);
  }
  for (const auto& sp : stor) t.out_ports.push_back(sp.discharge);
  for (const auto& b : t.buses) t.out_ports.push_back(bus_out[b]);
  t.H = Matrix(static_cast<int>(t.out_ports.size()), P);
  int row = 0;
  for (std::size_t g = 0; g < conv.size(); ++g) {
    for (std::size_t k = 0; k < conv[g].out.size(); ++k) {
      t.H(row, conv[g].in) = spec.converters[g].outputs[k].efficiency;
      t.H(row, conv[g].out[k]) = 1.0;
      ++row;
    }
  }
  for (std::size_t s = 0; s < stor.size(); ++s) {
    t.H(row, stor[s].discharge) = 1.0 / spec.storages[s].discharge_efficiency;
    t.H(row, stor[s].charge) = spec.storages[s].charge_efficiency;
    t.H(row, stor[s].soc) = 1.0;
    ++row;
  }
  for (const auto& b : t.buses) {
    t.H(row, bus_in[b]) = 1.0;
    t.H(row, bus_out[b]) = 1.0;
    ++row;
  }

  t.J = Matrix(G, P);
  for (std::size_t g = 0; g < conv.size(); ++g) t.J(static_cast<int>(g), conv[g].in) = 1.0;
  for (std::size_t s = 0; s < stor.size(); ++s) t.J(t.storage_device(static_cast<int>(s)), stor[s].soc) = 1.0;

  t.U = Matrix(M, L);
  t.W = Matrix(M, L);
  for (int m = 0; m < M; ++m) {
    if (grid_branch[m] >= 0) t.U(m, grid_branch[m]) = 1.0;
    if (output_branch[m] >= 0) t.W(m, output_branch[m]) = 1.0;
  }
  t.Z = t.H * t.A;
  return t;
}

int bus_branch_count(const HubTopology& topo, const std::string& energy) {
  const std::string c = carrier_of(topo.spec, energy);
  int count = 0;
  for (const auto& b : topo.branches) {
    const auto& f = topo.ports[b.from];
    const auto& to = topo.ports[b.to];
    const bool touches = (f.owner == PortOwner::Bus && f.owner_id == c) || (to.owner == PortOwner::Bus && to.owner_id == c);
    if (touches) ++count;
  }
  return count;
}

int pairwise_branch_count(const HubSpec& spec, const std::string& energy) {
  bool known = false;
  for (const auto& e : spec.energies) known = known || e.id == energy;
  if (!known) throw SpecError("unknown energy '" + energy + "'");
  const std::string c = carrier_of(spec, energy);
  // Owners of the sources and sinks on this bus; same-owner pairs are skipped.
  std::vector<std::string> sources, sinks;
  for (const auto& e : spec.energies) {
    if (carrier_of(spec, e.id) != c) continue;
    if (e.importable) sources.push_back("grid:" + e.id);
    if (e.demand || e.exportable) sinks.push_back("out:" + e.id);
  }
  for (const auto& g : spec.converters) {
    for (const auto& o : g.outputs) {
      if (carrier_of(spec, o.energy) == c) sources.push_back(g.id);
    }
    if (carrier_of(spec, g.input) == c) sinks.push_back(g.id);
  }
  for (const auto& s : spec.storages) {
    if (carrier_of(spec, s.energy) != c) continue;
    sources.push_back(s.id);
    sinks.push_back(s.id);
  }
  int count = 0;
  for (const auto& a : sources) {
    for (const auto& b : sinks) {
      if (a != b) ++count;
    }
  }
  return count;
}

std::vector<std::string> validate_topology(const HubTopology& topo) {
  std::vector<std::string> out;
  const int P = static_cast<int>(topo.ports.size());
  const int L = static_cast<int>(topo.branches.size());
  const int M = static_cast<int>(topo.energies.size());
  if (topo.A.rows != P || topo.A.cols != L) {
    out.push_back("A has shape " + std::to_string(topo.A.rows) + "x" + std::to_string(topo.A.cols));
    return out;
  }
  for (const auto& p : topo.ports) {
    if (p.is_virtual && p.owner != PortOwner::Storage) out.push_back("port " + p.id + " is virtual but not storage");
  }
  for (int l = 0; l < L; ++l) {
    const auto& b = topo.branches[l];
    if (b.from < 0 || b.from >= P || b.to < 0 || b.to >= P) {
      out.push_back("branch " + b.id + " references a missing port");
      continue;
    }
    if (topo.ports[b.from].energy != topo.ports[b.to].energy) {
      out.push_back("branch " + b.id + " connects ports with different energies");
    }
    int heads = 0, tails = 0;
    for (int p = 0; p < P; ++p) {
      const double a = topo.A(p, l);
      if (a == 1.0) ++heads;
      else if (a == -1.0) ++tails;
      else if (a != 0.0) out.push_back("branch " + b.id + " has A entry outside {-1,0,1}");
    }
    if (heads > 1) out.push_back("branch " + b.id + " has two heads");
    if (tails > 1) out.push_back("branch " + b.id + " has two tails");
    if (heads == 0) out.push_back("branch " + b.id + " has no head");
    if (tails == 0) out.push_back("branch " + b.id + " has no tail");
    if (static_cast<int>(topo.K.size()) != L || topo.K[l] != (b.real ? 1 : 0)) {
      out.push_back("branch " + b.id + " has K inconsistent with its kind");
    }
    if (b.real) {
      const int bus_ends = (topo.ports[b.from].owner == PortOwner::Bus) + (topo.ports[b.to].owner == PortOwner::Bus);
      if (bus_ends != 1) out.push_back("branch " + b.id + " does not touch exactly one energy bus");
    }
  }
  for (const Matrix* m : {&topo.U, &topo.W}) {
    if (m->rows != M || m->cols != L) {
      out.push_back("U or W has the wrong shape");
      continue;
    }
    for (double v : m->v) {
      if (v != 0.0 && v != 1.0) {
        out.push_back("U or W has an entry outside {0,1}");
        break;
      }
    }
  }
  std::set<int> rows(topo.out_ports.begin(), topo.out_ports.end());
  for (int p = 0; p < P; ++p) {
    const auto& port = topo.ports[p];
    const bool needs_row = port.dir == PortDir::Output && !port.is_virtual &&
                           (port.owner == PortOwner::Converter || port.owner == PortOwner::Storage ||
                            port.owner == PortOwner::Bus);
    if (needs_row && !rows.count(p)) out.push_back("output port " + port.id + " has no Z row");
  }
  if (topo.H.cols == P && topo.H.rows == static_cast<int>(topo.out_ports.size())) {
    const Matrix z = topo.H * topo.A;
    if (z.rows != topo.Z.rows || z.cols != topo.Z.cols) {
      out.push_back("Z does not equal H*A");
    } else {
      for (std::size_t i = 0; i < z.v.size(); ++i) {
        if (std::abs(z.v[i] - topo.Z.v[i]) > 1e-12) {
          out.push_back("Z does not equal H*A");
          break;
        }
      }
    }
  } else {
    out.push_back("H has the wrong shape");
  }
  return out;
}

}  // namespace ehub
