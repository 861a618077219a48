#pragma once

#include <string>
#include <vector>

#include "ehub/errors.hpp"

namespace ehub {

struct EnergySpec {
  std::string id;
  bool importable = false;
  bool exportable = false;
  bool demand = false;
  /// Bus the energy is delivered on. Empty means its own bus. A PV energy
  /// uses `carrier: elec` so its grid connection feeds the electricity bus.
  std::string carrier;
};

struct GridSpec {
  std::string energy;
  double capacity_cost = 0.0;  // per MW
  double capacity_step = 1.0;  // MW per count
  int bits = 4;
};

struct ConverterOutput {
  std::string energy;
  double efficiency = 1.0;
};

struct ConverterSpec {
  std::string id;
  std::string input;
  std::vector<ConverterOutput> outputs;
  double unit_rating = 1.0;  // MW of input per unit
  double unit_cost = 0.0;
  int bits = 2;
};

struct StorageSpec {
  std::string id;
  std::string energy;
  double charge_efficiency = 1.0;
  double discharge_efficiency = 1.0;
  double power_cost = 0.0;   // per MW
  double energy_cost = 0.0;  // per MWh
  double power_step = 1.0;
  double energy_step = 1.0;
  int power_bits = 2;
  int energy_bits = 2;
};

struct HubSpec {
  std::vector<EnergySpec> energies;
  std::vector<GridSpec> grid;  // energies without an entry use the defaults
  std::vector<ConverterSpec> converters;
  std::vector<StorageSpec> storages;
  double default_capacity_step = 1.0;
  int default_bits = 4;
};

/// Throws SpecError on duplicate ids, unknown references, efficiencies
/// outside (0,1], non-positive steps or bit counts below one.
void validate_spec(const HubSpec& spec);

enum class PortOwner { Bus, GridIn, Output, Converter, Storage };
enum class PortDir { Input, Output };

struct Port {
  std::string id;
  PortOwner owner = PortOwner::Bus;
  std::string owner_id;
  PortDir dir = PortDir::Input;
  std::string energy;
  bool is_virtual = false;
};

struct Branch {
  std::string id;
  int from = -1;
  int to = -1;
  bool real = true;
};

/// Small dense row-major matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
  Matrix operator*(const Matrix& o) const;
};

struct HubTopology {
  HubSpec spec;
  std::vector<std::string> energies;  // M, in description order
  std::vector<GridSpec> grid;         // one per energy, defaults filled in
  std::vector<std::string> buses;     // one per carrier energy
  std::vector<Port> ports;
  std::vector<Branch> branches;
  std::vector<int> out_ports;  // P^out: converter, storage and bus outputs

  Matrix A;  // P x L
  Matrix H;  // P^out x P
  Matrix J;  // G x P, converters first then storages
  Matrix U;  // M x L
  Matrix W;  // M x L
  Matrix Z;  // P^out x L, equals H * A
  std::vector<int> K;  // per branch: 1 real, 0 virtual

  int num_converters() const { return static_cast<int>(spec.converters.size()); }
  int num_storages() const { return static_cast<int>(spec.storages.size()); }
  int num_devices() const { return num_converters() + num_storages(); }
  int energy_index(const std::string& id) const;
  int port_index(const std::string& id) const;
  int branch_index(const std::string& id) const;
  /// Index into `devices` order used by J (converters, then storages).
  int storage_device(int s) const { return num_converters() + s; }
};

HubTopology build_topology(const HubSpec& spec);

/// Branches touching the bus that carries `energy`.
int bus_branch_count(const HubTopology& topo, const std::string& energy);

/// Branches needed on that bus when every source connects directly to
/// every sink. A storage never connects to itself.
int pairwise_branch_count(const HubSpec& spec, const std::string& energy);

/// Lists every broken structural invariant. Empty means valid.
std::vector<std::string> validate_topology(const HubTopology& topo);

}  // namespace ehub
