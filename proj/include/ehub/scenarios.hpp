#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ehub/errors.hpp"

namespace ehub {

/// Time-varying parameters of one day, indexed [energy][period].
struct DayValues {
  std::vector<std::vector<double>> price;         // f, per MWh
  std::vector<std::vector<double>> feedin;        // h, per MWh
  std::vector<std::vector<double>> emissions;     // e, t/MWh (may be negative)
  std::vector<std::vector<double>> availability;  // B in [0,1]
  std::vector<std::vector<double>> demand;        // L, MW

  static DayValues zeros(int energies, int periods);
  bool operator==(const DayValues&) const = default;
};

/// A full source year of hourly data.
struct YearSeries {
  std::vector<std::string> energies;
  int periods = 24;
  double dt = 1.0;
  std::vector<DayValues> days;
};

struct RepresentativeDay {
  int source_day = 0;  // 0-based index into the source year
  int weight = 0;      // number of source days in its cluster
  std::vector<DayValues> years;  // one entry per planning year
};

struct ScenarioSet {
  std::vector<std::string> energies;
  int periods = 0;
  double dt = 1.0;
  int total_days = 365;  // weights sum to this
  double discount_rate = 0.0;
  std::vector<RepresentativeDay> days;

  int num_days() const { return static_cast<int>(days.size()); }
  int num_years() const { return days.empty() ? 0 : static_cast<int>(days.front().years.size()); }
  double probability(int s) const { return static_cast<double>(days[s].weight) / total_days; }
  const DayValues& at(int s, int y) const { return days[s].years[y]; }
};

/// Parses one energy's CSV (`day,hour,price,feedin,emissions,availability,demand`)
/// into `series`. Every (day, hour) in 1..days x 1..periods must appear once.
void parse_series_csv(const std::string& text, const std::string& origin, int energy, int days, YearSeries& series);

/// Loads one CSV per energy. Energies are taken in the order given.
YearSeries load_year_series(const std::vector<std::string>& energies, const std::map<std::string, std::string>& files,
                            int periods, double dt, int days = 365);

void write_series_csv(const YearSeries& series, int energy, std::ostream& out);

/// Clusters days on Z-scored features with k-means (k-means++ seeding,
/// 50 restarts) and keeps each cluster's medoid. Result has one year.
ScenarioSet reduce_days(const YearSeries& series, int k, std::uint64_t seed);

/// Copies year one forward: prices and feed-in grow by fuel_growth per
/// year, demand by demand_growth; emissions and availability are unchanged.
ScenarioSet grow_years(const ScenarioSet& base, double fuel_growth, double demand_growth, int years);

/// One representative day standing for all `total_days` days, one year.
ScenarioSet single_day(const std::vector<std::string>& energies, const DayValues& day, double dt,
                       int total_days = 365);

}  // namespace ehub
