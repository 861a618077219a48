#include "ehub/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "ehub/hub_io.hpp"

namespace ehub {

DayValues DayValues::zeros(int energies, int periods) {
  DayValues d;
  const std::vector<std::vector<double>> z(energies, std::vector<double>(periods, 0.0));
  d.price = d.feedin = d.emissions = d.availability = d.demand = z;
  for (auto& row : d.availability) std::fill(row.begin(), row.end(), 1.0);
  return d;
}

namespace {

constexpr const char* kHeader = "day,hour,price,feedin,emissions,availability,demand";

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, const std::string& origin, int line, int col) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size() || !std::isfinite(v)) {
    throw ParseError(origin, line, col, "expected a number, found '" + s + "'");
  }
  return v;
}

}  // namespace

void parse_series_csv(const std::string& text, const std::string& origin, int energy, int days, YearSeries& series) {
  const int T = series.periods;
  if (static_cast<int>(series.days.size()) != days) {
    series.days.assign(days, DayValues::zeros(static_cast<int>(series.energies.size()), T));
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(origin, 1, 1, "empty series file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line = line.substr(3);
  if (line != kHeader) throw ParseError(origin, 1, 1, std::string("header must be '") + kHeader + "'");

  std::vector<char> seen(static_cast<std::size_t>(days) * T, 0);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != 7) throw ParseError(origin, lineno, 1, "expected 7 columns");
    std::vector<int> col_start(7, 1);
    for (int c = 1; c < 7; ++c) col_start[c] = col_start[c - 1] + static_cast<int>(cells[c - 1].size()) + 1;
    double v[7];
    for (int c = 0; c < 7; ++c) v[c] = parse_number(cells[c], origin, lineno, col_start[c]);
    const int day = static_cast<int>(v[0]);
    const int hour = static_cast<int>(v[1]);
    if (v[0] != day || day < 1 || day > days) throw ParseError(origin, lineno, col_start[0], "day out of range");
    if (v[1] != hour || hour < 1 || hour > T) throw ParseError(origin, lineno, col_start[1], "hour out of range");
    const std::size_t key = static_cast<std::size_t>(day - 1) * T + (hour - 1);
    if (seen[key]) throw ParseError(origin, lineno, 1, "duplicate row for this day and hour");
    seen[key] = 1;
    if (v[5] < 0.0 || v[5] > 1.0) throw ParseError(origin, lineno, col_start[5], "availability outside [0,1]");
    if (v[6] < 0.0) throw ParseError(origin, lineno, col_start[6], "negative demand");
    auto& d = series.days[day - 1];
    d.price[energy][hour - 1] = v[2];
    d.feedin[energy][hour - 1] = v[3];
    d.emissions[energy][hour - 1] = v[4];
    d.availability[energy][hour - 1] = v[5];
    d.demand[energy][hour - 1] = v[6];
  }
  int missing = 0;
  std::string first;
  for (int d = 0; d < days; ++d) {
    for (int h = 0; h < T; ++h) {
      if (!seen[static_cast<std::size_t>(d) * T + h]) {
        if (missing == 0) first = "day " + std::to_string(d + 1) + " hour " + std::to_string(h + 1);
        ++missing;
      }
    }
  }
  if (missing > 0) {
    throw DataError(origin + ": missing hours (" + std::to_string(missing) + " absent, first at " + first + ")");
  }
}

YearSeries load_year_series(const std::vector<std::string>& energies, const std::map<std::string, std::string>& files,
                            int periods, double dt, int days) {
  if (periods < 1) throw DataError("periods must be at least 1");
  if (!(dt > 0.0)) throw DataError("time step must be positive");
  YearSeries s;
  s.energies = energies;
  s.periods = periods;
  s.dt = dt;
  s.days.assign(days, DayValues::zeros(static_cast<int>(energies.size()), periods));
  for (std::size_t m = 0; m < energies.size(); ++m) {
    auto it = files.find(energies[m]);
    if (it == files.end()) throw DataError("no series file for energy '" + energies[m] + "'");
    parse_series_csv(read_text_file(it->second), it->second, static_cast<int>(m), days, s);
  }
  for (const auto& [name, path] : files) {
    if (std::find(energies.begin(), energies.end(), name) == energies.end()) {
      throw DataError("series file '" + path + "' names unknown energy '" + name + "'");
    }
  }
  return s;
}

void write_series_csv(const YearSeries& series, int energy, std::ostream& out) {
  out << kHeader << '\n';
  out.precision(17);
  for (std::size_t d = 0; d < series.days.size(); ++d) {
    const auto& v = series.days[d];
    for (int t = 0; t < series.periods; ++t) {
      out << d + 1 << ',' << t + 1 << ',' << v.price[energy][t] << ',' << v.feedin[energy][t] << ','
          << v.emissions[energy][t] << ',' << v.availability[energy][t] << ',' << v.demand[energy][t] << '\n';
    }
  }
}

namespace {

using Features = std::vector<std::vector<double>>;  // [day][feature]

Features standardized_features(const YearSeries& s) {
  const int D = static_cast<int>(s.days.size());
  const int M = static_cast<int>(s.energies.size());
  const int T = s.periods;
  Features f(D);
  for (int m = 0; m < M; ++m) {
    for (int p = 0; p < 5; ++p) {
      auto pick = [&](const DayValues& d) -> const std::vector<double>& {
        switch (p) {
          case 0: return d.price[m];
          case 1: return d.feedin[m];
          case 2: return d.emissions[m];
          case 3: return d.availability[m];
          default: return d.demand[m];
        }
      };
      double sum = 0.0, sq = 0.0;
      for (const auto& d : s.days) {
        for (double v : pick(d)) sum += v;
      }
      const double n = static_cast<double>(D) * T;
      const double mean = sum / n;
      for (const auto& d : s.days) {
        for (double v : pick(d)) sq += (v - mean) * (v - mean);
      }
      const double sd = std::sqrt(sq / n);
      for (int d = 0; d < D; ++d) {
        for (double v : pick(s.days[d])) f[d].push_back(sd > 0.0 ? (v - mean) / sd : 0.0);
      }
    }
  }
  return f;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

struct Clustering {
  std::vector<int> label;
  Features centers;
  double sse = std::numeric_limits<double>::infinity();
};

Clustering lloyd(const Features& x, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(x.size());
  Clustering c;
  // k-means++ seeding
  std::uniform_int_distribution<int> pick(0, n - 1);
  c.centers.push_back(x[pick(rng)]);
  std::vector<double> d2(n);
  while (static_cast<int>(c.centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& ctr : c.centers) best = std::min(best, dist2(x[i], ctr));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) break;
    std::uniform_real_distribution<double> u(0.0, total);
    double r = u(rng);
    int chosen = n - 1;
    for (int i = 0; i < n; ++i) {
      r -= d2[i];
      if (r <= 0.0 && d2[i] > 0.0) {
        chosen = i;
        break;
      }
    }
    c.centers.push_back(x[chosen]);
  }
  const int kk = static_cast<int>(c.centers.size());
  c.label.assign(n, -1);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = dist2(x[i], c.centers[0]);
      for (int j = 1; j < kk; ++j) {
        const double dd = dist2(x[i], c.centers[j]);
        if (dd < bd) {
          bd = dd;
          best = j;
        }
      }
      if (c.label[i] != best) {
        c.label[i] = best;
        changed = true;
      }
    }
    std::vector<int> count(kk, 0);
    Features sum(kk, std::vector<double>(x[0].size(), 0.0));
    for (int i = 0; i < n; ++i) {
      ++count[c.label[i]];
      for (std::size_t f = 0; f < x[i].size(); ++f) sum[c.label[i]][f] += x[i][f];
    }
    for (int j = 0; j < kk; ++j) {
      if (count[j] == 0) {
        // Re-seed an empty cluster at the point farthest from its center.
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          const double dd = dist2(x[i], c.centers[c.label[i]]);
          if (dd > fd) {
            fd = dd;
            far = i;
          }
        }
        c.centers[j] = x[far];
        c.label[far] = j;
        changed = true;
        continue;
      }
      for (auto& v : sum[j]) v /= count[j];
      c.centers[j] = sum[j];
    }
    if (!changed) break;
  }
  c.sse = 0.0;
  for (int i = 0; i < n; ++i) c.sse += dist2(x[i], c.centers[c.label[i]]);
  return c;
}

}  // namespace

ScenarioSet reduce_days(const YearSeries& series, int k, std::uint64_t seed) {
  const int n = static_cast<int>(series.days.size());
  if (n == 0) throw DataError("empty series");
  if (k < 1 || k > n) throw DataError("k must lie in 1.." + std::to_string(n));
  const Features x = standardized_features(series);
  std::set<std::vector<double>> distinct(x.begin(), x.end());
  if (k > static_cast<int>(distinct.size())) {
    throw DataError("k=" + std::to_string(k) + " exceeds the " + std::to_string(distinct.size()) + " distinct days");
  }

  std::mt19937_64 rng(seed);
  Clustering best;
  for (int restart = 0; restart < 50; ++restart) {
    Clustering c = lloyd(x, k, rng);
    if (c.sse < best.sse - 1e-12) best = std::move(c);
  }

  const int kk = static_cast<int>(best.centers.size());
  std::vector<int> medoid(kk, -1), weight(kk, 0);
  std::vector<double> md(kk, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i) {
    const int j = best.label[i];
    ++weight[j];
    const double dd = dist2(x[i], best.centers[j]);
    if (dd < md[j]) {
      md[j] = dd;
      medoid[j] = i;
    }
  }
  ScenarioSet out;
  out.energies = series.energies;
  out.periods = series.periods;
  out.dt = series.dt;
  out.total_days = n;
  for (int j = 0; j < kk; ++j) {
    if (weight[j] == 0) continue;
    RepresentativeDay r;
    r.source_day = medoid[j];
    r.weight = weight[j];
    r.years.push_back(series.days[medoid[j]]);
    out.days.push_back(std::move(r));
  }
  std::sort(out.days.begin(), out.days.end(),
            [](const RepresentativeDay& a, const RepresentativeDay& b) { return a.source_day < b.source_day; });
  return out;
}

ScenarioSet grow_years(const ScenarioSet& base, double fuel_growth, double demand_growth, int years) {
  if (years < 1) throw DataError("years must be at least 1");
  if (fuel_growth <= -1.0 || demand_growth <= -1.0) throw DataError("growth rates must exceed -100%");
  ScenarioSet out = base;
  for (auto& day : out.days) {
    const DayValues first = day.years.at(0);
    day.years.assign(years, first);
    for (int y = 1; y < years; ++y) {
      const double fg = std::pow(1.0 + fuel_growth, y);
      const double dg = std::pow(1.0 + demand_growth, y);
      auto& v = day.years[y];
      for (auto& row : v.price) {
        for (auto& x : row) x *= fg;
      }
      for (auto& row : v.feedin) {
        for (auto& x : row) x *= fg;
      }
      for (auto& row : v.demand) {
        for (auto& x : row) x *= dg;
      }
    }
  }
  return out;
}

ScenarioSet single_day(const std::vector<std::string>& energies, const DayValues& day, double dt, int total_days) {
  ScenarioSet s;
  s.energies = energies;
  s.periods = day.price.empty() ? 0 : static_cast<int>(day.price.front().size());
  s.dt = dt;
  s.total_days = total_days;
  RepresentativeDay r;
  r.source_day = 0;
  r.weight = total_days;
  r.years.push_back(day);
  s.days.push_back(std::move(r));
  return s;
}

}  // namespace ehub
