#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "ehub/scenarios.hpp"

using namespace ehub;

namespace {

DayValues day_type(double price, double demand, double emissions, double availability) {
  auto d = DayValues::zeros(1, 4);
  for (int t = 0; t < 4; ++t) {
    d.price[0][t] = price + t;
    d.feedin[0][t] = 0.1 * price;
    d.emissions[0][t] = emissions;
    d.availability[0][t] = availability;
    d.demand[0][t] = demand * (1.0 + 0.1 * t);
  }
  return d;
}

YearSeries series_of(std::vector<DayValues> days, int periods = 4) {
  YearSeries s;
  s.energies = {"elec"};
  s.periods = periods;
  s.days = std::move(days);
  return s;
}

double weight_sum(const ScenarioSet& s) {
  double p = 0.0;
  for (int i = 0; i < s.num_days(); ++i) p += s.probability(i);
  return p;
}

// Smooth synthetic year: seasonal and daily sine shapes on every parameter.
YearSeries smooth_year() {
  const double pi = std::acos(-1.0);
  std::vector<DayValues> days;
  for (int d = 0; d < 365; ++d) {
    auto v = DayValues::zeros(1, 24);
    for (int t = 0; t < 24; ++t) {
      const double season = std::sin(2 * pi * d / 365.0);
      const double hour = std::sin(2 * pi * t / 24.0);
      v.price[0][t] = 80 + 20 * season + 10 * hour;
      v.emissions[0][t] = 0.3 + 0.1 * hour;
      v.availability[0][t] = d < 120 || d >= 300 ? 1.0 : 0.0;
      v.demand[0][t] = 2.0 + 0.8 * season + 0.3 * hour;
    }
    days.push_back(std::move(v));
  }
  return series_of(std::move(days), 24);
}

std::string csv_of(const YearSeries& s) {
  std::ostringstream out;
  write_series_csv(s, 0, out);
  return out.str();
}

}  // namespace

TEST_CASE("identical days reduce to one with all the weight") {
  const auto s = series_of(std::vector<DayValues>(365, day_type(50, 1, 0.2, 1)));
  const auto r = reduce_days(s, 1, 1);
  REQUIRE(r.num_days() == 1);
  CHECK(r.days[0].weight == 365);
  CHECK(r.probability(0) == 1.0);
  CHECK(r.at(0, 0) == s.days[0]);
}

TEST_CASE("two day types split 200/165 and keep their own values") {
  const auto x = day_type(40, 1.0, 0.3, 1.0);
  const auto y = day_type(90, 2.5, -0.05, 0.0);
  std::vector<DayValues> days(200, x);
  days.insert(days.end(), 165, y);
  const auto r = reduce_days(series_of(days), 2, 42);
  REQUIRE(r.num_days() == 2);
  CHECK(r.days[0].weight == 200);
  CHECK(r.days[1].weight == 165);
  CHECK(r.probability(0) == doctest::Approx(200.0 / 365.0));
  CHECK(r.probability(1) == doctest::Approx(165.0 / 365.0));
  CHECK(r.at(0, 0) == x);
  CHECK(r.at(1, 0) == y);
  CHECK(r.at(1, 0).emissions[0][0] == -0.05);
  CHECK(weight_sum(r) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("reduction is deterministic, weights sum to one and medoids are real days") {
  const auto s = smooth_year();
  const auto a = reduce_days(s, 10, 123);
  const auto b = reduce_days(s, 10, 123);
  REQUIRE(a.num_days() == 10);
  int total = 0;
  for (int i = 0; i < a.num_days(); ++i) {
    total += a.days[i].weight;
    CHECK(a.days[i].source_day == b.days[i].source_day);
    CHECK(a.days[i].weight == b.days[i].weight);
    CHECK(a.at(i, 0) == s.days[a.days[i].source_day]);
    for (double v : a.at(i, 0).availability[0]) CHECK((v == 0.0 || v == 1.0));
  }
  CHECK(total == 365);
  CHECK(weight_sum(a) == doctest::Approx(1.0));
}

TEST_CASE("ten representative days keep annual demand within five percent") {
  const auto s = smooth_year();
  double truth = 0.0;
  for (const auto& d : s.days) truth += std::accumulate(d.demand[0].begin(), d.demand[0].end(), 0.0);
  const auto r = reduce_days(s, 10, 5);
  double approx = 0.0;
  for (int i = 0; i < r.num_days(); ++i) {
    approx += 365.0 * r.probability(i) * std::accumulate(r.at(i, 0).demand[0].begin(), r.at(i, 0).demand[0].end(), 0.0);
  }
  CHECK(std::abs(approx - truth) / truth < 0.05);
}

TEST_CASE("reducing reduced data again changes nothing") {
  const auto s = smooth_year();
  const auto r = reduce_days(s, 6, 9);
  std::vector<DayValues> expanded;
  for (const auto& d : r.days) expanded.insert(expanded.end(), d.weight, d.years[0]);
  const auto again = reduce_days(series_of(expanded, 24), 6, 9);
  REQUIRE(again.num_days() == r.num_days());
  for (int i = 0; i < r.num_days(); ++i) {
    CHECK(again.days[i].weight == r.days[i].weight);
    CHECK(again.at(i, 0) == r.at(i, 0));
  }
}

TEST_CASE("reduction errors") {
  CHECK_THROWS_AS(reduce_days(series_of({}), 1, 1), DataError);
  const auto s = series_of(std::vector<DayValues>(10, day_type(50, 1, 0.2, 1)));
  CHECK_THROWS_AS(reduce_days(s, 0, 1), DataError);
  CHECK_THROWS_AS(reduce_days(s, 11, 1), DataError);
  CHECK_THROWS_WITH_AS(reduce_days(s, 2, 1), doctest::Contains("distinct"), DataError);
}

TEST_CASE("growth compounds from year one") {
  auto day = DayValues::zeros(1, 1);
  day.price[0][0] = 100.0;
  day.feedin[0][0] = 10.0;
  day.emissions[0][0] = 0.4;
  day.availability[0][0] = 0.7;
  day.demand[0][0] = 1.0;
  const auto base = single_day({"elec"}, day, 1.0);
  const auto g = grow_years(base, 0.02, 0.04, 20);
  REQUIRE(g.num_years() == 20);
  CHECK(g.at(0, 0) == day);
  CHECK(g.at(0, 2).price[0][0] == doctest::Approx(104.04));
  CHECK(g.at(0, 2).feedin[0][0] == doctest::Approx(10.404));
  CHECK(g.at(0, 19).demand[0][0] == doctest::Approx(2.1068).epsilon(1e-4));
  CHECK(g.at(0, 19).emissions[0][0] == 0.4);
  CHECK(g.at(0, 19).availability[0][0] == 0.7);

  const auto flat = grow_years(base, 0.0, 0.0, 5);
  for (int y = 0; y < 5; ++y) CHECK(flat.at(0, y) == day);
  CHECK_THROWS_AS(grow_years(base, -1.0, 0.0, 2), DataError);
  CHECK_THROWS_AS(grow_years(base, 0.0, 0.0, 0), DataError);
}

TEST_CASE("series CSV round trip and errors") {
  auto s = series_of({day_type(40, 1.0, -0.1, 0.5), day_type(60, 2.0, 0.3, 1.0)});
  const auto text = csv_of(s);
  YearSeries back;
  back.energies = {"elec"};
  back.periods = 4;
  parse_series_csv(text, "elec.csv", 0, 2, back);
  CHECK(back.days == s.days);

  const std::string header = "day,hour,price,feedin,emissions,availability,demand\n";
  YearSeries t;
  t.energies = {"elec"};
  t.periods = 2;
  SUBCASE("wrong header") {
    CHECK_THROWS_AS(parse_series_csv("day,hour,price\n", "x", 0, 1, t), ParseError);
  }
  SUBCASE("bad number carries line and column") {
    try {
      parse_series_csv(header + "1,1,10,0,0.1,1,1\n1,2,10,zero,0.1,1,1\n", "x", 0, 1, t);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() == 8);
    }
  }
  SUBCASE("missing hour") {
    CHECK_THROWS_WITH_AS(parse_series_csv(header + "1,1,10,0,0.1,1,1\n", "x", 0, 1, t),
                         doctest::Contains("missing hours"), DataError);
  }
  SUBCASE("availability out of range") {
    CHECK_THROWS_AS(parse_series_csv(header + "1,1,10,0,0.1,1.5,1\n1,2,10,0,0.1,1,1\n", "x", 0, 1, t), ParseError);
  }
  SUBCASE("duplicate row") {
    CHECK_THROWS_AS(parse_series_csv(header + "1,1,10,0,0.1,1,1\n1,1,10,0,0.1,1,1\n", "x", 0, 1, t), ParseError);
  }
  SUBCASE("negative emissions are kept") {
    parse_series_csv(header + "1,1,10,0,-0.2,1,1\n1,2,10,0,0.1,1,1\n", "x", 0, 1, t);
    CHECK(t.days[0].emissions[0][0] == -0.2);
  }
}
