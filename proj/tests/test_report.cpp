// Copyright 2026 The verde2e Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "verde2e/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace verde2e;
using Catch::Matchers::WithinAbs;

namespace {

RunRecord record(const std::string& instance, const std::string& scenario,
                 double e_k1_with_stops, double e_k2, double e_c, double d_k1, double d_k2,
                 double d_c0, double d_c) {
  RunRecord r;
  r.instance = instance;
  r.scenario = scenario;
  r.solved = true;
  r.metrics.e_k1_with_stops = e_k1_with_stops;
  r.metrics.e_k2 = e_k2;
  r.metrics.e_c = e_c;
  r.metrics.d_k1 = d_k1;
  r.metrics.d_k2 = d_k2;
  r.metrics.d_c0 = d_c0;
  r.metrics.d_c = d_c;
  r.metrics.total_emissions = e_k1_with_stops + e_k2 + e_c;
  r.metrics.total_distance = d_k1 + d_k2 + d_c0 + d_c;
  r.metrics.company_distance = d_k1 + d_k2;
  return r;
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("aggregate averages solved records per scenario", "[report]") {
  RunReport report;
  RunRecord a = record("i1", "ehc", 10.0, 2.0, 1.0, 100.0, 40.0, 5.0, 3.0);
  a.n_customers = 6;
  a.metrics.active_satellites = 2;
  a.metrics.active_pickup_only = 1;
  a.metrics.customers_at_home_pct = 50.0;
  a.metrics.avg_pickup_dist_em_km = 0.8;
  RunRecord b = record("i2", "ehc", 14.0, 4.0, 3.0, 120.0, 60.0, 7.0, 5.0);
  b.n_customers = 8;
  b.metrics.active_satellites = 4;
  b.metrics.active_pickup_only = 3;
  b.metrics.customers_at_home_pct = 70.0;
  // No emitting pickup trips on i2: the optional mean must skip it.
  RunRecord fail;
  fail.instance = "i3";
  fail.scenario = "ehc";
  fail.error = "boom";
  report.records = {a, b, fail};

  const auto aggs = aggregate(report);
  REQUIRE(aggs.size() == 1);
  const auto& g = aggs[0];
  CHECK(g.scenario == "ehc");
  CHECK(g.solved == 2);
  CHECK(g.failed == 1);
  CHECK_THAT(g.e_k1_kg, WithinAbs(12.0, 1e-12));
  CHECK_THAT(g.e_k2_kg, WithinAbs(3.0, 1e-12));
  CHECK_THAT(g.e_c_kg, WithinAbs(2.0, 1e-12));
  CHECK_THAT(g.d_k1_km, WithinAbs(110.0, 1e-12));
  CHECK_THAT(g.d_k2_km, WithinAbs(50.0, 1e-12));
  CHECK_THAT(g.d_c0_km, WithinAbs(6.0, 1e-12));
  CHECK_THAT(g.d_c_km, WithinAbs(4.0, 1e-12));
  CHECK_THAT(g.total_emissions_kg, WithinAbs(17.0, 1e-12));
  CHECK_THAT(g.total_distance_km, WithinAbs(170.0, 1e-12));
  CHECK_THAT(g.active_satellites, WithinAbs(3.0, 1e-12));
  CHECK_THAT(g.active_pickup_only, WithinAbs(2.0, 1e-12));
  CHECK_THAT(g.at_home_pct, WithinAbs(60.0, 1e-12));
  // Customers per active satellite: mean of 6/2 and 8/4.
  REQUIRE(g.avg_customers_per_active_satellite.has_value());
  CHECK_THAT(*g.avg_customers_per_active_satellite, WithinAbs(2.5, 1e-12));
  // Only i1 carries an emitting-pickup average.
  REQUIRE(g.avg_pickup_dist_em_km.has_value());
  CHECK_THAT(*g.avg_pickup_dist_em_km, WithinAbs(0.8, 1e-12));
  CHECK_FALSE(g.avg_pickup_dist_zero_km.has_value());

  // The stacked emissions columns rebuild the total.
  CHECK_THAT(g.e_k1_kg + g.e_k2_kg + g.e_c_kg, WithinAbs(g.total_emissions_kg, 1e-12));
  CHECK_THAT(g.d_k1_km + g.d_k2_km + g.d_c0_km + g.d_c_km,
             WithinAbs(g.total_distance_km, 1e-12));
}

TEST_CASE("variation rows follow the percentage-change formula", "[report]") {
  RunReport report;
  report.records = {record("i1", "ehc", 10.0, 5.0, 1.0, 100.0, 50.0, 4.0, 6.0),
                    record("i1", "ehc_hd", 12.0, 15.0, 0.0, 90.0, 110.0, 0.0, 0.0)};
  const auto rows = variation_rows(report, "ehc", "ehc_hd");
  REQUIRE(rows.size() == 3);

  CHECK(rows[0].series == "E1");
  REQUIRE(rows[0].emissions_pct.has_value());
  CHECK_THAT(*rows[0].emissions_pct, WithinAbs(20.0, 1e-12));  // (12-10)/10*100
  REQUIRE(rows[0].distance_pct.has_value());
  CHECK_THAT(*rows[0].distance_pct, WithinAbs(-10.0, 1e-12));  // (90-100)/100*100

  CHECK(rows[1].series == "E2");
  CHECK_THAT(*rows[1].emissions_pct, WithinAbs(200.0, 1e-12));  // (15-5)/5*100
  CHECK_THAT(*rows[1].distance_pct, WithinAbs(120.0, 1e-12));   // (110-50)/50*100

  CHECK(rows[2].series == "TOT");
  CHECK_THAT(*rows[2].emissions_pct, WithinAbs(68.75, 1e-12));  // (27-16)/16*100
  CHECK_THAT(*rows[2].distance_pct, WithinAbs(25.0, 1e-12));    // (200-160)/160*100

  // A zero base leaves the cell empty rather than dividing by zero.
  RunReport zero_base;
  zero_base.records = {record("i1", "ehc", 10.0, 0.0, 0.0, 100.0, 50.0, 0.0, 0.0),
                       record("i1", "ehc_hd", 10.0, 3.0, 0.0, 100.0, 60.0, 0.0, 0.0)};
  const auto zrows = variation_rows(zero_base, "ehc", "ehc_hd");
  REQUIRE(zrows.size() == 3);
  CHECK_FALSE(zrows[1].emissions_pct.has_value());
  REQUIRE(zrows[1].distance_pct.has_value());
  CHECK_THAT(*zrows[1].distance_pct, WithinAbs(20.0, 1e-12));

  // Pairs missing one side, or with a failed side, contribute nothing.
  RunReport partial;
  partial.records = {record("i1", "ehc", 1, 1, 1, 1, 1, 1, 1)};
  CHECK(variation_rows(partial, "ehc", "ehc_hd").empty());
  RunRecord failed_hd;
  failed_hd.instance = "i1";
  failed_hd.scenario = "ehc_hd";
  failed_hd.error = "x";
  partial.records.push_back(failed_hd);
  CHECK(variation_rows(partial, "ehc", "ehc_hd").empty());
}

TEST_CASE("satellite frequency counts include silent satellites", "[report]") {
  RunReport report;
  RunRecord a = record("i1", "ehc", 1, 1, 1, 1, 1, 1, 1);
  a.satellite_nodes = {1, 2, 3};
  a.active_satellite_nodes = {1, 3};
  RunRecord b = record("i2", "ehc", 1, 1, 1, 1, 1, 1, 1);
  b.satellite_nodes = {1, 2, 3};
  b.active_satellite_nodes = {1};
  RunRecord c = record("i1", "td", 1, 1, 1, 1, 1, 1, 1);
  c.satellite_nodes = {1, 2, 3};
  c.active_satellite_nodes = {2};
  report.records = {a, b, c};

  const auto rows = satellite_frequency(report);
  REQUIRE(rows.size() == 6);  // two scenarios x three satellites
  CHECK(rows[0].scenario == "ehc");
  CHECK(rows[0].satellite_node == 1);
  CHECK(rows[0].activations == 2);
  CHECK(rows[0].instances == 2);
  CHECK(rows[1].satellite_node == 2);
  CHECK(rows[1].activations == 0);
  CHECK(rows[2].satellite_node == 3);
  CHECK(rows[2].activations == 1);
  CHECK(rows[3].scenario == "td");
  CHECK(rows[3].activations == 0);
  CHECK(rows[4].activations == 1);
  CHECK(rows[5].activations == 0);
}

TEST_CASE("empty report renders header-only tables", "[report]") {
  RunReport report;
  const auto aggs = aggregate(report);
  CHECK(aggs.empty());
  CHECK(line_count(breakdown_csv(aggs)) == 1);
  CHECK(line_count(customer_stats_csv(aggs)) == 1);
  CHECK(line_count(satellite_frequency_csv(satellite_frequency(report))) == 1);
  CHECK(line_count(variation_csv({})) == 1);
  CHECK(line_count(records_csv(report)) == 1);
  CHECK(breakdown_json(aggs).is_array());
  CHECK(breakdown_json(aggs).empty());
  CHECK(records_json(report).empty());
}

TEST_CASE("records table keeps failed rows with aligned columns", "[report]") {
  RunReport report;
  RunRecord ok = record("good", "ehc", 1, 1, 1, 1, 1, 1, 1);
  RunRecord bad;
  bad.instance = "broken";
  bad.scenario = "ehc";
  bad.error = "no feasible plan";
  report.records = {ok, bad};

  const std::string csv = records_csv(report);
  std::istringstream is(csv);
  std::string header, row_ok, row_bad;
  REQUIRE(std::getline(is, header));
  REQUIRE(std::getline(is, row_ok));
  REQUIRE(std::getline(is, row_bad));
  const auto commas = [](const std::string& s) {
    return std::count(s.begin(), s.end(), ',');
  };
  CHECK(commas(row_ok) == commas(header));
  CHECK(commas(row_bad) == commas(header));
  CHECK(row_bad.find("failed,no feasible plan") != std::string::npos);

  const auto json = records_json(report);
  REQUIRE(json.size() == 2);
  CHECK(json[0].contains("metrics"));
  CHECK_FALSE(json[0].contains("error"));
  CHECK(json[1]["error"] == "no feasible plan");
  CHECK_FALSE(json[1].contains("metrics"));
}

TEST_CASE("scenario order follows first appearance", "[report]") {
  RunReport report;
  report.records = {record("i1", "td", 1, 1, 1, 1, 1, 1, 1),
                    record("i1", "ehc", 1, 1, 1, 1, 1, 1, 1),
                    record("i2", "td", 1, 1, 1, 1, 1, 1, 1)};
  CHECK(report.scenarios() == std::vector<std::string>{"td", "ehc"});
  REQUIRE(report.find("i2", "td") != nullptr);
  CHECK(report.find("i2", "ehc") == nullptr);

  const auto aggs = aggregate(report);
  REQUIRE(aggs.size() == 2);
  CHECK(aggs[0].scenario == "td");
  CHECK(aggs[1].scenario == "ehc");
}
