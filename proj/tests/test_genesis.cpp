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

#include "verde2e/genesis.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>

#include "verde2e/oracle.hpp"

using namespace verde2e;

TEST_CASE("same seed regenerates the identical instance", "[genesis]") {
  GenConfig cfg;
  cfg.n_customers = 7;
  cfg.n_satellites = 3;
  cfg.seed = 42;
  const std::string a = dump_instance(generate(cfg));
  const std::string b = dump_instance(generate(cfg));
  CHECK(a == b);

  cfg.seed = 43;
  CHECK(dump_instance(generate(cfg)) != a);
}

TEST_CASE("generated geometry follows the zone layout", "[genesis]") {
  GenConfig cfg;
  cfg.n_customers = 40;
  cfg.n_satellites = 4;
  cfg.area_width_km = 3.0;
  cfg.area_height_km = 1.5;
  cfg.warehouse_offset_km = 2.0;
  cfg.seed = 5;
  Instance inst = generate(cfg);

  CHECK(validate_instance(inst).empty());
  CHECK(inst.name == "gen_c40_h4_s5");
  REQUIRE(inst.nodes[0].kind == NodeKind::warehouse);
  CHECK(inst.nodes[0].position->x_km == 1.5);
  CHECK(inst.nodes[0].position->y_km == -2.0);

  // 4 satellites tile a 2x2 grid; each sits in the middle half of its zone.
  REQUIRE(inst.satellites.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const auto& pos = *inst.nodes[inst.satellites[i].node].position;
    const double cx = (i % 2 + 0.5) * 1.5;
    const double cy = (i / 2 + 0.5) * 0.75;
    CHECK(std::abs(pos.x_km - cx) <= 1.5 / 4 + 1e-12);
    CHECK(std::abs(pos.y_km - cy) <= 0.75 / 4 + 1e-12);
    CHECK(inst.satellites[i].capacity_kg ==
          cfg.satellite_capacity_packages * expected_package_weight_kg(cfg));
  }
  for (const auto& c : inst.customers) {
    const auto& pos = *inst.nodes[c.node].position;
    CHECK((pos.x_km >= 0.0 && pos.x_km <= 3.0));
    CHECK((pos.y_km >= 0.0 && pos.y_km <= 1.5));
  }
}

TEST_CASE("fleet sizes follow the ceil-plus-one rule", "[genesis]") {
  GenConfig cfg;
  cfg.n_customers = 30;
  cfg.n_satellites = 2;
  cfg.seed = 11;
  Instance inst = generate(cfg);
  const double weight = expected_package_weight_kg(cfg);
  const double total = inst.total_demand_kg();

  auto expect = [&](const VehicleProfile& p) {
    return static_cast<int>(std::ceil(total / (p.capacity_packages * weight))) + 1;
  };
  int trucks = 0, vans = 0, greens = 0;
  for (const auto& v : inst.vehicles) {
    if (v.echelon == Echelon::first) {
      ++trucks;
      CHECK(v.capacity_kg == cfg.truck.capacity_packages * weight);
      CHECK(v.emission_factor == 0.38);
    } else if (v.emission_factor > 0) {
      ++vans;
      CHECK(v.rho_full_l_per_km - v.rho_empty_l_per_km == Catch::Approx(0.2));
    } else {
      ++greens;
      CHECK(v.capacity_kg == cfg.green.capacity_packages * weight);
      CHECK(v.rho_full_l_per_km == 0.0);
    }
  }
  CHECK(trucks == expect(cfg.truck));
  CHECK(vans == expect(cfg.van));
  CHECK(greens == expect(cfg.green));
  CHECK(green_low_factor(cfg) == 0.5);
}

TEST_CASE("large samples match the configured class mix", "[genesis]") {
  GenConfig cfg;
  cfg.n_customers = 10000;
  cfg.n_satellites = 5;
  cfg.seed = 2026;
  Instance inst = generate(cfg);

  int counts[4] = {0, 0, 0, 0};
  double demand_sum = 0.0;
  std::set<std::pair<double, double>> seen_pairs;
  for (const auto& c : inst.customers) {
    ++counts[static_cast<int>(c.size_class)];
    demand_sum += c.demand_kg;
    if (c.size_class == SizeClass::extra_small || c.size_class == SizeClass::large) {
      CHECK(c.d_max_km == 0.0);
      CHECK(c.d_green_km == 0.0);
    } else {
      seen_pairs.emplace(c.d_green_km, c.d_max_km);
    }
  }
  const double expected_pct[4] = {30.0, 40.0, 25.0, 5.0};
  for (int s = 0; s < 4; ++s) {
    const double pct = 100.0 * counts[s] / cfg.n_customers;
    INFO("class " << s << " at " << pct << "%");
    CHECK(std::abs(pct - expected_pct[s]) <= 2.0);
  }
  const double mean = demand_sum / cfg.n_customers;
  CHECK(std::abs(mean - expected_package_weight_kg(cfg)) <=
        0.05 * expected_package_weight_kg(cfg));
  // All nine admissible (d_green, d_max) menu pairs occur.
  CHECK(seen_pairs.size() == 9);
  CHECK(seen_pairs.count({0.0, 0.0}) == 1);
  CHECK(seen_pairs.count({0.5, 2.0}) == 1);
}

TEST_CASE("config problems are rejected before generation", "[genesis]") {
  GenConfig cfg;
  cfg.n_customers = 0;
  cfg.n_satellites = 1;
  CHECK_THROWS_WITH(generate(cfg), Catch::Matchers::ContainsSubstring("n_customers"));

  cfg.n_customers = 3;
  cfg.size_distribution = {0.5, 0.5, 0.2, 0.1};
  CHECK_THROWS_WITH(generate(cfg), Catch::Matchers::ContainsSubstring("sum to 1"));

  cfg = GenConfig{};
  cfg.n_customers = 3;
  cfg.n_satellites = 1;
  cfg.d_max_menu_m = {100.0};
  cfg.d_green_menu_m = {500.0};
  CHECK_THROWS_WITH(generate(cfg), Catch::Matchers::ContainsSubstring("no (d_green <= d_max)"));

  cfg = GenConfig{};
  cfg.n_customers = 3;
  cfg.n_satellites = 1;
  cfg.green_low_capacity_packages = 80.0;
  CHECK_THROWS_WITH(generate(cfg), Catch::Matchers::ContainsSubstring("low-capacity green"));
}

TEST_CASE("generator config survives JSON round-trips", "[genesis]") {
  GenConfig cfg;
  cfg.name = "roundtrip";
  cfg.n_customers = 6;
  cfg.n_satellites = 2;
  cfg.seed = 77;
  cfg.van.capacity_packages = 40.0;
  cfg.d_green_menu_m = {0.0, 250.0, 500.0};

  GenConfig back = gen_config_from_json(gen_config_to_json(cfg));
  CHECK(dump_instance(generate(back)) == dump_instance(generate(cfg)));
  CHECK(back.van.capacity_packages == 40.0);
  CHECK(back.d_green_menu_m == cfg.d_green_menu_m);

  CHECK_THROWS_AS(gen_config_from_json(nlohmann::json::array()), ParseError);
  nlohmann::json bad = gen_config_to_json(cfg);
  bad["n_customers"] = "six";
  CHECK_THROWS_AS(gen_config_from_json(bad), ParseError);
  CHECK_THROWS_AS(load_gen_config("does_not_exist.json"), Error);
}

TEST_CASE("small generated instances stay oracle-solvable", "[genesis]") {
  GenConfig cfg;
  cfg.n_customers = 3;
  cfg.n_satellites = 2;
  cfg.seed = 9;
  Instance inst = generate(cfg);

  SolveOptions opts;
  opts.budget.max_vehicles_per_echelon = 4;  // default fleets carry a spare each
  const SolveResult r = solve_exact(inst, Scenario::ehc(), opts);
  CHECK(r.objective >= 0.0);
  CHECK(check_feasibility(scenario_instance(inst, Scenario::ehc()), r.solution).empty());
}
