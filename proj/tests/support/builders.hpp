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

// Shared instance builders for the test suite.  The tiny-instance generator
// here is deliberately independent of the library's own generator so the two
// can cross-check each other.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "verde2e/core.hpp"
#include "verde2e/solution.hpp"

namespace verde2e::testing {

// Fixed worked example used throughout the suite: one satellite 10 km from
// the warehouse, one customer 0.4 km beyond it.  Pickup (walk 0.4 km, inside
// the green radius) and zero-emission home delivery tie at 2.418 kg; company
// distance prefers pickup (20.0 km vs 20.8 km).
inline Instance t1_instance() {
  Instance inst;
  inst.name = "T1";
  inst.nodes = {
      {0, NodeKind::warehouse, Point{0.0, 0.0}},
      {1, NodeKind::satellite, Point{10.0, 0.0}},
      {2, NodeKind::customer, Point{10.4, 0.0}},
  };
  inst.satellites = {{1, 30.0}};
  inst.customers = {{2, 2.0, 2.0, 0.5, SizeClass::small}};
  Vehicle truck;
  truck.id = 0;
  truck.echelon = Echelon::first;
  truck.capacity_kg = 100.0;
  truck.emission_factor = 0.38;
  truck.rho_empty_l_per_km = 0.30;
  truck.rho_full_l_per_km = 0.80;
  Vehicle green_van;
  green_van.id = 1;
  green_van.echelon = Echelon::second;
  green_van.capacity_kg = 50.0;
  green_van.emission_factor = 0.0;
  green_van.rho_empty_l_per_km = 0.0;
  green_van.rho_full_l_per_km = 0.0;
  inst.vehicles = {truck, green_van};
  inst.distance_mode = DistanceMode::euclidean;
  return inst;
}

// Hand-built optimal solutions of the worked example.  Both score 2.418 kg
// of emissions; the pickup one travels 20.4 km in total, the home one 20.8.
inline Solution t1_pickup_solution() {
  Solution sol;
  sol.first_echelon_routes.push_back({0, {1}, {2.0, 0.0}});
  sol.pickup[2] = 1;
  return sol;
}

inline Solution t1_home_solution() {
  Solution sol;
  sol.first_echelon_routes.push_back({0, {1}, {2.0, 0.0}});
  sol.second_echelon_routes.push_back({1, 1, {2}, {2.0, 0.0}});
  sol.home[2] = HomeAssignment{1, 1};
  return sol;
}

// Deterministic draw helpers (do not rely on std::uniform_* distributions,
// whose output is implementation-defined).
inline double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double draw_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * draw_unit(rng);
}

inline int draw_index(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

// Random desk-scale instance within the default oracle budget: up to 5
// customers, up to 3 satellites, up to 2 vehicles per echelon.  Sized so
// that most draws are feasible in all scenarios while still exercising
// forced-home customers, pickup radii, shared satellites and occasional
// infeasibility (single green vehicle too small under the low-capacity
// variant).
inline Instance tiny_random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.name = "tiny-" + std::to_string(seed);

  const int n_cust = 1 + draw_index(rng, 5);
  const int n_sat = 1 + draw_index(rng, 3);

  inst.nodes.push_back({0, NodeKind::warehouse, Point{-5.0, 2.0}});
  for (int i = 0; i < n_sat; ++i) {
    inst.nodes.push_back({1 + i, NodeKind::satellite,
                          Point{draw_range(rng, 0.0, 6.0), draw_range(rng, 0.0, 4.0)}});
  }
  const double d_max_menu[] = {0.0, 1.0, 2.0, 3.5};
  const double d_green_menu[] = {0.0, 1.0};
  double total_demand = 0.0;
  for (int i = 0; i < n_cust; ++i) {
    const int node = 1 + n_sat + i;
    inst.nodes.push_back({node, NodeKind::customer,
                          Point{draw_range(rng, 0.0, 6.0), draw_range(rng, 0.0, 4.0)}});
    Customer c;
    c.node = node;
    c.demand_kg = draw_range(rng, 0.5, 4.0);
    c.d_max_km = d_max_menu[draw_index(rng, 4)];
    c.d_green_km = d_green_menu[draw_index(rng, 2)];
    if (c.d_green_km > c.d_max_km) c.d_green_km = c.d_max_km;
    c.size_class = static_cast<SizeClass>(draw_index(rng, 4));
    if (c.size_class == SizeClass::extra_small || c.size_class == SizeClass::large)
      c.d_max_km = c.d_green_km = 0.0;
    total_demand += c.demand_kg;
    inst.customers.push_back(c);
  }
  // One hub satellite always fits the whole day's demand.  Individual
  // customers cannot split across satellites and a van serves exactly one
  // satellite per route, so without a hub a tight capacity draw could make
  // the instance infeasible outright.
  const int hub = n_sat == 1 ? 0 : draw_index(rng, n_sat);
  for (int i = 0; i < n_sat; ++i) {
    const double factor =
        (i == hub) ? draw_range(rng, 1.05, 1.6) : draw_range(rng, 0.6, 1.5);
    inst.satellites.push_back({1 + i, total_demand * factor});
  }

  int vid = 0;
  // A second truck only makes sense when satellites can split the load;
  // with one satellite a partitioned supply cannot use it.
  const int n_trucks = n_sat == 1 ? 1 : 1 + draw_index(rng, 2);
  for (int i = 0; i < n_trucks; ++i) {
    Vehicle v;
    v.id = vid++;
    v.echelon = Echelon::first;
    // The first truck can always carry the whole day's demand: each
    // satellite takes its inflow from a single truck, so a fleet of
    // part-capacity trucks cannot serve a hub that holds everything.
    v.capacity_kg = total_demand * (i == 0 ? draw_range(rng, 1.05, 1.5)
                                           : draw_range(rng, 0.65, 1.0));
    v.emission_factor = 0.38;
    v.rho_empty_l_per_km = 0.30;
    v.rho_full_l_per_km = 0.80;
    inst.vehicles.push_back(v);
  }
  const int fleet_shape = draw_index(rng, 10);  // 0-2: single diesel, 3: single green
  auto green_van = [&](double cap) {
    Vehicle v;
    v.id = vid++;
    v.echelon = Echelon::second;
    v.capacity_kg = cap;
    v.emission_factor = 0.0;
    v.rho_empty_l_per_km = 0.0;
    v.rho_full_l_per_km = 0.0;
    return v;
  };
  auto diesel_van = [&](double cap) {
    Vehicle v;
    v.id = vid++;
    v.echelon = Echelon::second;
    v.capacity_kg = cap;
    v.emission_factor = 0.30;
    v.rho_empty_l_per_km = 0.15;
    v.rho_full_l_per_km = 0.35;
    return v;
  };
  if (fleet_shape <= 2) {
    inst.vehicles.push_back(diesel_van(total_demand * draw_range(rng, 1.1, 1.5)));
  } else if (fleet_shape == 3) {
    // A lone zero-emission van must survive the low-capacity scenario's
    // halving, so it gets at least twice the total demand.
    inst.vehicles.push_back(green_van(total_demand * draw_range(rng, 2.2, 3.0)));
  } else {
    inst.vehicles.push_back(green_van(total_demand * draw_range(rng, 0.5, 1.2)));
    inst.vehicles.push_back(diesel_van(total_demand * draw_range(rng, 1.0, 1.4)));
  }
  inst.distance_mode = DistanceMode::euclidean;
  return inst;
}

}  // namespace verde2e::testing
