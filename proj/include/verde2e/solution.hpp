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

#pragma once

#include <map>
#include <vector>

#include "verde2e/core.hpp"

namespace verde2e {

// First-echelon route: an ordered satellite sequence driven by one vehicle,
// implicitly starting and ending at the warehouse.  leg_loads_kg has one
// entry per traversed arc (satellites.size() + 1 when non-empty).
struct FirstEchelonRoute {
  int vehicle = -1;
  std::vector<int> satellites;
  std::vector<double> leg_loads_kg;
};

// Second-echelon route: a vehicle assigned to one satellite serving an
// ordered customer sequence, implicitly starting and ending at the
// satellite.  A route with no customers records a bare vehicle-to-satellite
// assignment.
struct SecondEchelonRoute {
  int vehicle = -1;
  int satellite = -1;
  std::vector<int> customers;
  std::vector<double> leg_loads_kg;
};

struct HomeAssignment {
  int satellite = -1;
  int vehicle = -1;
};

// A complete solution.  pickup and home keys must partition the customer
// set; vehicles without a route are simply absent.
struct Solution {
  std::vector<FirstEchelonRoute> first_echelon_routes;
  std::vector<SecondEchelonRoute> second_echelon_routes;
  std::map<int, int> pickup;             // customer node -> satellite node
  std::map<int, HomeAssignment> home;    // customer node -> (satellite, vehicle)
};

// Satellite nodes visited by at least one first-echelon route, ascending.
inline std::vector<int> active_satellite_nodes(const Solution& sol) {
  std::vector<int> nodes;
  for (const auto& r : sol.first_echelon_routes)
    for (int h : r.satellites) nodes.push_back(h);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace verde2e
