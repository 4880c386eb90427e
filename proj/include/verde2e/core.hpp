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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace verde2e {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  using Error::Error;
};
struct InfeasibleError : Error {
  using Error::Error;
};
struct BudgetExceededError : Error {
  using Error::Error;
};

// Shared absolute tolerance for distance threshold comparisons.  Model
// coefficients, the evaluator and the exhaustive solver must classify
// boundary cases (pickup admissibility, zero-emission radius) identically,
// so they all go through the helpers below.
inline constexpr double kDistanceTol = 1e-9;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Canonical numeric rendering used by every text artifact (12 significant
// digits, shortest form), so identical values always serialize identically.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Shortest decimal form that parses back to the exact same double.  Used by
// machine interchange files where a re-imported value must be bit-identical.
inline std::string format_number_exact(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Point {
  double x_km = 0.0;
  double y_km = 0.0;
};

enum class NodeKind { warehouse, satellite, customer };

struct Node {
  int id = -1;
  NodeKind kind = NodeKind::customer;
  std::optional<Point> position;  // required in euclidean distance mode
};

enum class SizeClass { extra_small, small, medium, large };

inline std::string to_string(SizeClass c) {
  switch (c) {
    case SizeClass::extra_small: return "extra_small";
    case SizeClass::small: return "small";
    case SizeClass::medium: return "medium";
    case SizeClass::large: return "large";
  }
  throw Error("invalid size class");
}

inline SizeClass parse_size_class(const std::string& s) {
  if (s == "extra_small") return SizeClass::extra_small;
  if (s == "small") return SizeClass::small;
  if (s == "medium") return SizeClass::medium;
  if (s == "large") return SizeClass::large;
  throw ParseError("unknown size class: " + s);
}

struct Customer {
  int node = -1;
  double demand_kg = 0.0;
  // Pickup admissible radius (boundary inclusive).  Zero forbids pickup.
  double d_max_km = 0.0;
  // Trips of at most this length produce no emissions.  Must be <= d_max_km.
  double d_green_km = 0.0;
  SizeClass size_class = SizeClass::small;
};

struct Satellite {
  int node = -1;
  double capacity_kg = 0.0;
};

enum class Echelon { first, second };

struct Vehicle {
  int id = -1;
  Echelon echelon = Echelon::second;
  double capacity_kg = 0.0;
  // e_k, kg CO2 per litre of fuel.  Exactly zero marks a zero-emission
  // vehicle (its legs cost nothing regardless of load).
  double emission_factor = 0.0;
  double rho_empty_l_per_km = 0.0;  // consumption rate when empty
  double rho_full_l_per_km = 0.0;   // consumption rate at full load
};

// Piecewise stop-emission schedule for first-echelon vehicles.  A vehicle's
// stops fill the intervals in order; each interval contributes
// rate_kg_per_stop per stop assigned to it.  The last interval is unbounded
// so any stop count has a defined value.
class EmissionIntervals {
 public:
  struct Interval {
    std::optional<int> max_stops;  // stop capacity; nullopt = unbounded
    double rate_kg_per_stop = 0.0;
  };

  EmissionIntervals() : EmissionIntervals(default_intervals()) {}

  explicit EmissionIntervals(std::vector<Interval> intervals)
      : intervals_(std::move(intervals)) {
    if (intervals_.empty()) throw Error("emission intervals: empty schedule");
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
      const Interval& iv = intervals_[i];
      if (iv.rate_kg_per_stop < 0)
        throw Error("emission intervals: negative rate");
      if (i + 1 < intervals_.size()) {
        if (!iv.max_stops)
          throw Error("emission intervals: only the last interval may be unbounded");
        if (*iv.max_stops < 1)
          throw Error("emission intervals: interval capacity must be positive");
        if (intervals_[i + 1].rate_kg_per_stop < iv.rate_kg_per_stop)
          throw Error("emission intervals: rates must be non-decreasing");
      } else if (iv.max_stops) {
        throw Error("emission intervals: last interval must be unbounded");
      }
    }
  }

  static std::vector<Interval> default_intervals() {
    return {{1, 0.10}, {3, 0.15}, {std::nullopt, 0.30}};
  }

  const std::vector<Interval>& intervals() const { return intervals_; }

 private:
  std::vector<Interval> intervals_;
};

// Total stop emissions for a route with `stops` satellite visits.
inline double stop_emissions(int stops, const EmissionIntervals& schedule) {
  if (stops < 0) throw Error("stop_emissions: negative stop count");
  double total = 0.0;
  int remaining = stops;
  for (const auto& iv : schedule.intervals()) {
    if (remaining == 0) break;
    int take = iv.max_stops ? std::min(remaining, *iv.max_stops) : remaining;
    total += take * iv.rate_kg_per_stop;
    remaining -= take;
  }
  return total;
}

enum class Metric { emissions, total_distance, company_distance };

inline std::string to_string(Metric m) {
  switch (m) {
    case Metric::emissions: return "emissions";
    case Metric::total_distance: return "total_distance";
    case Metric::company_distance: return "company_distance";
  }
  throw Error("invalid metric");
}

struct Scenario {
  Metric objective = Metric::emissions;
  // Halves the capacity of zero-emission second-echelon vehicles.
  bool low_capacity_green = false;
  // Forbids satellite pickup; every customer is served at home.
  bool full_home_delivery = false;

  static Scenario ehc() { return {Metric::emissions, false, false}; }
  static Scenario elc() { return {Metric::emissions, true, false}; }
  static Scenario td() { return {Metric::total_distance, false, false}; }
  static Scenario cd() { return {Metric::company_distance, false, false}; }
};

inline std::string scenario_name(const Scenario& s) {
  std::string base;
  if (s.objective == Metric::emissions) base = s.low_capacity_green ? "elc" : "ehc";
  else if (s.objective == Metric::total_distance) base = "td";
  else base = "cd";
  if (s.full_home_delivery) base += "_hd";
  return base;
}

// Accepts "ehc", "elc", "td", "cd", each optionally suffixed with "_hd".
inline Scenario parse_scenario(const std::string& token) {
  std::string base = token;
  bool hd = false;
  if (base.size() > 3 && base.substr(base.size() - 3) == "_hd") {
    hd = true;
    base = base.substr(0, base.size() - 3);
  }
  Scenario s;
  if (base == "ehc") s = Scenario::ehc();
  else if (base == "elc") s = Scenario::elc();
  else if (base == "td") s = Scenario::td();
  else if (base == "cd") s = Scenario::cd();
  else throw ParseError("unknown scenario: " + token);
  s.full_home_delivery = hd;
  return s;
}

enum class DistanceMode { explicit_matrix, euclidean };

// A problem instance.  Node 0 is always the warehouse; satellite and
// customer entries reference nodes by id and are listed in ascending node
// order.  Distances are either an explicit row-major matrix or derived on
// demand from node positions.
struct Instance {
  std::string name;
  std::vector<Node> nodes;
  std::vector<Customer> customers;
  std::vector<Satellite> satellites;
  std::vector<Vehicle> vehicles;
  DistanceMode distance_mode = DistanceMode::euclidean;
  std::vector<double> distances;  // |nodes|^2 entries, explicit mode only
  // Emission factor of a customer pickup trip beyond its green radius,
  // kg CO2 per km.
  double customer_emission_factor = 0.15;
  EmissionIntervals stop_intervals;

  double distance_km(int i, int j) const {
    const int n = static_cast<int>(nodes.size());
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw Error("distance_km: node id out of range");
    if (distance_mode == DistanceMode::explicit_matrix)
      return distances[static_cast<std::size_t>(i) * n + j];
    const auto& a = nodes[i].position;
    const auto& b = nodes[j].position;
    if (!a || !b) throw Error("distance_km: node without position");
    const double dx = a->x_km - b->x_km;
    const double dy = a->y_km - b->y_km;
    return std::sqrt(dx * dx + dy * dy);
  }

  const Customer* find_customer(int node) const {
    for (const auto& c : customers)
      if (c.node == node) return &c;
    return nullptr;
  }

  const Satellite* find_satellite(int node) const {
    for (const auto& s : satellites)
      if (s.node == node) return &s;
    return nullptr;
  }

  const Vehicle* find_vehicle(int id) const {
    for (const auto& v : vehicles)
      if (v.id == id) return &v;
    return nullptr;
  }

  std::vector<int> fleet(Echelon e) const {
    std::vector<int> ids;
    for (const auto& v : vehicles)
      if (v.echelon == e) ids.push_back(v.id);
    return ids;
  }

  double total_demand_kg() const {
    double total = 0.0;
    for (const auto& c : customers) total += c.demand_kg;
    return total;
  }
};

// True if (i, j) can be traversed by a company vehicle: first-echelon arcs
// connect the warehouse and satellites, second-echelon arcs connect
// satellites and customers.  Warehouse<->customer arcs exist for no vehicle.
inline bool is_company_arc(NodeKind a, NodeKind b) {
  if (a == NodeKind::warehouse) return b == NodeKind::satellite;
  if (b == NodeKind::warehouse) return a == NodeKind::satellite;
  return true;
}

// Structural checks on an instance.  Returns human-readable problems; empty
// means valid.  Explicit distance matrices are checked for symmetry-free
// sanity (non-negative, zero diagonal, finite) and for the triangle
// inequality over company arcs, which the exhaustive solver relies on.
inline std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> problems;
  auto complain = [&problems](const std::string& msg) { problems.push_back(msg); };

  const int n = static_cast<int>(inst.nodes.size());
  if (n == 0) {
    complain("no nodes");
    return problems;
  }
  for (int i = 0; i < n; ++i) {
    if (inst.nodes[i].id != i)
      complain("node ids must be dense and ascending; index " + std::to_string(i) +
               " has id " + std::to_string(inst.nodes[i].id));
  }
  if (inst.nodes[0].kind != NodeKind::warehouse) complain("node 0 must be the warehouse");
  for (int i = 1; i < n; ++i) {
    if (inst.nodes[i].kind == NodeKind::warehouse)
      complain("more than one warehouse (node " + std::to_string(i) + ")");
  }

  int prev = -1;
  for (const auto& s : inst.satellites) {
    if (s.node <= prev) complain("satellites must be listed in ascending node order");
    prev = s.node;
    if (s.node < 0 || s.node >= n || inst.nodes[s.node].kind != NodeKind::satellite)
      complain("satellite entry references node " + std::to_string(s.node) +
               " which is not a satellite node");
    if (!(s.capacity_kg > 0))
      complain("satellite " + std::to_string(s.node) + ": capacity must be positive");
  }
  prev = -1;
  for (const auto& c : inst.customers) {
    if (c.node <= prev) complain("customers must be listed in ascending node order");
    prev = c.node;
    if (c.node < 0 || c.node >= n || inst.nodes[c.node].kind != NodeKind::customer)
      complain("customer entry references node " + std::to_string(c.node) +
               " which is not a customer node");
    if (!(c.demand_kg > 0))
      complain("customer " + std::to_string(c.node) + ": demand must be positive");
    if (c.d_max_km < 0 || c.d_green_km < 0)
      complain("customer " + std::to_string(c.node) + ": negative radius");
    if (c.d_green_km > c.d_max_km)
      complain("customer " + std::to_string(c.node) + ": d_green exceeds d_max");
  }
  for (int i = 1; i < n; ++i) {
    if (inst.nodes[i].kind == NodeKind::satellite && !inst.find_satellite(i))
      complain("satellite node " + std::to_string(i) + " has no satellite entry");
    if (inst.nodes[i].kind == NodeKind::customer && !inst.find_customer(i))
      complain("customer node " + std::to_string(i) + " has no customer entry");
  }

  for (std::size_t i = 0; i < inst.vehicles.size(); ++i) {
    const Vehicle& v = inst.vehicles[i];
    if (v.id != static_cast<int>(i))
      complain("vehicle ids must be dense and ascending; index " + std::to_string(i) +
               " has id " + std::to_string(v.id));
    if (!(v.capacity_kg > 0))
      complain("vehicle " + std::to_string(v.id) + ": capacity must be positive");
    if (v.emission_factor < 0)
      complain("vehicle " + std::to_string(v.id) + ": negative emission factor");
    if (v.rho_empty_l_per_km < 0 || v.rho_full_l_per_km < v.rho_empty_l_per_km)
      complain("vehicle " + std::to_string(v.id) +
               ": consumption rates must satisfy 0 <= rho_empty <= rho_full");
  }

  if (inst.distance_mode == DistanceMode::explicit_matrix) {
    if (inst.distances.size() != static_cast<std::size_t>(n) * n) {
      complain("distance matrix must have " + std::to_string(n * n) + " entries");
      return problems;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double d = inst.distances[static_cast<std::size_t>(i) * n + j];
        if (!std::isfinite(d) || d < 0)
          complain("distance (" + std::to_string(i) + "," + std::to_string(j) +
                   ") must be finite and non-negative");
        if (i == j && d != 0)
          complain("distance (" + std::to_string(i) + "," + std::to_string(i) +
                   ") must be zero");
      }
    }
    // Triangle inequality over triples of company arcs.
    for (int i = 0; i < n && problems.empty(); ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || !is_company_arc(inst.nodes[i].kind, inst.nodes[j].kind)) continue;
        for (int m = 0; m < n; ++m) {
          if (m == i || m == j) continue;
          if (!is_company_arc(inst.nodes[i].kind, inst.nodes[m].kind)) continue;
          if (!is_company_arc(inst.nodes[m].kind, inst.nodes[j].kind)) continue;
          const double direct = inst.distances[static_cast<std::size_t>(i) * n + j];
          const double via = inst.distances[static_cast<std::size_t>(i) * n + m] +
                             inst.distances[static_cast<std::size_t>(m) * n + j];
          if (direct > via + kDistanceTol) {
            complain("triangle inequality violated on (" + std::to_string(i) + "," +
                     std::to_string(m) + "," + std::to_string(j) + ")");
          }
        }
      }
    }
  } else {
    for (const auto& node : inst.nodes) {
      if (!node.position)
        complain("node " + std::to_string(node.id) +
                 " needs a position in euclidean distance mode");
    }
  }
  return problems;
}

inline void throw_if_invalid(const Instance& inst) {
  const auto problems = validate_instance(inst);
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid instance";
  if (!inst.name.empty()) os << " '" << inst.name << "'";
  os << ":";
  for (const auto& p : problems) os << "\n  " << p;
  throw Error(os.str());
}

// Satellite nodes a customer may pick up from, ascending.  The admissible
// radius is boundary inclusive.
inline std::vector<int> eligible_satellites(const Instance& inst, const Customer& c) {
  std::vector<int> result;
  for (const auto& s : inst.satellites) {
    if (inst.distance_km(c.node, s.node) <= c.d_max_km + kDistanceTol)
      result.push_back(s.node);
  }
  return result;
}

// Emissions of a customer's pickup trip to `satellite_node`.  Zero within the
// green radius, linear in distance beyond it.  Throws if the satellite is
// outside the admissible radius.
inline double customer_trip_emissions(const Instance& inst, const Customer& c,
                                      int satellite_node) {
  const double d = inst.distance_km(c.node, satellite_node);
  if (d > c.d_max_km + kDistanceTol)
    throw Error("customer " + std::to_string(c.node) + ": satellite " +
                std::to_string(satellite_node) + " is outside the admissible radius");
  if (d <= c.d_green_km + kDistanceTol) return 0.0;
  return inst.customer_emission_factor * d;
}

// Fuel consumption rate (litres per km) of a vehicle moving with `load_kg`
// on board: the empty rate plus a load-proportional share of the full-load
// increment.  Zero when the arc is not traversed.
inline double fcr(const Vehicle& v, double load_kg, bool traversed = true) {
  if (!traversed) return 0.0;
  if (load_kg < -kDistanceTol || load_kg > v.capacity_kg + kDistanceTol)
    throw Error("fcr: load " + std::to_string(load_kg) + " outside [0, capacity] for vehicle " +
                std::to_string(v.id));
  return v.rho_empty_l_per_km +
         (v.rho_full_l_per_km - v.rho_empty_l_per_km) / v.capacity_kg * load_kg;
}

// Emissions of one leg of `distance` km carrying `load_kg`.
inline double leg_emissions(const Vehicle& v, double distance, double load_kg) {
  if (v.emission_factor == 0.0) {
    // Still range-checks the load.
    (void)fcr(v, load_kg);
    return 0.0;
  }
  return v.emission_factor * distance * fcr(v, load_kg);
}

inline constexpr double kDefaultGreenLowCapacityFactor = 0.5;

// The instance a scenario actually operates on.  The low-capacity variant
// scales zero-emission second-echelon vehicle capacities by `green_low_factor`;
// other scenario fields do not touch the instance.
inline Instance scenario_instance(const Instance& inst, const Scenario& scenario,
                                  double green_low_factor = kDefaultGreenLowCapacityFactor) {
  Instance result = inst;
  if (scenario.low_capacity_green) {
    if (!(green_low_factor > 0) || green_low_factor > 1)
      throw Error("green capacity factor must lie in (0, 1]");
    for (auto& v : result.vehicles) {
      if (v.echelon == Echelon::second && v.emission_factor == 0.0)
        v.capacity_kg *= green_low_factor;
    }
  }
  return result;
}

}  // namespace verde2e
