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

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "verde2e/core.hpp"
#include "verde2e/solution.hpp"

namespace verde2e {

// Absolute tolerance for load bookkeeping.  Looser than kDistanceTol so that
// externally produced solutions survive solver rounding on continuous
// variables; binaries are handled separately at import time.
inline constexpr double kLoadTol = 1e-6;

enum class ViolationCode {
  unknown_reference,
  unserved_customer,
  double_service,
  ineligible_pickup,
  capacity_exceeded,
  inactive_satellite_used,
  vehicle_multi_satellite,
  wrong_satellite_assignment,
  repeated_visit,
  disconnected_route,
  load_imbalance,
  duplicate_vehicle,
};

inline std::string to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::unknown_reference: return "unknown_reference";
    case ViolationCode::unserved_customer: return "unserved_customer";
    case ViolationCode::double_service: return "double_service";
    case ViolationCode::ineligible_pickup: return "ineligible_pickup";
    case ViolationCode::capacity_exceeded: return "capacity_exceeded";
    case ViolationCode::inactive_satellite_used: return "inactive_satellite_used";
    case ViolationCode::vehicle_multi_satellite: return "vehicle_multi_satellite";
    case ViolationCode::wrong_satellite_assignment: return "wrong_satellite_assignment";
    case ViolationCode::repeated_visit: return "repeated_visit";
    case ViolationCode::disconnected_route: return "disconnected_route";
    case ViolationCode::load_imbalance: return "load_imbalance";
    case ViolationCode::duplicate_vehicle: return "duplicate_vehicle";
  }
  throw Error("invalid violation code");
}

struct Violation {
  ViolationCode code;
  std::vector<int> subjects;  // node/vehicle ids involved
  std::string detail;
};

inline std::string to_string(const Violation& v) {
  std::ostringstream os;
  os << to_string(v.code) << " [";
  for (std::size_t i = 0; i < v.subjects.size(); ++i) {
    if (i) os << ",";
    os << v.subjects[i];
  }
  os << "] " << v.detail;
  return os.str();
}

// Feasibility check, independent of the MILP encoding.  Loads are read as
// physical per-leg quantities: each stop must drop a non-negative amount
// (per route), which is stricter than the MILP's per-satellite aggregate
// balance but holds for every physically realizable plan.
inline std::vector<Violation> check_feasibility(const Instance& inst, const Solution& sol) {
  std::vector<Violation> out;
  auto flag = [&out](ViolationCode code, std::vector<int> subjects, std::string detail) {
    out.push_back({code, std::move(subjects), std::move(detail)});
  };

  // --- reference sanity ------------------------------------------------
  bool references_ok = true;
  auto check_vehicle = [&](int id, Echelon expected) {
    const Vehicle* v = inst.find_vehicle(id);
    if (!v) {
      flag(ViolationCode::unknown_reference, {id}, "no such vehicle");
      references_ok = false;
      return false;
    }
    if (v->echelon != expected) {
      flag(ViolationCode::unknown_reference, {id}, "vehicle used in the wrong echelon");
      references_ok = false;
      return false;
    }
    return true;
  };
  std::set<int> seen_vehicles;
  for (const auto& r : sol.first_echelon_routes) {
    if (!seen_vehicles.insert(r.vehicle).second)
      flag(ViolationCode::duplicate_vehicle, {r.vehicle}, "vehicle appears in two routes");
    if (!check_vehicle(r.vehicle, Echelon::first)) continue;
    for (int h : r.satellites) {
      if (!inst.find_satellite(h)) {
        flag(ViolationCode::unknown_reference, {h}, "first-echelon stop is not a satellite");
        references_ok = false;
      }
    }
  }
  for (const auto& r : sol.second_echelon_routes) {
    if (!seen_vehicles.insert(r.vehicle).second)
      flag(ViolationCode::duplicate_vehicle, {r.vehicle}, "vehicle appears in two routes");
    if (!check_vehicle(r.vehicle, Echelon::second)) continue;
    if (!inst.find_satellite(r.satellite)) {
      flag(ViolationCode::disconnected_route, {r.vehicle},
           "second-echelon route lacks a valid base satellite");
      references_ok = false;
    }
    for (int c : r.customers) {
      if (!inst.find_customer(c)) {
        flag(ViolationCode::unknown_reference, {c}, "second-echelon stop is not a customer");
        references_ok = false;
      }
    }
  }
  for (const auto& [c, h] : sol.pickup) {
    if (!inst.find_customer(c) || !inst.find_satellite(h)) {
      flag(ViolationCode::unknown_reference, {c, h}, "pickup references unknown ids");
      references_ok = false;
    }
  }
  for (const auto& [c, a] : sol.home) {
    if (!inst.find_customer(c) || !inst.find_satellite(a.satellite) ||
        !inst.find_vehicle(a.vehicle) ||
        inst.find_vehicle(a.vehicle)->echelon != Echelon::second) {
      flag(ViolationCode::unknown_reference, {c, a.satellite, a.vehicle},
           "home assignment references unknown ids");
      references_ok = false;
    }
  }
  if (!references_ok) return out;

  // --- service partition ------------------------------------------------
  for (const auto& c : inst.customers) {
    const bool picked = sol.pickup.count(c.node) > 0;
    const bool homed = sol.home.count(c.node) > 0;
    if (picked && homed)
      flag(ViolationCode::double_service, {c.node}, "customer both picks up and is served at home");
    if (!picked && !homed)
      flag(ViolationCode::unserved_customer, {c.node}, "customer is not served");
  }

  // --- pickup admissibility --------------------------------------------
  for (const auto& [c, h] : sol.pickup) {
    const Customer* cust = inst.find_customer(c);
    const double d = inst.distance_km(c, h);
    if (d > cust->d_max_km + kDistanceTol) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "pickup trip of %.6g km exceeds d_max %.6g km", d,
                    cust->d_max_km);
      flag(ViolationCode::ineligible_pickup, {c, h}, buf);
    }
  }

  // --- satellite activation and capacity --------------------------------
  const std::vector<int> active = active_satellite_nodes(sol);
  auto is_active = [&active](int h) {
    return std::binary_search(active.begin(), active.end(), h);
  };
  std::map<int, double> assigned_demand;  // satellite -> pickup + home demand
  for (const auto& [c, h] : sol.pickup) assigned_demand[h] += inst.find_customer(c)->demand_kg;
  for (const auto& [c, a] : sol.home)
    assigned_demand[a.satellite] += inst.find_customer(c)->demand_kg;
  for (const auto& [h, demand] : assigned_demand) {
    if (!is_active(h))
      flag(ViolationCode::inactive_satellite_used, {h},
           "customers assigned to a satellite no first-echelon vehicle visits");
    const Satellite* sat = inst.find_satellite(h);
    if (demand > sat->capacity_kg + kLoadTol) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "assigned %.6g kg exceeds capacity %.6g kg", demand,
                    sat->capacity_kg);
      flag(ViolationCode::capacity_exceeded, {h}, buf);
    }
  }

  // --- second-echelon structure -----------------------------------------
  std::map<int, int> route_vehicle_of_customer;
  std::map<int, std::set<int>> satellites_of_vehicle;
  for (const auto& r : sol.second_echelon_routes) {
    satellites_of_vehicle[r.vehicle].insert(r.satellite);
    if (!is_active(r.satellite))
      flag(ViolationCode::inactive_satellite_used, {r.satellite, r.vehicle},
           "second-echelon vehicle assigned to an inactive satellite");
    std::set<int> on_route;
    for (int c : r.customers) {
      if (!on_route.insert(c).second)
        flag(ViolationCode::repeated_visit, {c, r.vehicle}, "customer visited twice");
      auto [it, inserted] = route_vehicle_of_customer.emplace(c, r.vehicle);
      if (!inserted)
        flag(ViolationCode::repeated_visit, {c, it->second, r.vehicle},
             "customer appears on two routes");
      auto home_it = sol.home.find(c);
      if (home_it == sol.home.end() || home_it->second.vehicle != r.vehicle ||
          home_it->second.satellite != r.satellite) {
        flag(ViolationCode::wrong_satellite_assignment, {c, r.vehicle},
             "routed customer is not home-assigned to this vehicle and satellite");
      }
    }
  }
  for (const auto& [k, sats] : satellites_of_vehicle) {
    if (sats.size() > 1)
      flag(ViolationCode::vehicle_multi_satellite, {k},
           "second-echelon vehicle serves more than one satellite");
  }
  for (const auto& [c, a] : sol.home) {
    auto it = route_vehicle_of_customer.find(c);
    if (it == route_vehicle_of_customer.end())
      flag(ViolationCode::unserved_customer, {c, a.vehicle},
           "home-assigned customer missing from its vehicle's route");
    else if (it->second != a.vehicle)
      flag(ViolationCode::wrong_satellite_assignment, {c, a.vehicle, it->second},
           "home assignment and route disagree on the vehicle");
  }

  // --- second-echelon loads ---------------------------------------------
  for (const auto& r : sol.second_echelon_routes) {
    if (r.customers.empty()) {
      if (!r.leg_loads_kg.empty())
        flag(ViolationCode::load_imbalance, {r.vehicle}, "legs recorded for an empty route");
      continue;
    }
    const Vehicle* v = inst.find_vehicle(r.vehicle);
    if (r.leg_loads_kg.size() != r.customers.size() + 1) {
      flag(ViolationCode::load_imbalance, {r.vehicle}, "leg count does not match stop count");
      continue;
    }
    double expected = 0.0;
    for (int c : r.customers) expected += inst.find_customer(c)->demand_kg;
    if (std::abs(r.leg_loads_kg.front() - expected) > kLoadTol)
      flag(ViolationCode::load_imbalance, {r.vehicle},
           "initial load does not equal the route's demand");
    for (std::size_t i = 0; i < r.customers.size(); ++i) {
      const double drop = r.leg_loads_kg[i] - r.leg_loads_kg[i + 1];
      if (std::abs(drop - inst.find_customer(r.customers[i])->demand_kg) > kLoadTol)
        flag(ViolationCode::load_imbalance, {r.vehicle, r.customers[i]},
             "drop does not equal the customer's demand");
    }
    if (std::abs(r.leg_loads_kg.back()) > kLoadTol)
      flag(ViolationCode::load_imbalance, {r.vehicle}, "vehicle does not return empty");
    for (double load : r.leg_loads_kg) {
      if (load < -kLoadTol)
        flag(ViolationCode::load_imbalance, {r.vehicle}, "negative leg load");
      if (load > v->capacity_kg + kLoadTol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "leg load %.6g kg exceeds capacity %.6g kg", load,
                      v->capacity_kg);
        flag(ViolationCode::capacity_exceeded, {r.vehicle}, buf);
      }
    }
  }

  // --- first-echelon structure and loads ---------------------------------
  std::map<int, double> delivered;  // satellite -> dropped by first echelon
  for (const auto& r : sol.first_echelon_routes) {
    if (r.satellites.empty()) {
      if (!r.leg_loads_kg.empty())
        flag(ViolationCode::load_imbalance, {r.vehicle}, "legs recorded for an empty route");
      continue;
    }
    std::set<int> on_route(r.satellites.begin(), r.satellites.end());
    if (on_route.size() != r.satellites.size())
      flag(ViolationCode::repeated_visit, {r.vehicle}, "satellite visited twice in one route");
    const Vehicle* v = inst.find_vehicle(r.vehicle);
    if (r.leg_loads_kg.size() != r.satellites.size() + 1) {
      flag(ViolationCode::load_imbalance, {r.vehicle}, "leg count does not match stop count");
      continue;
    }
    for (std::size_t i = 0; i < r.satellites.size(); ++i) {
      const double drop = r.leg_loads_kg[i] - r.leg_loads_kg[i + 1];
      if (drop < -kLoadTol)
        flag(ViolationCode::load_imbalance, {r.vehicle, r.satellites[i]},
             "load increases at a satellite stop");
      else
        delivered[r.satellites[i]] += drop;
    }
    if (std::abs(r.leg_loads_kg.back()) > kLoadTol)
      flag(ViolationCode::load_imbalance, {r.vehicle}, "vehicle does not return empty");
    for (double load : r.leg_loads_kg) {
      if (load < -kLoadTol)
        flag(ViolationCode::load_imbalance, {r.vehicle}, "negative leg load");
      if (load > v->capacity_kg + kLoadTol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "leg load %.6g kg exceeds capacity %.6g kg", load,
                      v->capacity_kg);
        flag(ViolationCode::capacity_exceeded, {r.vehicle}, buf);
      }
    }
  }
  for (const auto& s : inst.satellites) {
    const double need = assigned_demand.count(s.node) ? assigned_demand.at(s.node) : 0.0;
    const double got = delivered.count(s.node) ? delivered.at(s.node) : 0.0;
    if (std::abs(need - got) > kLoadTol) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "first echelon delivers %.6g kg, customers need %.6g kg",
                    got, need);
      flag(ViolationCode::load_imbalance, {s.node}, buf);
    }
  }

  return out;
}

// Evaluated breakdown of one feasible solution.  Stop emissions appear both
// on their own and folded into the first-echelon view.
struct Metrics {
  double e_k1 = 0.0;             // first-echelon driving emissions, kg
  double e_k2 = 0.0;             // second-echelon driving emissions, kg
  double e_c = 0.0;              // customer pickup-trip emissions, kg
  double e_stops = 0.0;          // first-echelon stop emissions, kg
  double e_k1_with_stops = 0.0;  // e_k1 + e_stops
  double d_k1 = 0.0;             // km
  double d_k2 = 0.0;             // km
  double d_c0 = 0.0;             // zero-emission pickup-trip distance, km
  double d_c = 0.0;              // emitting pickup-trip distance, km
  double total_emissions = 0.0;
  double total_distance = 0.0;
  double company_distance = 0.0;
  int active_satellites = 0;
  int active_pickup_only = 0;  // active but with no second-echelon route
  double customers_at_home_pct = 0.0;
  std::optional<double> avg_pickup_dist_em_km;    // mean over emitting trips
  std::optional<double> avg_pickup_dist_zero_km;  // mean over zero-emission trips
};

inline double metric_value(const Metrics& m, Metric metric) {
  switch (metric) {
    case Metric::emissions: return m.total_emissions;
    case Metric::total_distance: return m.total_distance;
    case Metric::company_distance: return m.company_distance;
  }
  throw Error("invalid metric");
}

namespace detail {

// Metric computation without the feasibility check.  Callers must hold a
// solution that is feasible by construction; evaluate() is the checked
// entry point.
inline Metrics compute_metrics(const Instance& inst, const Solution& sol) {
  Metrics m;
  for (const auto& r : sol.first_echelon_routes) {
    if (r.satellites.empty()) continue;
    const Vehicle& v = *inst.find_vehicle(r.vehicle);
    int prev = 0;
    for (std::size_t i = 0; i <= r.satellites.size(); ++i) {
      const int next = i < r.satellites.size() ? r.satellites[i] : 0;
      const double d = inst.distance_km(prev, next);
      m.d_k1 += d;
      m.e_k1 += leg_emissions(v, d, r.leg_loads_kg[i]);
      prev = next;
    }
    m.e_stops += stop_emissions(static_cast<int>(r.satellites.size()), inst.stop_intervals);
  }
  std::set<int> routed_satellites;
  for (const auto& r : sol.second_echelon_routes) {
    if (r.customers.empty()) continue;
    routed_satellites.insert(r.satellite);
    const Vehicle& v = *inst.find_vehicle(r.vehicle);
    int prev = r.satellite;
    for (std::size_t i = 0; i <= r.customers.size(); ++i) {
      const int next = i < r.customers.size() ? r.customers[i] : r.satellite;
      const double d = inst.distance_km(prev, next);
      m.d_k2 += d;
      m.e_k2 += leg_emissions(v, d, r.leg_loads_kg[i]);
      prev = next;
    }
  }
  int zero_trips = 0;
  int em_trips = 0;
  for (const auto& [c, h] : sol.pickup) {
    const Customer& cust = *inst.find_customer(c);
    const double d = inst.distance_km(c, h);
    m.e_c += customer_trip_emissions(inst, cust, h);
    if (d <= cust.d_green_km + kDistanceTol) {
      m.d_c0 += d;
      ++zero_trips;
    } else {
      m.d_c += d;
      ++em_trips;
    }
  }
  m.e_k1_with_stops = m.e_k1 + m.e_stops;
  m.total_emissions = m.e_k1 + m.e_k2 + m.e_c + m.e_stops;
  m.total_distance = m.d_k1 + m.d_k2 + m.d_c0 + m.d_c;
  m.company_distance = m.d_k1 + m.d_k2;
  const std::vector<int> active = active_satellite_nodes(sol);
  m.active_satellites = static_cast<int>(active.size());
  for (int h : active)
    if (!routed_satellites.count(h)) ++m.active_pickup_only;
  if (!inst.customers.empty())
    m.customers_at_home_pct =
        100.0 * static_cast<double>(sol.home.size()) / inst.customers.size();
  if (em_trips > 0) m.avg_pickup_dist_em_km = m.d_c / em_trips;
  if (zero_trips > 0) m.avg_pickup_dist_zero_km = m.d_c0 / zero_trips;
  return m;
}

}  // namespace detail

// Raised by evaluate() when the solution fails the feasibility check.
class InfeasibleSolutionError : public Error {
 public:
  InfeasibleSolutionError(std::string msg, std::vector<Violation> violations)
      : Error(std::move(msg)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

inline Metrics evaluate(const Instance& inst, const Solution& sol) {
  auto violations = check_feasibility(inst, sol);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "solution is infeasible:";
    for (const auto& v : violations) os << "\n  " << to_string(v);
    throw InfeasibleSolutionError(os.str(), std::move(violations));
  }
  return detail::compute_metrics(inst, sol);
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

inline std::string metrics_csv_header() {
  return "e_k1,e_k2,e_c,e_stops,e_k1_with_stops,d_k1,d_k2,d_c0,d_c,"
         "total_emissions,total_distance,company_distance,active_satellites,"
         "active_pickup_only,customers_at_home_pct,avg_pickup_dist_em_km,"
         "avg_pickup_dist_zero_km";
}

inline std::string metrics_csv_row(const Metrics& m) {
  using detail::format_double;
  std::ostringstream os;
  os << format_double(m.e_k1) << ',' << format_double(m.e_k2) << ',' << format_double(m.e_c)
     << ',' << format_double(m.e_stops) << ',' << format_double(m.e_k1_with_stops) << ','
     << format_double(m.d_k1) << ',' << format_double(m.d_k2) << ',' << format_double(m.d_c0)
     << ',' << format_double(m.d_c) << ',' << format_double(m.total_emissions) << ','
     << format_double(m.total_distance) << ',' << format_double(m.company_distance) << ','
     << m.active_satellites << ',' << m.active_pickup_only << ','
     << format_double(m.customers_at_home_pct) << ',';
  if (m.avg_pickup_dist_em_km) os << format_double(*m.avg_pickup_dist_em_km);
  os << ',';
  if (m.avg_pickup_dist_zero_km) os << format_double(*m.avg_pickup_dist_zero_km);
  return os.str();
}

// JSON view with the same keys as the CSV columns; absent averages are null.
inline nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["e_k1"] = m.e_k1;
  j["e_k2"] = m.e_k2;
  j["e_c"] = m.e_c;
  j["e_stops"] = m.e_stops;
  j["e_k1_with_stops"] = m.e_k1_with_stops;
  j["d_k1"] = m.d_k1;
  j["d_k2"] = m.d_k2;
  j["d_c0"] = m.d_c0;
  j["d_c"] = m.d_c;
  j["total_emissions"] = m.total_emissions;
  j["total_distance"] = m.total_distance;
  j["company_distance"] = m.company_distance;
  j["active_satellites"] = m.active_satellites;
  j["active_pickup_only"] = m.active_pickup_only;
  j["customers_at_home_pct"] = m.customers_at_home_pct;
  j["avg_pickup_dist_em_km"] =
      m.avg_pickup_dist_em_km ? nlohmann::json(*m.avg_pickup_dist_em_km) : nlohmann::json();
  j["avg_pickup_dist_zero_km"] =
      m.avg_pickup_dist_zero_km ? nlohmann::json(*m.avg_pickup_dist_zero_km) : nlohmann::json();
  return j;
}

}  // namespace verde2e
