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

// Exact solver for desk-scale instances by structured exhaustive
// enumeration: service modes and satellite assignments per customer, then
// customer-to-vehicle partitions, then first-echelon satellite partitions,
// then visit orders.  Enumeration covers every taut feasible solution (each
// visited satellite receives deliveries, each routed vehicle serves at
// least one stop); gratuitous detours only add cost in every metric, so
// optima and non-dominated points are unaffected.
//
// Leaf arithmetic deliberately mirrors the evaluator's accumulation order,
// so the reported optimum is bitwise equal to the evaluator's metric of the
// returned solution.

#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <tuple>
#include <utility>

#include "verde2e/core.hpp"
#include "verde2e/solution.hpp"
#include "verde2e/validate.hpp"

namespace verde2e {

// Enumeration size guard.  Exceeding it raises BudgetExceededError instead
// of silently truncating the search.
struct Budget {
  int max_customers = 6;
  int max_satellites = 3;
  int max_vehicles_per_echelon = 2;
};

struct MetricCap {
  Metric metric;
  double bound = 0.0;
};

// Acceptance slack for metric caps; pruning uses a slightly wider margin so
// floating-point noise can never cut a boundary solution.
inline constexpr double kCapTol = 1e-9;

struct SolveOptions {
  std::optional<Metric> objective_override;
  std::vector<MetricCap> caps;
  Budget budget;
  double green_low_factor = kDefaultGreenLowCapacityFactor;
};

struct SolveResult {
  Solution solution;
  double objective = 0.0;  // metric_value(metrics, objective metric)
  Metrics metrics;         // evaluated against the scenario's effective instance
};

namespace detail {

struct MetricSums {
  double e_k1 = 0, e_k2 = 0, e_c = 0, e_stops = 0;
  double d_k1 = 0, d_k2 = 0, d_c0 = 0, d_c = 0;

  // Same grouping as the evaluator's totals.
  double total_emissions() const { return e_k1 + e_k2 + e_c + e_stops; }
  double total_distance() const { return d_k1 + d_k2 + d_c0 + d_c; }
  double company_distance() const { return d_k1 + d_k2; }
  double get(Metric m) const {
    switch (m) {
      case Metric::emissions: return total_emissions();
      case Metric::total_distance: return total_distance();
      case Metric::company_distance: return company_distance();
    }
    throw Error("invalid metric");
  }
};

class Enumerator {
 public:
  Enumerator(const Instance& inst, bool allow_pickup, const Budget& budget) : inst_(inst) {
    if (static_cast<int>(inst.customers.size()) > budget.max_customers ||
        static_cast<int>(inst.satellites.size()) > budget.max_satellites ||
        static_cast<int>(inst.fleet(Echelon::first).size()) > budget.max_vehicles_per_echelon ||
        static_cast<int>(inst.fleet(Echelon::second).size()) > budget.max_vehicles_per_echelon) {
      throw BudgetExceededError(
          "instance exceeds the enumeration budget (" +
          std::to_string(inst.customers.size()) + " customers, " +
          std::to_string(inst.satellites.size()) + " satellites, " +
          std::to_string(inst.fleet(Echelon::first).size()) + "+" +
          std::to_string(inst.fleet(Echelon::second).size()) + " vehicles); raise the budget "
          "explicitly to proceed");
    }
    for (const auto& s : inst.satellites) {
      sat_node_.push_back(s.node);
      sat_cap_.push_back(s.capacity_kg);
    }
    for (const auto& v : inst.vehicles) {
      if (v.echelon == Echelon::first) k1_.push_back(&v);
      else k2_.push_back(&v);
    }
    for (const auto& c : inst.customers) {
      customers_.push_back(&c);
      std::vector<Option> opts;
      if (allow_pickup) {
        for (std::size_t si = 0; si < sat_node_.size(); ++si) {
          if (inst.distance_km(c.node, sat_node_[si]) <= c.d_max_km + kDistanceTol)
            opts.push_back({true, static_cast<int>(si)});
        }
      }
      for (std::size_t si = 0; si < sat_node_.size(); ++si)
        opts.push_back({false, static_cast<int>(si)});
      options_.push_back(std::move(opts));
    }
    chosen_.assign(customers_.size(), -1);
    sat_load_.assign(sat_node_.size(), 0.0);
    van_.resize(k2_.size());
    truck_.resize(k1_.size());
  }

  // Minimize `primary` subject to caps.  Returns the first optimum in
  // enumeration order, or nullopt when no solution satisfies the caps.
  // With caps present, visit orders are enumerated exhaustively because a
  // cap on one metric couples the otherwise independent route orderings.
  std::optional<SolveResult> optimize(Metric primary, const std::vector<MetricCap>& caps) {
    primary_ = primary;
    caps_ = caps;
    enumerate_orders_ = !caps.empty();
    best_.reset();
    sink_ = nullptr;
    assign_dfs(0);
    std::optional<SolveResult> result;
    if (best_) {
      result.emplace();
      result->solution = std::move(best_->solution);
      result->metrics = best_->metrics;
      result->objective = metric_value(result->metrics, primary);
    }
    return result;
  }

  // Visit every taut feasible solution (canonical under identical-vehicle
  // relabeling) together with its evaluated metrics.
  void enumerate(const std::function<void(const Solution&, const Metrics&)>& sink) {
    primary_ = Metric::emissions;
    caps_.clear();
    enumerate_orders_ = true;
    best_.reset();
    sink_ = &sink;
    assign_dfs(0);
  }

 private:
  struct Option {
    bool pickup;
    int sat_idx;
  };
  struct VanState {
    int sat_idx = -1;
    double load = 0.0;
    std::vector<int> customers;  // customer indices, insertion order
  };
  struct TruckState {
    double load = 0.0;
    std::vector<int> sats;  // satellite indices, insertion order
  };
  struct Incumbent {
    Solution solution;
    Metrics metrics;
    double primary_value;
  };

  static constexpr double kPrunePad = 1e-9;

  bool same_vehicle_class(const Vehicle& a, const Vehicle& b) const {
    return a.capacity_kg == b.capacity_kg && a.emission_factor == b.emission_factor &&
           a.rho_empty_l_per_km == b.rho_empty_l_per_km &&
           a.rho_full_l_per_km == b.rho_full_l_per_km;
  }

  // Customer-trip contribution of one option, split like the evaluator.
  void option_deltas(std::size_t ci, const Option& o, double& e_c, double& d_c0,
                     double& d_c) const {
    e_c = d_c0 = d_c = 0.0;
    if (!o.pickup) return;
    const Customer& cust = *customers_[ci];
    const double d = inst_.distance_km(cust.node, sat_node_[o.sat_idx]);
    if (d <= cust.d_green_km + kDistanceTol) {
      d_c0 = d;
    } else {
      d_c = d;
      e_c = inst_.customer_emission_factor * d;
    }
  }

  bool prune_partial(double e_c, double d_c0, double d_c) const {
    MetricSums partial;
    partial.e_c = e_c;
    partial.d_c0 = d_c0;
    partial.d_c = d_c;
    if (best_ && partial.get(primary_) > best_->primary_value + kPrunePad) return true;
    for (const auto& cap : caps_) {
      if (partial.get(cap.metric) > cap.bound + kCapTol + 1e-12) return true;
    }
    return false;
  }

  void assign_dfs(std::size_t ci) {
    if (ci == customers_.size()) {
      home_list_.clear();
      for (std::size_t i = 0; i < customers_.size(); ++i)
        if (!options_[i][chosen_[i]].pickup) home_list_.push_back(static_cast<int>(i));
      for (auto& v : van_) {
        v.sat_idx = -1;
        v.load = 0.0;
        v.customers.clear();
      }
      home_dfs(0);
      return;
    }
    for (std::size_t oi = 0; oi < options_[ci].size(); ++oi) {
      const Option& o = options_[ci][oi];
      const double demand = customers_[ci]->demand_kg;
      if (sat_load_[o.sat_idx] + demand > sat_cap_[o.sat_idx]) continue;
      double e_c, d_c0, d_c;
      option_deltas(ci, o, e_c, d_c0, d_c);
      if (prune_partial(cust_e_c_ + e_c, cust_d_c0_ + d_c0, cust_d_c_ + d_c)) continue;
      // Accumulators are restored by assignment, not subtraction: x += d
      // followed by x -= d need not return the original bits, and residue
      // in sat_load_ would later masquerade as a phantom demand satellite.
      const double sat_prev = sat_load_[o.sat_idx];
      const double ec_prev = cust_e_c_, dc0_prev = cust_d_c0_, dc_prev = cust_d_c_;
      chosen_[ci] = static_cast<int>(oi);
      sat_load_[o.sat_idx] = sat_prev + demand;
      cust_e_c_ = ec_prev + e_c;
      cust_d_c0_ = dc0_prev + d_c0;
      cust_d_c_ = dc_prev + d_c;
      assign_dfs(ci + 1);
      cust_e_c_ = ec_prev;
      cust_d_c0_ = dc0_prev;
      cust_d_c_ = dc_prev;
      sat_load_[o.sat_idx] = sat_prev;
      chosen_[ci] = -1;
    }
  }

  void home_dfs(std::size_t i) {
    if (i == home_list_.size()) {
      demand_sats_.clear();
      for (std::size_t si = 0; si < sat_node_.size(); ++si)
        if (sat_load_[si] > 0.0) demand_sats_.push_back(static_cast<int>(si));
      for (auto& t : truck_) {
        t.load = 0.0;
        t.sats.clear();
      }
      e1_dfs(0);
      return;
    }
    const int ci = home_list_[i];
    const int sat = options_[ci][chosen_[ci]].sat_idx;
    const double demand = customers_[ci]->demand_kg;
    for (std::size_t vi = 0; vi < van_.size(); ++vi) {
      VanState& v = van_[vi];
      if (v.sat_idx != -1 && v.sat_idx != sat) continue;
      if (v.load + demand > k2_[vi]->capacity_kg) continue;
      if (v.sat_idx == -1) {
        // Among unused vehicles of one identical class, only the lowest id
        // is tried: relabelings reach the same solutions.
        bool duplicate = false;
        for (std::size_t vj = 0; vj < vi && !duplicate; ++vj)
          duplicate = van_[vj].sat_idx == -1 && same_vehicle_class(*k2_[vj], *k2_[vi]);
        if (duplicate) continue;
      }
      const int prev_sat = v.sat_idx;
      const double prev_load = v.load;
      v.sat_idx = sat;
      v.load = prev_load + demand;
      v.customers.push_back(ci);
      home_dfs(i + 1);
      v.customers.pop_back();
      v.load = prev_load;
      v.sat_idx = prev_sat;
    }
  }

  void e1_dfs(std::size_t si) {
    if (si == demand_sats_.size()) {
      leaf();
      return;
    }
    const int sat = demand_sats_[si];
    const double need = sat_load_[sat];
    for (std::size_t ti = 0; ti < truck_.size(); ++ti) {
      TruckState& t = truck_[ti];
      if (t.load + need > k1_[ti]->capacity_kg) continue;
      if (t.sats.empty()) {
        bool duplicate = false;
        for (std::size_t tj = 0; tj < ti && !duplicate; ++tj)
          duplicate = truck_[tj].sats.empty() && same_vehicle_class(*k1_[tj], *k1_[ti]);
        if (duplicate) continue;
      }
      const double prev_load = t.load;
      t.load = prev_load + need;
      t.sats.push_back(sat);
      e1_dfs(si + 1);
      t.sats.pop_back();
      t.load = prev_load;
    }
  }

  // Leg loads along an order: initial total, one drop per stop, exact 0.0
  // on the return leg.  Must match build_solution bit for bit so engine
  // totals equal evaluator totals.
  template <typename DemandOf>
  static std::vector<double> leg_loads(const std::vector<int>& order, DemandOf demand_of) {
    std::vector<double> loads;
    double load = 0.0;
    for (int m : order) load += demand_of(m);
    loads.push_back(load);
    for (int m : order) {
      load -= demand_of(m);
      loads.push_back(load);
    }
    loads.back() = 0.0;
    return loads;
  }

  // Adds one second-echelon route's legs exactly as the evaluator walks
  // them.  `order` holds customer indices.
  void add_e2_route(std::size_t vi, const std::vector<int>& order, double& e_acc,
                    double& d_acc) const {
    const Vehicle& v = *k2_[vi];
    const int base = sat_node_[van_[vi].sat_idx];
    const std::vector<double> loads =
        leg_loads(order, [this](int ci) { return customers_[ci]->demand_kg; });
    int prev = base;
    for (std::size_t i = 0; i <= order.size(); ++i) {
      const int next = i < order.size() ? customers_[order[i]]->node : base;
      const double d = inst_.distance_km(prev, next);
      d_acc += d;
      e_acc += leg_emissions(v, d, loads[i]);
      prev = next;
    }
  }

  // First-echelon analogue; `order` holds satellite indices.  Stop
  // emissions are added separately at the leaf (order-independent).
  void add_e1_route(std::size_t ti, const std::vector<int>& order, double& e_acc,
                    double& d_acc) const {
    const Vehicle& v = *k1_[ti];
    const std::vector<double> loads =
        leg_loads(order, [this](int si) { return sat_load_[si]; });
    int prev = 0;
    for (std::size_t i = 0; i <= order.size(); ++i) {
      const int next = i < order.size() ? sat_node_[order[i]] : 0;
      const double d = inst_.distance_km(prev, next);
      d_acc += d;
      e_acc += leg_emissions(v, d, loads[i]);
      prev = next;
    }
  }

  // Lexicographically first order minimizing the primary metric's route
  // contribution (emissions for the emissions metric, distance otherwise).
  std::vector<int> best_order(bool second_echelon, std::size_t vehicle,
                              std::vector<int> members) const {
    std::sort(members.begin(), members.end());
    std::vector<int> best = members;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<int> perm = members;
    do {
      double e = 0.0, d = 0.0;
      if (second_echelon) add_e2_route(vehicle, perm, e, d);
      else add_e1_route(vehicle, perm, e, d);
      const double score = primary_ == Metric::emissions ? e : d;
      if (score < best_score) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  Solution build_solution(const std::vector<std::vector<int>>& van_orders,
                          const std::vector<std::vector<int>>& truck_orders) const {
    Solution sol;
    for (std::size_t ti = 0; ti < truck_.size(); ++ti) {
      if (truck_orders[ti].empty()) continue;
      FirstEchelonRoute r;
      r.vehicle = k1_[ti]->id;
      for (int si : truck_orders[ti]) r.satellites.push_back(sat_node_[si]);
      r.leg_loads_kg = leg_loads(truck_orders[ti], [this](int si) { return sat_load_[si]; });
      sol.first_echelon_routes.push_back(std::move(r));
    }
    for (std::size_t vi = 0; vi < van_.size(); ++vi) {
      if (van_orders[vi].empty()) continue;
      SecondEchelonRoute r;
      r.vehicle = k2_[vi]->id;
      r.satellite = sat_node_[van_[vi].sat_idx];
      for (int ci : van_orders[vi]) r.customers.push_back(customers_[ci]->node);
      r.leg_loads_kg =
          leg_loads(van_orders[vi], [this](int ci) { return customers_[ci]->demand_kg; });
      sol.second_echelon_routes.push_back(std::move(r));
    }
    for (std::size_t ci = 0; ci < customers_.size(); ++ci) {
      const Option& o = options_[ci][chosen_[ci]];
      if (o.pickup) sol.pickup[customers_[ci]->node] = sat_node_[o.sat_idx];
    }
    for (std::size_t vi = 0; vi < van_.size(); ++vi) {
      for (int ci : van_orders[vi])
        sol.home[customers_[ci]->node] =
            HomeAssignment{sat_node_[van_[vi].sat_idx], k2_[vi]->id};
    }
    return sol;
  }

  void consider(const std::vector<std::vector<int>>& van_orders,
                const std::vector<std::vector<int>>& truck_orders) {
    Solution sol = build_solution(van_orders, truck_orders);
    Metrics m = detail::compute_metrics(inst_, sol);
    if (sink_) {
      (*sink_)(sol, m);
      return;
    }
    for (const auto& cap : caps_) {
      if (metric_value(m, cap.metric) > cap.bound + kCapTol) return;
    }
    const double value = metric_value(m, primary_);
    if (!best_ || value < best_->primary_value) {
      best_ = Incumbent{std::move(sol), m, value};
    }
  }

  // Engine-side totals for the fast (uncapped) leaf; grouping matches the
  // evaluator so candidate values are bitwise comparable to metrics.
  double fast_leaf_value(const std::vector<std::vector<int>>& van_orders,
                         const std::vector<std::vector<int>>& truck_orders) const {
    MetricSums sums;
    for (std::size_t ti = 0; ti < truck_.size(); ++ti) {
      if (truck_orders[ti].empty()) continue;
      add_e1_route(ti, truck_orders[ti], sums.e_k1, sums.d_k1);
      sums.e_stops +=
          stop_emissions(static_cast<int>(truck_orders[ti].size()), inst_.stop_intervals);
    }
    for (std::size_t vi = 0; vi < van_.size(); ++vi) {
      if (van_orders[vi].empty()) continue;
      add_e2_route(vi, van_orders[vi], sums.e_k2, sums.d_k2);
    }
    sums.e_c = cust_e_c_;
    sums.d_c0 = cust_d_c0_;
    sums.d_c = cust_d_c_;
    return sums.get(primary_);
  }

  void leaf() {
    if (!enumerate_orders_) {
      std::vector<std::vector<int>> van_orders(van_.size());
      std::vector<std::vector<int>> truck_orders(truck_.size());
      for (std::size_t vi = 0; vi < van_.size(); ++vi)
        if (!van_[vi].customers.empty()) van_orders[vi] = best_order(true, vi, van_[vi].customers);
      for (std::size_t ti = 0; ti < truck_.size(); ++ti)
        if (!truck_[ti].sats.empty()) truck_orders[ti] = best_order(false, ti, truck_[ti].sats);
      if (best_ && fast_leaf_value(van_orders, truck_orders) > best_->primary_value) return;
      consider(van_orders, truck_orders);
      return;
    }
    // Odometer over all order combinations of every non-empty route.
    order_slots_.clear();
    for (std::size_t vi = 0; vi < van_.size(); ++vi)
      if (!van_[vi].customers.empty()) order_slots_.push_back({true, vi});
    for (std::size_t ti = 0; ti < truck_.size(); ++ti)
      if (!truck_[ti].sats.empty()) order_slots_.push_back({false, ti});
    van_orders_work_.assign(van_.size(), {});
    truck_orders_work_.assign(truck_.size(), {});
    order_combos(0);
  }

  void order_combos(std::size_t slot) {
    if (slot == order_slots_.size()) {
      consider(van_orders_work_, truck_orders_work_);
      return;
    }
    const auto [is_van, idx] = order_slots_[slot];
    std::vector<int> perm = is_van ? van_[idx].customers : truck_[idx].sats;
    std::sort(perm.begin(), perm.end());
    do {
      if (is_van) van_orders_work_[idx] = perm;
      else truck_orders_work_[idx] = perm;
      order_combos(slot + 1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (is_van) van_orders_work_[idx].clear();
    else truck_orders_work_[idx].clear();
  }

  const Instance& inst_;
  std::vector<const Customer*> customers_;
  std::vector<std::vector<Option>> options_;
  std::vector<int> sat_node_;
  std::vector<double> sat_cap_;
  std::vector<const Vehicle*> k1_, k2_;

  Metric primary_ = Metric::emissions;
  std::vector<MetricCap> caps_;
  bool enumerate_orders_ = false;
  const std::function<void(const Solution&, const Metrics&)>* sink_ = nullptr;
  std::optional<Incumbent> best_;

  std::vector<int> chosen_;
  std::vector<double> sat_load_;
  double cust_e_c_ = 0.0, cust_d_c0_ = 0.0, cust_d_c_ = 0.0;
  std::vector<int> home_list_;
  std::vector<VanState> van_;
  std::vector<TruckState> truck_;
  std::vector<int> demand_sats_;
  std::vector<std::pair<bool, std::size_t>> order_slots_;
  std::vector<std::vector<int>> van_orders_work_, truck_orders_work_;
};

}  // namespace detail

// Exact optimum of the scenario objective (or the override).  The scenario's
// fleet variant is applied internally; metrics refer to that effective
// instance.  Throws InfeasibleError when the search space is empty and
// BudgetExceededError when the instance is larger than the budget allows.
inline SolveResult solve_exact(const Instance& instance, const Scenario& scenario,
                               const SolveOptions& options = {}) {
  const Instance effective = scenario_instance(instance, scenario, options.green_low_factor);
  throw_if_invalid(effective);
  const Metric objective = options.objective_override.value_or(scenario.objective);
  detail::Enumerator engine(effective, !scenario.full_home_delivery, options.budget);
  auto result = engine.optimize(objective, options.caps);
  if (!result) {
    std::string msg = "proven infeasible: no assignment satisfies capacities";
    if (!options.caps.empty()) msg += " and metric caps";
    throw InfeasibleError(msg);
  }
  // Defense in depth: the reported metrics go through the checked evaluator.
  result->metrics = evaluate(effective, result->solution);
  result->objective = metric_value(result->metrics, objective);
  return *result;
}

// Visits every taut feasible solution of `instance` as given (no scenario
// transform).  Intended for tests and brute-force cross-checks.
inline void for_each_feasible_solution(
    const Instance& instance, bool allow_pickup, const Budget& budget,
    const std::function<void(const Solution&, const Metrics&)>& sink) {
  throw_if_invalid(instance);
  detail::Enumerator engine(instance, allow_pickup, budget);
  engine.enumerate(sink);
}

// The feasible set's image under (emissions, total distance), deduplicated
// with absolute tolerance 1e-9 per coordinate.
inline std::vector<std::pair<double, double>> enumerate_feasible_points(
    const Instance& instance, const Budget& budget = {}) {
  std::vector<std::pair<double, double>> points;
  for_each_feasible_solution(instance, /*allow_pickup=*/true, budget,
                             [&points](const Solution&, const Metrics& m) {
                               points.emplace_back(m.total_emissions, m.total_distance);
                             });
  std::sort(points.begin(), points.end());
  auto near = [](const std::pair<double, double>& a, const std::pair<double, double>& b) {
    return std::abs(a.first - b.first) <= 1e-9 && std::abs(a.second - b.second) <= 1e-9;
  };
  points.erase(std::unique(points.begin(), points.end(), near), points.end());
  return points;
}

}  // namespace verde2e
