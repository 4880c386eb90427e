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

// Mixed-integer linear model of the two-echelon routing problem with
// customer pickup: binary routing arcs, continuous per-arc loads, service
// mode and assignment binaries, satellite activation, and piecewise stop
// counters.  Column and row order is a pure function of instance and
// options, so two builds of the same inputs are identical object for
// object.

#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "verde2e/core.hpp"
#include "verde2e/solution.hpp"

namespace verde2e {

enum class ColumnKind { binary, continuous };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
};

enum class RowSense { le, eq, ge };

struct Row {
  std::string name;
  // (column id, coefficient); ids are unique within a row.
  std::vector<std::pair<int, double>> coefficients;
  RowSense sense = RowSense::eq;
  double rhs = 0.0;
};

// Structured key of one column.  Node-valued fields hold node ids,
// vehicle holds a vehicle id, interval a stop-interval index.
struct VariableKey {
  enum class Family { x, z, y, w, q, s, l, f } family = Family::x;
  int a = 0;  // x/z: from node; y/w: customer; q: satellite; s: customer; l: satellite; f: vehicle
  int b = 0;  // x/z: to node; y/w: satellite; q/s: vehicle; f: interval
  int vehicle = -1;  // x/z only

  friend bool operator<(const VariableKey& p, const VariableKey& q2) {
    return std::tie(p.family, p.a, p.b, p.vehicle) <
           std::tie(q2.family, q2.a, q2.b, q2.vehicle);
  }
  friend bool operator==(const VariableKey& p, const VariableKey& q2) {
    return std::tie(p.family, p.a, p.b, p.vehicle) ==
           std::tie(q2.family, q2.a, q2.b, q2.vehicle);
  }
};

// Bijection between structured keys and dense column ids.
class VariableIndex {
 public:
  int add(const VariableKey& key) {
    const int id = static_cast<int>(keys_.size());
    auto [it, fresh] = ids_.emplace(key, id);
    if (!fresh) throw Error("variable key registered twice");
    keys_.push_back(key);
    return id;
  }

  int id(const VariableKey& key) const {
    auto it = ids_.find(key);
    if (it == ids_.end()) throw Error("unknown variable key");
    return it->second;
  }

  const int* find(const VariableKey& key) const {
    auto it = ids_.find(key);
    return it == ids_.end() ? nullptr : &it->second;
  }

  const VariableKey& key(int id) const { return keys_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return keys_.size(); }

  // Inverse of column_name.  Returns false for names outside the scheme.
  static bool try_parse_name(const std::string& name, VariableKey& out);

 private:
  std::map<VariableKey, int> ids_;
  std::vector<VariableKey> keys_;
};

struct MilpModel {
  std::string name;
  std::vector<Column> columns;
  std::vector<Row> rows;
  VariableIndex index;
  // Diagnostics that do not prevent building (e.g. provable infeasibility
  // visible from aggregate capacities).
  std::vector<std::string> warnings;
};

struct ModelOptions {
  bool valid_inequalities = false;
  bool symmetry_breaking = false;
  double green_low_factor = kDefaultGreenLowCapacityFactor;
};

inline std::string column_name(const VariableKey& k) {
  char buf[64];
  switch (k.family) {
    case VariableKey::Family::x:
      std::snprintf(buf, sizeof buf, "x_%d_%d_k%d", k.a, k.b, k.vehicle);
      break;
    case VariableKey::Family::z:
      std::snprintf(buf, sizeof buf, "z_%d_%d_k%d", k.a, k.b, k.vehicle);
      break;
    case VariableKey::Family::y:
      std::snprintf(buf, sizeof buf, "y_c%d_h%d", k.a, k.b);
      break;
    case VariableKey::Family::w:
      std::snprintf(buf, sizeof buf, "w_c%d_h%d", k.a, k.b);
      break;
    case VariableKey::Family::q:
      std::snprintf(buf, sizeof buf, "q_h%d_k%d", k.a, k.b);
      break;
    case VariableKey::Family::s:
      std::snprintf(buf, sizeof buf, "s_c%d_k%d", k.a, k.b);
      break;
    case VariableKey::Family::l:
      std::snprintf(buf, sizeof buf, "l_h%d", k.a);
      break;
    case VariableKey::Family::f:
      std::snprintf(buf, sizeof buf, "f_k%d_w%d", k.a, k.b);
      break;
  }
  return buf;
}

inline bool VariableIndex::try_parse_name(const std::string& name, VariableKey& out) {
  using F = VariableKey::Family;
  int a, b, v;
  if (std::sscanf(name.c_str(), "x_%d_%d_k%d", &a, &b, &v) == 3 &&
      name == column_name({F::x, a, b, v})) {
    out = {F::x, a, b, v};
    return true;
  }
  if (std::sscanf(name.c_str(), "z_%d_%d_k%d", &a, &b, &v) == 3 &&
      name == column_name({F::z, a, b, v})) {
    out = {F::z, a, b, v};
    return true;
  }
  if (std::sscanf(name.c_str(), "y_c%d_h%d", &a, &b) == 2 &&
      name == column_name({F::y, a, b, -1})) {
    out = {F::y, a, b, -1};
    return true;
  }
  if (std::sscanf(name.c_str(), "w_c%d_h%d", &a, &b) == 2 &&
      name == column_name({F::w, a, b, -1})) {
    out = {F::w, a, b, -1};
    return true;
  }
  if (std::sscanf(name.c_str(), "q_h%d_k%d", &a, &b) == 2 &&
      name == column_name({F::q, a, b, -1})) {
    out = {F::q, a, b, -1};
    return true;
  }
  if (std::sscanf(name.c_str(), "s_c%d_k%d", &a, &b) == 2 &&
      name == column_name({F::s, a, b, -1})) {
    out = {F::s, a, b, -1};
    return true;
  }
  if (std::sscanf(name.c_str(), "l_h%d", &a) == 1 && name == column_name({F::l, a, 0, -1})) {
    out = {F::l, a, 0, -1};
    return true;
  }
  if (std::sscanf(name.c_str(), "f_k%d_w%d", &a, &b) == 2 &&
      name == column_name({F::f, a, b, -1})) {
    out = {F::f, a, b, -1};
    return true;
  }
  return false;
}

namespace detail {

// Deterministic arc lists.  First echelon: every ordered pair over
// {warehouse} union satellites.  Second echelon: every ordered pair over
// satellites union customers.  Order: from-node ascending, to-node
// ascending.
inline std::vector<std::pair<int, int>> first_echelon_arcs(const Instance& inst) {
  std::vector<int> nodes{0};
  for (const auto& s : inst.satellites) nodes.push_back(s.node);
  std::vector<std::pair<int, int>> arcs;
  for (int i : nodes)
    for (int j : nodes)
      if (i != j) arcs.emplace_back(i, j);
  return arcs;
}

inline std::vector<std::pair<int, int>> second_echelon_arcs(const Instance& inst) {
  std::vector<int> nodes;
  for (const auto& s : inst.satellites) nodes.push_back(s.node);
  for (const auto& c : inst.customers) nodes.push_back(c.node);
  std::vector<std::pair<int, int>> arcs;
  for (int i : nodes)
    for (int j : nodes)
      if (i != j) arcs.emplace_back(i, j);
  return arcs;
}

class ModelBuilder {
 public:
  ModelBuilder(const Instance& effective, const Scenario& scenario, const ModelOptions& options)
      : inst_(effective), scen_(scenario), opt_(options) {}

  MilpModel build() {
    model_.name = inst_.name.empty() ? "model" : inst_.name;
    for (const auto& v : inst_.vehicles) {
      if (v.echelon == Echelon::first) k1_.push_back(&v);
      else k2_.push_back(&v);
    }
    e1_arcs_ = first_echelon_arcs(inst_);
    e2_arcs_ = second_echelon_arcs(inst_);
    add_columns();
    add_rows();
    if (opt_.valid_inequalities) add_valid_inequalities();
    if (opt_.symmetry_breaking) add_symmetry_rows();
    double demand = 0.0, sat_cap = 0.0;
    for (const auto& c : inst_.customers) demand += c.demand_kg;
    for (const auto& s : inst_.satellites) sat_cap += s.capacity_kg;
    if (demand > sat_cap)
      model_.warnings.push_back(
          "total demand " + format_number(demand) + " kg exceeds total satellite capacity " +
          format_number(sat_cap) + " kg; the model cannot be feasible");
    return std::move(model_);
  }

 private:
  using F = VariableKey::Family;

  const std::vector<std::pair<int, int>>& arcs_of(const Vehicle& v) const {
    return v.echelon == Echelon::first ? e1_arcs_ : e2_arcs_;
  }

  int add_column(const VariableKey& key, ColumnKind kind, double lower, double upper,
                 double objective) {
    const int id = model_.index.add(key);
    model_.columns.push_back({column_name(key), kind, lower, upper, objective});
    return id;
  }

  void add_columns() {
    const bool em = scen_.objective == Metric::emissions;
    for (const auto* vp : k1_)
      for (const auto& [i, j] : e1_arcs_)
        add_column({F::x, i, j, vp->id}, ColumnKind::binary, 0.0, 1.0,
                   em ? vp->emission_factor * inst_.distance_km(i, j) * vp->rho_empty_l_per_km
                      : inst_.distance_km(i, j));
    for (const auto* vp : k2_)
      for (const auto& [i, j] : e2_arcs_)
        add_column({F::x, i, j, vp->id}, ColumnKind::binary, 0.0, 1.0,
                   em ? vp->emission_factor * inst_.distance_km(i, j) * vp->rho_empty_l_per_km
                      : inst_.distance_km(i, j));
    for (const auto* vp : k1_)
      for (const auto& [i, j] : e1_arcs_)
        add_column({F::z, i, j, vp->id}, ColumnKind::continuous, 0.0, kInfinity,
                   em ? vp->emission_factor * inst_.distance_km(i, j) *
                            (vp->rho_full_l_per_km - vp->rho_empty_l_per_km) / vp->capacity_kg
                      : 0.0);
    for (const auto* vp : k2_)
      for (const auto& [i, j] : e2_arcs_)
        add_column({F::z, i, j, vp->id}, ColumnKind::continuous, 0.0, kInfinity,
                   em ? vp->emission_factor * inst_.distance_km(i, j) *
                            (vp->rho_full_l_per_km - vp->rho_empty_l_per_km) / vp->capacity_kg
                      : 0.0);
    for (const auto& c : inst_.customers)
      for (const auto& s : inst_.satellites)
        add_column({F::y, c.node, s.node, -1}, ColumnKind::binary, 0.0, 1.0, 0.0);
    for (const auto& c : inst_.customers)
      for (const auto& s : inst_.satellites) {
        const bool eligible = inst_.distance_km(c.node, s.node) <= c.d_max_km + kDistanceTol;
        double cost = 0.0;
        if (em && eligible) cost = customer_trip_emissions(inst_, c, s.node);
        else if (scen_.objective == Metric::total_distance)
          cost = inst_.distance_km(c.node, s.node);
        // Full home delivery: pickups fixed off through the bound.
        add_column({F::w, c.node, s.node, -1}, ColumnKind::binary, 0.0,
                   scen_.full_home_delivery ? 0.0 : 1.0, cost);
      }
    for (const auto* vp : k2_)
      for (const auto& s : inst_.satellites)
        add_column({F::q, s.node, vp->id, -1}, ColumnKind::binary, 0.0, 1.0, 0.0);
    for (const auto* vp : k2_)
      for (const auto& c : inst_.customers)
        add_column({F::s, c.node, vp->id, -1}, ColumnKind::binary, 0.0, 1.0, 0.0);
    for (const auto& s : inst_.satellites)
      add_column({F::l, s.node, 0, -1}, ColumnKind::binary, 0.0, 1.0, 0.0);
    for (const auto* vp : k1_)
      for (std::size_t w = 0; w < inst_.stop_intervals.intervals().size(); ++w) {
        const auto& interval = inst_.stop_intervals.intervals()[w];
        const double cap =
            interval.max_stops ? static_cast<double>(*interval.max_stops) : kInfinity;
        add_column({F::f, vp->id, static_cast<int>(w), -1}, ColumnKind::continuous, 0.0, cap,
                   em ? interval.rate_kg_per_stop : 0.0);
      }
  }

  Row& new_row(std::string name, RowSense sense, double rhs) {
    model_.rows.push_back({std::move(name), {}, sense, rhs});
    return model_.rows.back();
  }

  // Accumulates into an existing entry when a column appears twice in one
  // sum (e.g. an arc both entering a customer and leaving a satellite).
  void acc(Row& row, const VariableKey& key, double coeff) {
    const int id = model_.index.id(key);
    for (auto& [existing, c] : row.coefficients) {
      if (existing == id) {
        c += coeff;
        return;
      }
    }
    row.coefficients.emplace_back(id, coeff);
  }

  void add_rows() {
    char buf[96];
    // Each first-echelon vehicle leaves the warehouse at most once and
    // returns as often as it leaves.
    for (const auto* vp : k1_) {
      std::snprintf(buf, sizeof buf, "wflow_k%d", vp->id);
      Row& r = new_row(buf, RowSense::eq, 0.0);
      for (const auto& s : inst_.satellites) {
        acc(r, {F::x, 0, s.node, vp->id}, 1.0);
        acc(r, {F::x, s.node, 0, vp->id}, -1.0);
      }
      std::snprintf(buf, sizeof buf, "wret_k%d", vp->id);
      Row& r2 = new_row(buf, RowSense::le, 1.0);
      for (const auto& s : inst_.satellites) acc(r2, {F::x, s.node, 0, vp->id}, 1.0);
    }
    // Flow conservation at satellites, every vehicle of both echelons.
    for (const auto& s : inst_.satellites)
      for (const auto& v : inst_.vehicles) {
        std::snprintf(buf, sizeof buf, "sflow_h%d_k%d", s.node, v.id);
        Row& r = new_row(buf, RowSense::eq, 0.0);
        for (const auto& [i, j] : arcs_of(v)) {
          if (i == s.node) acc(r, {F::x, i, j, v.id}, 1.0);
          if (j == s.node) acc(r, {F::x, i, j, v.id}, -1.0);
        }
      }
    // Activation: a satellite counts as active only when some truck
    // departs from it.
    for (const auto& s : inst_.satellites) {
      std::snprintf(buf, sizeof buf, "act_h%d", s.node);
      Row& r = new_row(buf, RowSense::ge, 0.0);
      for (const auto* vp : k1_)
        for (const auto& [i, j] : e1_arcs_)
          if (i == s.node) acc(r, {F::x, i, j, vp->id}, 1.0);
      acc(r, {F::l, s.node, 0, -1}, -1.0);
    }
    // Satellite capacity over assigned demand, both service modes.
    for (const auto& s : inst_.satellites) {
      std::snprintf(buf, sizeof buf, "scap_h%d", s.node);
      Row& r = new_row(buf, RowSense::le, s.capacity_kg);
      for (const auto& c : inst_.customers) {
        acc(r, {F::w, c.node, s.node, -1}, c.demand_kg);
        acc(r, {F::y, c.node, s.node, -1}, c.demand_kg);
      }
    }
    // First-echelon load conservation: drop at each satellite equals its
    // assigned demand; warehouse net outflow equals total demand.
    for (const auto& s : inst_.satellites) {
      std::snprintf(buf, sizeof buf, "sload_h%d", s.node);
      Row& r = new_row(buf, RowSense::eq, 0.0);
      for (const auto* vp : k1_)
        for (const auto& [i, j] : e1_arcs_) {
          if (j == s.node) acc(r, {F::z, i, j, vp->id}, 1.0);
          if (i == s.node) acc(r, {F::z, i, j, vp->id}, -1.0);
        }
      for (const auto& c : inst_.customers) {
        acc(r, {F::w, c.node, s.node, -1}, -c.demand_kg);
        acc(r, {F::y, c.node, s.node, -1}, -c.demand_kg);
      }
    }
    {
      Row& r = new_row("wload", RowSense::eq, 0.0);
      for (const auto* vp : k1_)
        for (const auto& [i, j] : e1_arcs_) {
          if (j == 0) acc(r, {F::z, i, j, vp->id}, 1.0);
          if (i == 0) acc(r, {F::z, i, j, vp->id}, -1.0);
        }
      for (const auto& c : inst_.customers)
        for (const auto& s : inst_.satellites) {
          acc(r, {F::w, c.node, s.node, -1}, c.demand_kg);
          acc(r, {F::y, c.node, s.node, -1}, c.demand_kg);
        }
    }
    // Stop counters tally departures from satellites per truck.
    for (const auto* vp : k1_) {
      std::snprintf(buf, sizeof buf, "stops_k%d", vp->id);
      Row& r = new_row(buf, RowSense::eq, 0.0);
      for (std::size_t w = 0; w < inst_.stop_intervals.intervals().size(); ++w)
        acc(r, {F::f, vp->id, static_cast<int>(w), -1}, 1.0);
      for (const auto& s : inst_.satellites)
        for (const auto& [i, j] : e1_arcs_)
          if (i == s.node) acc(r, {F::x, i, j, vp->id}, -1.0);
    }
    // Trucks come home empty.
    for (const auto& s : inst_.satellites)
      for (const auto* vp : k1_) {
        std::snprintf(buf, sizeof buf, "zret_h%d_k%d", s.node, vp->id);
        Row& r = new_row(buf, RowSense::eq, 0.0);
        acc(r, {F::z, s.node, 0, vp->id}, 1.0);
      }
    // Customer flow conservation, and service coupling: a van visit and a
    // pickup are mutually exclusive, one of them mandatory.
    for (const auto& c : inst_.customers) {
      std::snprintf(buf, sizeof buf, "cflow_c%d", c.node);
      Row& r = new_row(buf, RowSense::eq, 0.0);
      for (const auto* vp : k2_)
        for (const auto& [i, j] : e2_arcs_) {
          if (i == c.node) acc(r, {F::x, i, j, vp->id}, 1.0);
          if (j == c.node) acc(r, {F::x, i, j, vp->id}, -1.0);
        }
    }
    for (const auto& c : inst_.customers) {
      std::snprintf(buf, sizeof buf, "serve_c%d", c.node);
      Row& r = new_row(buf, RowSense::eq, 1.0);
      for (const auto* vp : k2_)
        for (const auto& [i, j] : e2_arcs_)
          if (j == c.node) acc(r, {F::x, i, j, vp->id}, 1.0);
      for (const auto& s : eligible_satellites(inst_, c)) acc(r, {F::w, c.node, s, -1}, 1.0);
    }
    // Service only through active satellites (pickup-eligible pairs).
    for (const auto& c : inst_.customers)
      for (const auto& h : eligible_satellites(inst_, c)) {
        std::snprintf(buf, sizeof buf, "gate_c%d_h%d", c.node, h);
        Row& r = new_row(buf, RowSense::le, 0.0);
        acc(r, {F::w, c.node, h, -1}, 1.0);
        acc(r, {F::y, c.node, h, -1}, 1.0);
        acc(r, {F::l, h, 0, -1}, -1.0);
      }
    // Exactly one satellite serves each customer, via either mode.
    for (const auto& c : inst_.customers) {
      std::snprintf(buf, sizeof buf, "assign_c%d", c.node);
      Row& r = new_row(buf, RowSense::eq, 1.0);
      for (const auto& s : inst_.satellites) {
        acc(r, {F::w, c.node, s.node, -1}, 1.0);
        acc(r, {F::y, c.node, s.node, -1}, 1.0);
      }
    }
    // Vehicle/satellite/home-assignment consistency triples.
    for (const auto& c : inst_.customers)
      for (const auto& h : eligible_satellites(inst_, c))
        for (const auto* vp : k2_) {
          std::snprintf(buf, sizeof buf, "link1_c%d_h%d_k%d", c.node, h, vp->id);
          Row& r1 = new_row(buf, RowSense::le, 1.0);
          acc(r1, {F::s, c.node, vp->id, -1}, 1.0);
          acc(r1, {F::q, h, vp->id, -1}, 1.0);
          acc(r1, {F::y, c.node, h, -1}, -1.0);
          std::snprintf(buf, sizeof buf, "link2_c%d_h%d_k%d", c.node, h, vp->id);
          Row& r2 = new_row(buf, RowSense::le, 1.0);
          acc(r2, {F::s, c.node, vp->id, -1}, 1.0);
          acc(r2, {F::q, h, vp->id, -1}, -1.0);
          acc(r2, {F::y, c.node, h, -1}, 1.0);
        }
    // A van serves a customer exactly when the customer is home-assigned
    // somewhere.  (Home assignments are not limited to pickup-eligible
    // satellites, so the right side ranges over all of them.)
    for (const auto& c : inst_.customers) {
      std::snprintf(buf, sizeof buf, "onevan_c%d", c.node);
      Row& r = new_row(buf, RowSense::eq, 0.0);
      for (const auto* vp : k2_) acc(r, {F::s, c.node, vp->id, -1}, 1.0);
      for (const auto& s : inst_.satellites) acc(r, {F::y, c.node, s.node, -1}, -1.0);
    }
    // A van may enter a satellite only when assigned to it; one satellite
    // per van; assignment implies activation.
    for (const auto& s : inst_.satellites)
      for (const auto* vp : k2_) {
        std::snprintf(buf, sizeof buf, "visit_h%d_k%d", s.node, vp->id);
        Row& r = new_row(buf, RowSense::le, 0.0);
        for (const auto& [i, j] : e2_arcs_)
          if (j == s.node) acc(r, {F::x, i, j, vp->id}, 1.0);
        acc(r, {F::q, s.node, vp->id, -1}, -1.0);
      }
    for (const auto& s : inst_.satellites)
      for (const auto* vp : k2_) {
        std::snprintf(buf, sizeof buf, "qgate_h%d_k%d", s.node, vp->id);
        Row& r = new_row(buf, RowSense::le, 0.0);
        acc(r, {F::q, s.node, vp->id, -1}, 1.0);
        acc(r, {F::l, s.node, 0, -1}, -1.0);
      }
    for (const auto* vp : k2_) {
      std::snprintf(buf, sizeof buf, "onesat_k%d", vp->id);
      Row& r = new_row(buf, RowSense::le, 1.0);
      for (const auto& s : inst_.satellites) acc(r, {F::q, s.node, vp->id, -1}, 1.0);
    }
    // Per-customer load drop matches demand for the serving van.
    for (const auto& c : inst_.customers)
      for (const auto* vp : k2_) {
        std::snprintf(buf, sizeof buf, "cload_c%d_k%d", c.node, vp->id);
        Row& r = new_row(buf, RowSense::eq, 0.0);
        for (const auto& [i, j] : e2_arcs_) {
          if (j == c.node) acc(r, {F::z, i, j, vp->id}, 1.0);
          if (i == c.node) acc(r, {F::z, i, j, vp->id}, -1.0);
        }
        acc(r, {F::s, c.node, vp->id, -1}, -c.demand_kg);
      }
    // Routing/assignment synchronization: a van entering customer c while
    // departing satellite h must have c on its manifest.
    for (const auto& c : inst_.customers)
      for (const auto& h : eligible_satellites(inst_, c))
        for (const auto* vp : k2_) {
          std::snprintf(buf, sizeof buf, "sync_c%d_h%d_k%d", c.node, h, vp->id);
          Row& r = new_row(buf, RowSense::le, 1.0);
          for (const auto& [i, j] : e2_arcs_) {
            if (j == c.node) acc(r, {F::x, i, j, vp->id}, 1.0);
            if (i == h) acc(r, {F::x, i, j, vp->id}, 1.0);
          }
          acc(r, {F::s, c.node, vp->id, -1}, -1.0);
        }
    // Load leaving each satellite toward customers equals the home-served
    // demand assigned there.
    for (const auto& s : inst_.satellites) {
      std::snprintf(buf, sizeof buf, "sdem_h%d", s.node);
      Row& r = new_row(buf, RowSense::eq, 0.0);
      for (const auto* vp : k2_)
        for (const auto& c : inst_.customers) acc(r, {F::z, s.node, c.node, vp->id}, 1.0);
      for (const auto& c : inst_.customers) acc(r, {F::y, c.node, s.node, -1}, -c.demand_kg);
    }
    // No pickup beyond the customer's admissible radius.
    for (const auto& c : inst_.customers) {
      const auto eligible = eligible_satellites(inst_, c);
      for (const auto& s : inst_.satellites) {
        if (std::find(eligible.begin(), eligible.end(), s.node) != eligible.end()) continue;
        std::snprintf(buf, sizeof buf, "whub_c%d_h%d", c.node, s.node);
        Row& r = new_row(buf, RowSense::eq, 0.0);
        acc(r, {F::w, c.node, s.node, -1}, 1.0);
      }
    }
    // Vans arrive back at their satellite empty.
    for (const auto& c : inst_.customers)
      for (const auto& s : inst_.satellites)
        for (const auto* vp : k2_) {
          std::snprintf(buf, sizeof buf, "zret2_c%d_h%d_k%d", c.node, s.node, vp->id);
          Row& r = new_row(buf, RowSense::eq, 0.0);
          acc(r, {F::z, c.node, s.node, vp->id}, 1.0);
        }
    // Arc loads only on traversed arcs, bounded by vehicle capacity.
    for (const auto& v : inst_.vehicles)
      for (const auto& [i, j] : arcs_of(v)) {
        std::snprintf(buf, sizeof buf, "zcap_%d_%d_k%d", i, j, v.id);
        Row& r = new_row(buf, RowSense::le, 0.0);
        acc(r, {F::z, i, j, v.id}, 1.0);
        acc(r, {F::x, i, j, v.id}, -v.capacity_kg);
      }
  }

  void add_valid_inequalities() {
    char buf[64];
    {
      double demand = 0.0;
      Row& r = new_row("vi_actcap", RowSense::ge, 0.0);
      for (const auto& s : inst_.satellites) acc(r, {F::l, s.node, 0, -1}, s.capacity_kg);
      for (const auto& c : inst_.customers) demand += c.demand_kg;
      r.rhs = demand;
    }
    for (const auto& s : inst_.satellites) {
      std::snprintf(buf, sizeof buf, "vi_vancap_h%d", s.node);
      Row& r = new_row(buf, RowSense::ge, 0.0);
      for (const auto* vp : k2_) acc(r, {F::q, s.node, vp->id, -1}, vp->capacity_kg);
      for (const auto& c : inst_.customers) acc(r, {F::y, c.node, s.node, -1}, -c.demand_kg);
    }
    {
      double locked_demand = 0.0;
      for (const auto& c : inst_.customers)
        if (eligible_satellites(inst_, c).empty()) locked_demand += c.demand_kg;
      Row& r = new_row("vi_homecap", RowSense::ge, locked_demand);
      for (const auto* vp : k2_)
        for (const auto& s : inst_.satellites) acc(r, {F::q, s.node, vp->id, -1}, vp->capacity_kg);
    }
  }

  void add_symmetry_rows() {
    char buf[64];
    // Within each identical-vehicle class (capacity, emission factor and
    // both consumption rates equal), later vans may be used only if the
    // previous one is.
    for (std::size_t b = 1; b < k2_.size(); ++b) {
      const Vehicle* prev = nullptr;
      for (std::size_t a = 0; a < b; ++a) {
        if (k2_[a]->capacity_kg == k2_[b]->capacity_kg &&
            k2_[a]->emission_factor == k2_[b]->emission_factor &&
            k2_[a]->rho_empty_l_per_km == k2_[b]->rho_empty_l_per_km &&
            k2_[a]->rho_full_l_per_km == k2_[b]->rho_full_l_per_km)
          prev = k2_[a];
      }
      if (!prev) continue;
      std::snprintf(buf, sizeof buf, "sym_k%d", k2_[b]->id);
      Row& r = new_row(buf, RowSense::le, 0.0);
      for (const auto& s : inst_.satellites) {
        acc(r, {F::q, s.node, k2_[b]->id, -1}, 1.0);
        acc(r, {F::q, s.node, prev->id, -1}, -1.0);
      }
    }
  }

  const Instance& inst_;
  const Scenario& scen_;
  const ModelOptions& opt_;
  MilpModel model_;
  std::vector<const Vehicle*> k1_, k2_;
  std::vector<std::pair<int, int>> e1_arcs_, e2_arcs_;
};

}  // namespace detail

// Builds the full model for the scenario.  The scenario's fleet variant
// is applied internally; pass the raw instance.
inline MilpModel build_model(const Instance& instance, const Scenario& scenario,
                             const ModelOptions& options = {}) {
  const Instance effective = scenario_instance(instance, scenario, options.green_low_factor);
  throw_if_invalid(effective);
  return detail::ModelBuilder(effective, scenario, options).build();
}

// Linear form of a metric over the model's columns.  `effective` must be
// the same fleet variant the model was built from.
inline std::vector<double> metric_coefficients(const MilpModel& model, const Instance& effective,
                                               Metric metric) {
  std::vector<double> coeffs(model.columns.size(), 0.0);
  for (std::size_t id = 0; id < model.index.size(); ++id) {
    const VariableKey& key = model.index.key(static_cast<int>(id));
    using F = VariableKey::Family;
    switch (key.family) {
      case F::x: {
        const Vehicle* v = effective.find_vehicle(key.vehicle);
        if (!v) throw Error("metric_coefficients: unknown vehicle in model");
        const double d = effective.distance_km(key.a, key.b);
        coeffs[id] = metric == Metric::emissions ? v->emission_factor * d * v->rho_empty_l_per_km
                                                 : d;
        break;
      }
      case F::z: {
        if (metric != Metric::emissions) break;
        const Vehicle* v = effective.find_vehicle(key.vehicle);
        if (!v) throw Error("metric_coefficients: unknown vehicle in model");
        coeffs[id] = v->emission_factor * effective.distance_km(key.a, key.b) *
                     (v->rho_full_l_per_km - v->rho_empty_l_per_km) / v->capacity_kg;
        break;
      }
      case F::w: {
        const Customer* c = effective.find_customer(key.a);
        if (!c) throw Error("metric_coefficients: unknown customer in model");
        const double d = effective.distance_km(key.a, key.b);
        if (metric == Metric::emissions && d <= c->d_max_km + kDistanceTol)
          coeffs[id] = customer_trip_emissions(effective, *c, key.b);
        else if (metric == Metric::total_distance)
          coeffs[id] = d;
        break;
      }
      case F::f: {
        if (metric != Metric::emissions) break;
        const auto& intervals = effective.stop_intervals.intervals();
        if (key.b < 0 || key.b >= static_cast<int>(intervals.size()))
          throw Error("metric_coefficients: stop interval out of range");
        coeffs[id] = intervals[static_cast<std::size_t>(key.b)].rate_kg_per_stop;
        break;
      }
      default:
        break;
    }
  }
  return coeffs;
}

// Appends one epsilon-constraint row bounding `metric` by `bound`.  The
// objective is untouched; row names eps_0, eps_1, ... count existing
// epsilon rows.
inline MilpModel add_epsilon_constraint(const MilpModel& model, const Instance& effective,
                                        Metric metric, double bound) {
  if (bound < 0.0) throw Error("epsilon bound must be non-negative");
  MilpModel out = model;
  const std::vector<double> coeffs = metric_coefficients(model, effective, metric);
  int serial = 0;
  for (const auto& r : model.rows)
    if (r.name.rfind("eps_", 0) == 0) ++serial;
  Row row;
  row.name = "eps_" + std::to_string(serial);
  row.sense = RowSense::le;
  row.rhs = bound;
  for (std::size_t id = 0; id < coeffs.size(); ++id)
    if (coeffs[id] != 0.0) row.coefficients.emplace_back(static_cast<int>(id), coeffs[id]);
  out.rows.push_back(std::move(row));
  return out;
}

// Column values of a feasible solution: routes to arc binaries and leg
// loads, service modes to y/w, manifests to q/s, activation to l, stop
// counters filled greedily from the lowest interval.
inline std::vector<double> solution_to_column_values(const MilpModel& model,
                                                     const Instance& effective,
                                                     const Solution& solution) {
  std::vector<double> values(model.columns.size(), 0.0);
  using F = VariableKey::Family;
  auto set = [&](const VariableKey& key, double v) {
    const int* id = model.index.find(key);
    if (!id) throw Error("solution uses a variable absent from the model: " + column_name(key));
    values[static_cast<std::size_t>(*id)] = v;
  };
  for (const auto& r : solution.first_echelon_routes) {
    int prev = 0;
    for (std::size_t i = 0; i <= r.satellites.size(); ++i) {
      const int next = i < r.satellites.size() ? r.satellites[i] : 0;
      set({F::x, prev, next, r.vehicle}, 1.0);
      set({F::z, prev, next, r.vehicle}, r.leg_loads_kg[i]);
      prev = next;
    }
    int remaining = static_cast<int>(r.satellites.size());
    const auto& intervals = effective.stop_intervals.intervals();
    for (std::size_t w = 0; w < intervals.size() && remaining > 0; ++w) {
      const int take =
          intervals[w].max_stops ? std::min(remaining, *intervals[w].max_stops) : remaining;
      set({F::f, r.vehicle, static_cast<int>(w), -1}, static_cast<double>(take));
      remaining -= take;
    }
  }
  for (const auto& r : solution.second_echelon_routes) {
    int prev = r.satellite;
    for (std::size_t i = 0; i <= r.customers.size(); ++i) {
      const int next = i < r.customers.size() ? r.customers[i] : r.satellite;
      set({F::x, prev, next, r.vehicle}, 1.0);
      set({F::z, prev, next, r.vehicle}, r.leg_loads_kg[i]);
      prev = next;
    }
    set({F::q, r.satellite, r.vehicle, -1}, 1.0);
    for (int c : r.customers) set({F::s, c, r.vehicle, -1}, 1.0);
  }
  for (const auto& [c, h] : solution.pickup) set({F::w, c, h, -1}, 1.0);
  for (const auto& [c, a] : solution.home) set({F::y, c, a.satellite, -1}, 1.0);
  for (int h : active_satellite_nodes(solution)) set({F::l, h, 0, -1}, 1.0);
  return values;
}

// Largest violation of any row or bound by the given column values;
// zero for a perfectly satisfied model.
inline double max_row_violation(const MilpModel& model, const std::vector<double>& values) {
  if (values.size() != model.columns.size())
    throw Error("column value vector has the wrong length");
  double worst = 0.0;
  for (std::size_t id = 0; id < model.columns.size(); ++id) {
    worst = std::max(worst, model.columns[id].lower - values[id]);
    worst = std::max(worst, values[id] - model.columns[id].upper);
  }
  for (const auto& row : model.rows) {
    double lhs = 0.0;
    for (const auto& [id, coeff] : row.coefficients)
      lhs += coeff * values[static_cast<std::size_t>(id)];
    switch (row.sense) {
      case RowSense::le: worst = std::max(worst, lhs - row.rhs); break;
      case RowSense::ge: worst = std::max(worst, row.rhs - lhs); break;
      case RowSense::eq: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

// Objective value of the given column values under the model's objective.
inline double objective_value(const MilpModel& model, const std::vector<double>& values) {
  if (values.size() != model.columns.size())
    throw Error("column value vector has the wrong length");
  double total = 0.0;
  for (std::size_t id = 0; id < model.columns.size(); ++id)
    total += model.columns[id].objective * values[id];
  return total;
}

}  // namespace verde2e
