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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "verde2e/core.hpp"

// Instance files are JSON documents with a versioned `schema` field.  The
// layout mirrors the in-memory types field for field; distances are either an
// explicit row-major matrix or derived from node coordinates, selected by
// `distance_mode` ("matrix" or "euclidean").  Serialization is deterministic:
// keys are emitted alphabetically and numbers in shortest round-trip form, so
// dump(parse(dump(x))) == dump(x) byte for byte.

namespace verde2e {

inline constexpr const char* kInstanceSchema = "2elrp-1";

namespace detail {

inline const nlohmann::json& json_field(const nlohmann::json& j, const char* key,
                                        const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

template <typename T>
T json_as(const nlohmann::json& j, const char* key, const std::string& where) {
  try {
    return json_field(j, key, where).get<T>();
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": field '" + key + "': " + e.what());
  }
}

}  // namespace detail

inline std::string to_string(NodeKind k) {
  switch (k) {
    case NodeKind::warehouse: return "warehouse";
    case NodeKind::satellite: return "satellite";
    case NodeKind::customer: return "customer";
  }
  throw Error("invalid node kind");
}

inline NodeKind parse_node_kind(const std::string& s) {
  if (s == "warehouse") return NodeKind::warehouse;
  if (s == "satellite") return NodeKind::satellite;
  if (s == "customer") return NodeKind::customer;
  throw ParseError("unknown node kind: " + s);
}

inline std::string to_string(Echelon e) {
  return e == Echelon::first ? "first" : "second";
}

inline Echelon parse_echelon(const std::string& s) {
  if (s == "first") return Echelon::first;
  if (s == "second") return Echelon::second;
  throw ParseError("unknown echelon: " + s);
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["schema"] = kInstanceSchema;
  if (!inst.name.empty()) j["name"] = inst.name;
  j["distance_mode"] =
      inst.distance_mode == DistanceMode::euclidean ? "euclidean" : "matrix";

  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : inst.nodes) {
    nlohmann::json nj;
    nj["id"] = n.id;
    nj["kind"] = to_string(n.kind);
    if (n.position) nj["position"] = {n.position->x_km, n.position->y_km};
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);

  if (inst.distance_mode == DistanceMode::explicit_matrix) {
    const std::size_t n = inst.nodes.size();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t k = 0; k < n; ++k) row.push_back(inst.distances[i * n + k]);
      rows.push_back(std::move(row));
    }
    j["distances_km"] = std::move(rows);
  }

  nlohmann::json customers = nlohmann::json::array();
  for (const auto& c : inst.customers) {
    nlohmann::json cj;
    cj["node"] = c.node;
    cj["demand_kg"] = c.demand_kg;
    cj["d_max_km"] = c.d_max_km;
    cj["d_green_km"] = c.d_green_km;
    cj["size_class"] = to_string(c.size_class);
    customers.push_back(std::move(cj));
  }
  j["customers"] = std::move(customers);

  nlohmann::json satellites = nlohmann::json::array();
  for (const auto& s : inst.satellites) {
    nlohmann::json sj;
    sj["node"] = s.node;
    sj["capacity_kg"] = s.capacity_kg;
    satellites.push_back(std::move(sj));
  }
  j["satellites"] = std::move(satellites);

  nlohmann::json vehicles = nlohmann::json::array();
  for (const auto& v : inst.vehicles) {
    nlohmann::json vj;
    vj["id"] = v.id;
    vj["echelon"] = to_string(v.echelon);
    vj["capacity_kg"] = v.capacity_kg;
    vj["emission_factor_kg_per_km"] = v.emission_factor;
    vj["rho_empty_l_per_km"] = v.rho_empty_l_per_km;
    vj["rho_full_l_per_km"] = v.rho_full_l_per_km;
    vehicles.push_back(std::move(vj));
  }
  j["vehicles"] = std::move(vehicles);

  j["customer_emission_factor_kg_per_km"] = inst.customer_emission_factor;

  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : inst.stop_intervals.intervals()) {
    nlohmann::json ij;
    ij["max_stops"] = iv.max_stops ? nlohmann::json(*iv.max_stops) : nlohmann::json();
    ij["rate_kg_per_stop"] = iv.rate_kg_per_stop;
    intervals.push_back(std::move(ij));
  }
  j["stop_intervals"] = std::move(intervals);
  return j;
}

// Builds and validates an instance from its JSON form.  Structural problems
// (wrong types, missing fields, unknown enum tokens) raise ParseError;
// semantic problems (bad radii, dangling references) raise Error via the
// instance validator.
inline Instance instance_from_json(const nlohmann::json& j) {
  using detail::json_as;
  using detail::json_field;
  if (!j.is_object()) throw ParseError("instance: document is not a JSON object");
  const std::string schema = json_as<std::string>(j, "schema", "instance");
  if (schema != kInstanceSchema)
    throw ParseError("instance: unsupported schema '" + schema + "' (expected '" +
                     kInstanceSchema + "')");

  Instance inst;
  if (j.contains("name")) inst.name = json_as<std::string>(j, "name", "instance");

  const std::string mode = json_as<std::string>(j, "distance_mode", "instance");
  if (mode == "euclidean") inst.distance_mode = DistanceMode::euclidean;
  else if (mode == "matrix") inst.distance_mode = DistanceMode::explicit_matrix;
  else throw ParseError("instance: unknown distance_mode: " + mode);

  for (const auto& nj : json_field(j, "nodes", "instance")) {
    Node n;
    n.id = json_as<int>(nj, "id", "node");
    n.kind = parse_node_kind(json_as<std::string>(nj, "kind", "node"));
    if (nj.contains("position")) {
      const auto pos = json_as<std::vector<double>>(nj, "position", "node");
      if (pos.size() != 2)
        throw ParseError("node " + std::to_string(n.id) + ": position must be [x, y]");
      n.position = Point{pos[0], pos[1]};
    }
    inst.nodes.push_back(n);
  }

  if (inst.distance_mode == DistanceMode::explicit_matrix) {
    const auto& rows = json_field(j, "distances_km", "instance");
    if (!rows.is_array())
      throw ParseError("instance: distances_km must be an array of rows");
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != inst.nodes.size())
        throw ParseError("instance: every distances_km row needs one entry per node");
      for (const auto& d : row) {
        if (!d.is_number()) throw ParseError("instance: non-numeric distance entry");
        inst.distances.push_back(d.get<double>());
      }
    }
  }

  for (const auto& cj : json_field(j, "customers", "instance")) {
    Customer c;
    c.node = json_as<int>(cj, "node", "customer");
    const std::string where = "customer " + std::to_string(c.node);
    c.demand_kg = json_as<double>(cj, "demand_kg", where);
    c.d_max_km = json_as<double>(cj, "d_max_km", where);
    c.d_green_km = json_as<double>(cj, "d_green_km", where);
    c.size_class = parse_size_class(json_as<std::string>(cj, "size_class", where));
    inst.customers.push_back(c);
  }

  for (const auto& sj : json_field(j, "satellites", "instance")) {
    Satellite s;
    s.node = json_as<int>(sj, "node", "satellite");
    s.capacity_kg =
        json_as<double>(sj, "capacity_kg", "satellite " + std::to_string(s.node));
    inst.satellites.push_back(s);
  }

  for (const auto& vj : json_field(j, "vehicles", "instance")) {
    Vehicle v;
    v.id = json_as<int>(vj, "id", "vehicle");
    const std::string where = "vehicle " + std::to_string(v.id);
    v.echelon = parse_echelon(json_as<std::string>(vj, "echelon", where));
    v.capacity_kg = json_as<double>(vj, "capacity_kg", where);
    v.emission_factor = json_as<double>(vj, "emission_factor_kg_per_km", where);
    v.rho_empty_l_per_km = json_as<double>(vj, "rho_empty_l_per_km", where);
    v.rho_full_l_per_km = json_as<double>(vj, "rho_full_l_per_km", where);
    inst.vehicles.push_back(v);
  }

  if (j.contains("customer_emission_factor_kg_per_km"))
    inst.customer_emission_factor =
        json_as<double>(j, "customer_emission_factor_kg_per_km", "instance");

  if (j.contains("stop_intervals")) {
    std::vector<EmissionIntervals::Interval> intervals;
    for (const auto& ij : json_field(j, "stop_intervals", "instance")) {
      EmissionIntervals::Interval iv;
      const auto& cap = detail::json_field(ij, "max_stops", "stop interval");
      if (!cap.is_null()) iv.max_stops = cap.get<int>();
      iv.rate_kg_per_stop = json_as<double>(ij, "rate_kg_per_stop", "stop interval");
      intervals.push_back(iv);
    }
    inst.stop_intervals = EmissionIntervals(std::move(intervals));
  }

  throw_if_invalid(inst);
  return inst;
}

inline std::string dump_instance(const Instance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance: invalid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_instance(text.str());
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file: " + path);
  out << dump_instance(inst);
  if (!out) throw Error("failed writing instance file: " + path);
}

}  // namespace verde2e
