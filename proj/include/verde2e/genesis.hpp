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

// Seeded synthetic instance generator.  The study area is a rectangle split
// into one grid zone per satellite; satellites sit at jittered zone centers,
// customers are uniform over the whole rectangle, and the warehouse lies
// outside the rectangle below its bottom edge.  Customer demand is drawn
// from four package size classes; pickup radii come from a menu of
// (d_green, d_max) pairs, with extra-small and large parcels forced to home
// delivery.  Fleet sizes and satellite capacities are derived from the
// expected package weight.
//
// Determinism: a single mt19937_64 stream seeded from the config, with a
// fixed draw order (per satellite: x jitter, y jitter; per customer: x, y,
// size class, demand, radius pair -- the radius draw happens even when the
// class forces home delivery, so one customer always consumes exactly five
// draws).  Unit doubles are built as (rng() >> 11) * 2^-53, independent of
// platform distribution implementations.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "verde2e/core.hpp"
#include "verde2e/instance_io.hpp"

namespace verde2e {

struct VehicleProfile {
  double capacity_packages = 0.0;
  double emission_factor = 0.0;  // kg CO2 per litre
  double rho_empty_l_per_km = 0.0;
  double rho_full_l_per_km = 0.0;
};

struct GenConfig {
  std::string name;  // defaults to gen_c<N>_h<M>_s<seed>
  int n_customers = 0;
  int n_satellites = 0;
  double area_width_km = 2.0;
  double area_height_km = 2.0;
  // Distance of the warehouse from the rectangle's near edge.
  double warehouse_offset_km = 5.0;
  std::uint64_t seed = 1;
  std::vector<double> d_max_menu_m{0, 500, 1000, 1500, 2000};
  std::vector<double> d_green_menu_m{0, 500};
  // Probability of extra_small, small, medium, large.  Must sum to 1.
  std::vector<double> size_distribution{0.30, 0.40, 0.25, 0.05};
  double satellite_capacity_packages = 15.0;
  VehicleProfile truck{100.0, 0.38, 0.30, 0.80};
  VehicleProfile van{50.0, 0.30, 0.15, 0.35};
  VehicleProfile green{50.0, 0.0, 0.0, 0.0};
  // Documented low-capacity green variant; applied at scenario time via
  // green_low_factor(), never inside generate().
  double green_low_capacity_packages = 25.0;
};

// Weight span of each size class, kg.  Demand is uniform on
// (bounds[i], bounds[i+1]].
inline const std::vector<double>& size_class_bounds_kg() {
  static const std::vector<double> bounds{0.05, 0.35, 2.0, 5.0, 30.0};
  return bounds;
}

// Mean parcel weight under the configured class mix, used to convert
// package-denominated capacities to kg.
inline double expected_package_weight_kg(const GenConfig& cfg) {
  const auto& bounds = size_class_bounds_kg();
  double mean = 0.0;
  for (std::size_t i = 0; i < cfg.size_distribution.size(); ++i)
    mean += cfg.size_distribution[i] * 0.5 * (bounds[i] + bounds[i + 1]);
  return mean;
}

// Capacity scaling applied to zero-emission vehicles by low-capacity
// scenarios.
inline double green_low_factor(const GenConfig& cfg) {
  return cfg.green_low_capacity_packages / cfg.green.capacity_packages;
}

inline std::vector<std::string> validate_gen_config(const GenConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.n_customers < 1) problems.push_back("n_customers must be at least 1");
  if (cfg.n_satellites < 1) problems.push_back("n_satellites must be at least 1");
  if (!(cfg.area_width_km > 0) || !(cfg.area_height_km > 0))
    problems.push_back("area extent must be positive");
  if (cfg.warehouse_offset_km < 0) problems.push_back("warehouse offset must be non-negative");
  if (cfg.size_distribution.size() != 4)
    problems.push_back("size_distribution needs exactly 4 entries");
  double sum = 0.0;
  for (double p : cfg.size_distribution) {
    if (p < 0) problems.push_back("size_distribution entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) problems.push_back("size_distribution must sum to 1");
  if (cfg.d_max_menu_m.empty() || cfg.d_green_menu_m.empty())
    problems.push_back("distance menus must be non-empty");
  for (double d : cfg.d_max_menu_m)
    if (d < 0) problems.push_back("d_max menu entries must be non-negative");
  for (double d : cfg.d_green_menu_m)
    if (d < 0) problems.push_back("d_green menu entries must be non-negative");
  bool any_pair = false;
  for (double g : cfg.d_green_menu_m)
    for (double m : cfg.d_max_menu_m)
      if (g <= m) any_pair = true;
  if (!any_pair) problems.push_back("menus admit no (d_green <= d_max) pair");
  if (!(cfg.satellite_capacity_packages > 0))
    problems.push_back("satellite capacity must be positive");
  for (const auto* p : {&cfg.truck, &cfg.van, &cfg.green}) {
    if (!(p->capacity_packages > 0)) problems.push_back("vehicle capacity must be positive");
    if (p->emission_factor < 0) problems.push_back("vehicle emission factor must be non-negative");
    if (p->rho_empty_l_per_km < 0 || p->rho_full_l_per_km < p->rho_empty_l_per_km)
      problems.push_back("vehicle consumption rates must satisfy 0 <= rho_empty <= rho_full");
  }
  if (!(cfg.green_low_capacity_packages > 0) ||
      cfg.green_low_capacity_packages > cfg.green.capacity_packages)
    problems.push_back("low-capacity green size must lie in (0, green capacity]");
  return problems;
}

namespace detail {

class GenRng {
 public:
  explicit GenRng(std::uint64_t seed) : rng_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  int index(int n) {
    const int i = static_cast<int>(unit() * n);
    return i >= n ? n - 1 : i;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace detail

inline Instance generate(const GenConfig& cfg) {
  {
    const auto problems = validate_gen_config(cfg);
    if (!problems.empty()) {
      std::string msg = "invalid generator config:";
      for (const auto& p : problems) msg += "\n  " + p;
      throw Error(msg);
    }
  }
  const double weight = expected_package_weight_kg(cfg);
  detail::GenRng rng(cfg.seed);

  Instance inst;
  inst.name = !cfg.name.empty()
                  ? cfg.name
                  : "gen_c" + std::to_string(cfg.n_customers) + "_h" +
                        std::to_string(cfg.n_satellites) + "_s" + std::to_string(cfg.seed);
  inst.distance_mode = DistanceMode::euclidean;
  inst.nodes.push_back(
      {0, NodeKind::warehouse, Point{cfg.area_width_km / 2.0, -cfg.warehouse_offset_km}});

  // One grid zone per satellite; near-square tiling.
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.n_satellites))));
  const int rows = (cfg.n_satellites + cols - 1) / cols;
  const double cell_w = cfg.area_width_km / cols;
  const double cell_h = cfg.area_height_km / rows;
  for (int i = 0; i < cfg.n_satellites; ++i) {
    const double cx = (i % cols + 0.5) * cell_w;
    const double cy = (i / cols + 0.5) * cell_h;
    const double jx = (rng.unit() - 0.5) * cell_w / 2.0;  // within the zone's middle half
    const double jy = (rng.unit() - 0.5) * cell_h / 2.0;
    const int node = static_cast<int>(inst.nodes.size());
    inst.nodes.push_back({node, NodeKind::satellite, Point{cx + jx, cy + jy}});
    inst.satellites.push_back({node, cfg.satellite_capacity_packages * weight});
  }

  // Valid (d_green, d_max) pairs in menu order, meters -> km.
  std::vector<std::pair<double, double>> radius_pairs;
  for (double g : cfg.d_green_menu_m)
    for (double m : cfg.d_max_menu_m)
      if (g <= m) radius_pairs.emplace_back(g / 1000.0, m / 1000.0);

  const auto& bounds = size_class_bounds_kg();
  for (int i = 0; i < cfg.n_customers; ++i) {
    const double x = rng.unit() * cfg.area_width_km;
    const double y = rng.unit() * cfg.area_height_km;
    const double class_draw = rng.unit();
    double cum = 0.0;
    std::size_t cls = cfg.size_distribution.size() - 1;
    for (std::size_t s = 0; s < cfg.size_distribution.size(); ++s) {
      cum += cfg.size_distribution[s];
      if (class_draw < cum) {
        cls = s;
        break;
      }
    }
    // Uniform on (lo, hi]: positive demand even at the class floor.
    const double demand =
        bounds[cls] + (1.0 - rng.unit()) * (bounds[cls + 1] - bounds[cls]);
    const auto& pair = radius_pairs[static_cast<std::size_t>(rng.index(
        static_cast<int>(radius_pairs.size())))];

    Customer c;
    c.node = static_cast<int>(inst.nodes.size());
    c.demand_kg = demand;
    c.size_class = static_cast<SizeClass>(cls);
    const bool forced_home = c.size_class == SizeClass::extra_small ||
                             c.size_class == SizeClass::large;
    c.d_green_km = forced_home ? 0.0 : pair.first;
    c.d_max_km = forced_home ? 0.0 : pair.second;
    inst.nodes.push_back({c.node, NodeKind::customer, Point{x, y}});
    inst.customers.push_back(c);
  }

  const double total = inst.total_demand_kg();
  auto fleet_count = [&](const VehicleProfile& p) {
    return static_cast<int>(std::ceil(total / (p.capacity_packages * weight))) + 1;
  };
  auto add_fleet = [&](const VehicleProfile& p, int count) {
    for (int i = 0; i < count; ++i) {
      Vehicle v;
      v.id = static_cast<int>(inst.vehicles.size());
      v.echelon = (&p == &cfg.truck) ? Echelon::first : Echelon::second;
      v.capacity_kg = p.capacity_packages * weight;
      v.emission_factor = p.emission_factor;
      v.rho_empty_l_per_km = p.rho_empty_l_per_km;
      v.rho_full_l_per_km = p.rho_full_l_per_km;
      inst.vehicles.push_back(v);
    }
  };
  add_fleet(cfg.truck, fleet_count(cfg.truck));
  add_fleet(cfg.van, fleet_count(cfg.van));
  add_fleet(cfg.green, fleet_count(cfg.green));

  throw_if_invalid(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Config (de)serialization for --config files.  Every field is optional and
// falls back to the defaults above.

inline nlohmann::json gen_config_to_json(const GenConfig& cfg) {
  nlohmann::json j;
  if (!cfg.name.empty()) j["name"] = cfg.name;
  j["n_customers"] = cfg.n_customers;
  j["n_satellites"] = cfg.n_satellites;
  j["area_width_km"] = cfg.area_width_km;
  j["area_height_km"] = cfg.area_height_km;
  j["warehouse_offset_km"] = cfg.warehouse_offset_km;
  j["seed"] = cfg.seed;
  j["d_max_menu_m"] = cfg.d_max_menu_m;
  j["d_green_menu_m"] = cfg.d_green_menu_m;
  j["size_distribution"] = cfg.size_distribution;
  j["satellite_capacity_packages"] = cfg.satellite_capacity_packages;
  auto profile = [](const VehicleProfile& p) {
    nlohmann::json pj;
    pj["capacity_packages"] = p.capacity_packages;
    pj["emission_factor_kg_per_km"] = p.emission_factor;
    pj["rho_empty_l_per_km"] = p.rho_empty_l_per_km;
    pj["rho_full_l_per_km"] = p.rho_full_l_per_km;
    return pj;
  };
  j["truck"] = profile(cfg.truck);
  j["van"] = profile(cfg.van);
  j["green"] = profile(cfg.green);
  j["green_low_capacity_packages"] = cfg.green_low_capacity_packages;
  return j;
}

inline GenConfig gen_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("generator config: document is not a JSON object");
  GenConfig cfg;
  auto grab = [&](const char* key, auto& into) {
    if (!j.contains(key)) return;
    try {
      into = j.at(key).get<std::decay_t<decltype(into)>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("generator config: field '") + key + "': " + e.what());
    }
  };
  grab("name", cfg.name);
  grab("n_customers", cfg.n_customers);
  grab("n_satellites", cfg.n_satellites);
  grab("area_width_km", cfg.area_width_km);
  grab("area_height_km", cfg.area_height_km);
  grab("warehouse_offset_km", cfg.warehouse_offset_km);
  grab("seed", cfg.seed);
  grab("d_max_menu_m", cfg.d_max_menu_m);
  grab("d_green_menu_m", cfg.d_green_menu_m);
  grab("size_distribution", cfg.size_distribution);
  grab("satellite_capacity_packages", cfg.satellite_capacity_packages);
  auto profile = [&](const char* key, VehicleProfile& p) {
    if (!j.contains(key)) return;
    const auto& pj = j.at(key);
    auto field = [&](const char* f, double& into) {
      if (!pj.contains(f)) return;
      try {
        into = pj.at(f).get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("generator config: ") + key + "." + f + ": " + e.what());
      }
    };
    field("capacity_packages", p.capacity_packages);
    field("emission_factor_kg_per_km", p.emission_factor);
    field("rho_empty_l_per_km", p.rho_empty_l_per_km);
    field("rho_full_l_per_km", p.rho_full_l_per_km);
  };
  profile("truck", cfg.truck);
  profile("van", cfg.van);
  profile("green", cfg.green);
  grab("green_low_capacity_packages", cfg.green_low_capacity_packages);
  return cfg;
}

inline GenConfig load_gen_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open generator config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("generator config: invalid JSON: ") + e.what());
  }
  return gen_config_from_json(j);
}

}  // namespace verde2e
