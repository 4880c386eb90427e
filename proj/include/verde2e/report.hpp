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

// Batch-run bookkeeping and report tables.  A RunReport is nothing but the
// flat list of per-instance, per-scenario records; every table below is
// re-derived from those records on demand, so there is no hidden state to
// drift out of sync.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "verde2e/core.hpp"
#include "verde2e/validate.hpp"

namespace verde2e {

// One solve attempt.  `error` is set (and metrics meaningless) when the
// solve failed; failed rows still participate in reports as failures.
struct RunRecord {
  std::string instance;
  std::string scenario;
  bool solved = false;
  std::string error;
  Metrics metrics;
  std::vector<int> satellite_nodes;         // all satellites in the instance
  std::vector<int> active_satellite_nodes;  // subset activated by the solution
  int n_customers = 0;
};

struct RunReport {
  std::vector<RunRecord> records;

  // Distinct scenario names in first-appearance order.
  std::vector<std::string> scenarios() const {
    std::vector<std::string> out;
    for (const auto& r : records)
      if (std::find(out.begin(), out.end(), r.scenario) == out.end())
        out.push_back(r.scenario);
    return out;
  }

  const RunRecord* find(const std::string& instance, const std::string& scenario) const {
    for (const auto& r : records)
      if (r.instance == instance && r.scenario == scenario) return &r;
    return nullptr;
  }
};

// Per-scenario means over the solved records.  Emissions are split by
// source (first-echelon driving plus stops, second-echelon driving,
// customer trips) and distances four ways, so the columns stack to the
// respective totals.
struct ScenarioAggregate {
  std::string scenario;
  int solved = 0;
  int failed = 0;
  double e_k1_kg = 0.0;  // includes stop emissions
  double e_k2_kg = 0.0;
  double e_c_kg = 0.0;
  double d_k1_km = 0.0;
  double d_k2_km = 0.0;
  double d_c0_km = 0.0;
  double d_c_km = 0.0;
  double total_emissions_kg = 0.0;
  double total_distance_km = 0.0;
  double company_distance_km = 0.0;
  double active_satellites = 0.0;
  double active_pickup_only = 0.0;
  // Mean of per-instance customers-per-active-satellite; empty when no
  // solved instance activates a satellite.
  std::optional<double> avg_customers_per_active_satellite;
  double at_home_pct = 0.0;
  std::optional<double> avg_pickup_dist_em_km;    // mean of per-instance means
  std::optional<double> avg_pickup_dist_zero_km;
};

inline std::vector<ScenarioAggregate> aggregate(const RunReport& report) {
  std::vector<ScenarioAggregate> out;
  for (const auto& scenario : report.scenarios()) {
    ScenarioAggregate agg;
    agg.scenario = scenario;
    double avg_c_sum = 0.0, em_sum = 0.0, zero_sum = 0.0;
    int avg_c_n = 0, em_n = 0, zero_n = 0;
    for (const auto& r : report.records) {
      if (r.scenario != scenario) continue;
      if (!r.solved) {
        ++agg.failed;
        continue;
      }
      ++agg.solved;
      const Metrics& m = r.metrics;
      agg.e_k1_kg += m.e_k1_with_stops;
      agg.e_k2_kg += m.e_k2;
      agg.e_c_kg += m.e_c;
      agg.d_k1_km += m.d_k1;
      agg.d_k2_km += m.d_k2;
      agg.d_c0_km += m.d_c0;
      agg.d_c_km += m.d_c;
      agg.total_emissions_kg += m.total_emissions;
      agg.total_distance_km += m.total_distance;
      agg.company_distance_km += m.company_distance;
      agg.active_satellites += m.active_satellites;
      agg.active_pickup_only += m.active_pickup_only;
      agg.at_home_pct += m.customers_at_home_pct;
      if (m.active_satellites > 0) {
        avg_c_sum += static_cast<double>(r.n_customers) / m.active_satellites;
        ++avg_c_n;
      }
      if (m.avg_pickup_dist_em_km) {
        em_sum += *m.avg_pickup_dist_em_km;
        ++em_n;
      }
      if (m.avg_pickup_dist_zero_km) {
        zero_sum += *m.avg_pickup_dist_zero_km;
        ++zero_n;
      }
    }
    if (agg.solved > 0) {
      const double n = agg.solved;
      agg.e_k1_kg /= n;
      agg.e_k2_kg /= n;
      agg.e_c_kg /= n;
      agg.d_k1_km /= n;
      agg.d_k2_km /= n;
      agg.d_c0_km /= n;
      agg.d_c_km /= n;
      agg.total_emissions_kg /= n;
      agg.total_distance_km /= n;
      agg.company_distance_km /= n;
      agg.active_satellites /= n;
      agg.active_pickup_only /= n;
      agg.at_home_pct /= n;
    }
    if (avg_c_n > 0) agg.avg_customers_per_active_satellite = avg_c_sum / avg_c_n;
    if (em_n > 0) agg.avg_pickup_dist_em_km = em_sum / em_n;
    if (zero_n > 0) agg.avg_pickup_dist_zero_km = zero_sum / zero_n;
    out.push_back(agg);
  }
  return out;
}

// Percentage change of scenario B relative to scenario A on one instance:
// (f_B - f_A) / f_A * 100, split into first echelon, second echelon, and
// system total.  A zero base value leaves the cell empty.
struct VariationRow {
  std::string instance;
  std::string scenario_a;
  std::string scenario_b;
  std::string series;  // "E1", "E2", or "TOT"
  std::optional<double> emissions_pct;
  std::optional<double> distance_pct;
};

namespace detail {

inline std::optional<double> pct_change(double base, double value) {
  if (base == 0.0) return std::nullopt;
  return (value - base) / base * 100.0;
}

}  // namespace detail

inline std::vector<VariationRow> variation_rows(const RunReport& report,
                                               const std::string& scenario_a,
                                               const std::string& scenario_b) {
  std::vector<VariationRow> out;
  std::vector<std::string> seen;
  for (const auto& r : report.records) {
    if (r.scenario != scenario_a || !r.solved) continue;
    if (std::find(seen.begin(), seen.end(), r.instance) != seen.end()) continue;
    seen.push_back(r.instance);
    const RunRecord* other = report.find(r.instance, scenario_b);
    if (other == nullptr || !other->solved) continue;
    const Metrics& a = r.metrics;
    const Metrics& b = other->metrics;
    const auto push = [&](const std::string& series, double ea, double eb, double da,
                          double db) {
      VariationRow row;
      row.instance = r.instance;
      row.scenario_a = scenario_a;
      row.scenario_b = scenario_b;
      row.series = series;
      row.emissions_pct = detail::pct_change(ea, eb);
      row.distance_pct = detail::pct_change(da, db);
      out.push_back(row);
    };
    push("E1", a.e_k1_with_stops, b.e_k1_with_stops, a.d_k1, b.d_k1);
    push("E2", a.e_k2, b.e_k2, a.d_k2, b.d_k2);
    push("TOT", a.total_emissions, b.total_emissions, a.total_distance, b.total_distance);
  }
  return out;
}

// Satellite activation counts per scenario, including satellites that never
// activate.  Counts are keyed by node id; they are comparable across a batch
// only when the instances share a satellite layout.
struct SatelliteFrequencyRow {
  std::string scenario;
  int satellite_node = 0;
  int activations = 0;
  int instances = 0;  // solved instances contributing to the count
};

inline std::vector<SatelliteFrequencyRow> satellite_frequency(const RunReport& report) {
  std::vector<SatelliteFrequencyRow> out;
  for (const auto& scenario : report.scenarios()) {
    std::map<int, int> counts;
    int solved = 0;
    for (const auto& r : report.records) {
      if (r.scenario != scenario || !r.solved) continue;
      ++solved;
      for (int node : r.satellite_nodes) counts.emplace(node, 0);
      for (int node : r.active_satellite_nodes) ++counts[node];
    }
    for (const auto& [node, count] : counts)
      out.push_back({scenario, node, count, solved});
  }
  return out;
}

namespace detail {

inline void csv_optional(std::ostringstream& os, const std::optional<double>& v) {
  if (v) os << format_number(*v);
}

}  // namespace detail

inline std::string breakdown_csv(const std::vector<ScenarioAggregate>& aggregates) {
  std::ostringstream os;
  os << "scenario,solved,failed,e_k1_kg,e_k2_kg,e_c_kg,d_k1_km,d_k2_km,d_c0_km,d_c_km,"
        "total_emissions_kg,total_distance_km,company_distance_km,active_satellites,"
        "active_pickup_only,avg_customers_per_active_satellite\n";
  for (const auto& a : aggregates) {
    os << a.scenario << ',' << a.solved << ',' << a.failed << ',' << format_number(a.e_k1_kg)
       << ',' << format_number(a.e_k2_kg) << ',' << format_number(a.e_c_kg) << ','
       << format_number(a.d_k1_km) << ',' << format_number(a.d_k2_km) << ','
       << format_number(a.d_c0_km) << ',' << format_number(a.d_c_km) << ','
       << format_number(a.total_emissions_kg) << ',' << format_number(a.total_distance_km)
       << ',' << format_number(a.company_distance_km) << ','
       << format_number(a.active_satellites) << ',' << format_number(a.active_pickup_only)
       << ',';
    detail::csv_optional(os, a.avg_customers_per_active_satellite);
    os << "\n";
  }
  return os.str();
}

inline std::string customer_stats_csv(const std::vector<ScenarioAggregate>& aggregates) {
  std::ostringstream os;
  os << "scenario,solved,at_home_pct,avg_pickup_dist_em_km,avg_pickup_dist_zero_km\n";
  for (const auto& a : aggregates) {
    os << a.scenario << ',' << a.solved << ',' << format_number(a.at_home_pct) << ',';
    detail::csv_optional(os, a.avg_pickup_dist_em_km);
    os << ',';
    detail::csv_optional(os, a.avg_pickup_dist_zero_km);
    os << "\n";
  }
  return os.str();
}

inline std::string satellite_frequency_csv(const std::vector<SatelliteFrequencyRow>& rows) {
  std::ostringstream os;
  os << "scenario,satellite_node,activations,instances\n";
  for (const auto& r : rows)
    os << r.scenario << ',' << r.satellite_node << ',' << r.activations << ','
       << r.instances << "\n";
  return os.str();
}

inline std::string variation_csv(const std::vector<VariationRow>& rows) {
  std::ostringstream os;
  os << "instance,scenario_a,scenario_b,series,emissions_pct,distance_pct\n";
  for (const auto& r : rows) {
    os << r.instance << ',' << r.scenario_a << ',' << r.scenario_b << ',' << r.series << ',';
    detail::csv_optional(os, r.emissions_pct);
    os << ',';
    detail::csv_optional(os, r.distance_pct);
    os << "\n";
  }
  return os.str();
}

// Raw per-record table; failed rows leave the metric columns empty.
inline std::string records_csv(const RunReport& report) {
  std::ostringstream os;
  const std::string metric_header = metrics_csv_header();
  os << "instance,scenario,status,error," << metric_header << "\n";
  const auto commas = std::count(metric_header.begin(), metric_header.end(), ',');
  for (const auto& r : report.records) {
    os << r.instance << ',' << r.scenario << ',' << (r.solved ? "ok" : "failed") << ','
       << (r.solved ? "" : r.error) << ',';
    if (r.solved) os << metrics_csv_row(r.metrics);
    else os << std::string(static_cast<std::size_t>(commas), ',');
    os << "\n";
  }
  return os.str();
}

namespace detail {

inline nlohmann::json json_optional(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace detail

inline nlohmann::json breakdown_json(const std::vector<ScenarioAggregate>& aggregates) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& a : aggregates) {
    rows.push_back({{"scenario", a.scenario},
                    {"solved", a.solved},
                    {"failed", a.failed},
                    {"e_k1_kg", a.e_k1_kg},
                    {"e_k2_kg", a.e_k2_kg},
                    {"e_c_kg", a.e_c_kg},
                    {"d_k1_km", a.d_k1_km},
                    {"d_k2_km", a.d_k2_km},
                    {"d_c0_km", a.d_c0_km},
                    {"d_c_km", a.d_c_km},
                    {"total_emissions_kg", a.total_emissions_kg},
                    {"total_distance_km", a.total_distance_km},
                    {"company_distance_km", a.company_distance_km},
                    {"active_satellites", a.active_satellites},
                    {"active_pickup_only", a.active_pickup_only},
                    {"avg_customers_per_active_satellite",
                     detail::json_optional(a.avg_customers_per_active_satellite)}});
  }
  return rows;
}

inline nlohmann::json customer_stats_json(const std::vector<ScenarioAggregate>& aggregates) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& a : aggregates) {
    rows.push_back({{"scenario", a.scenario},
                    {"solved", a.solved},
                    {"at_home_pct", a.at_home_pct},
                    {"avg_pickup_dist_em_km", detail::json_optional(a.avg_pickup_dist_em_km)},
                    {"avg_pickup_dist_zero_km",
                     detail::json_optional(a.avg_pickup_dist_zero_km)}});
  }
  return rows;
}

inline nlohmann::json satellite_frequency_json(
    const std::vector<SatelliteFrequencyRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"scenario", r.scenario},
                   {"satellite_node", r.satellite_node},
                   {"activations", r.activations},
                   {"instances", r.instances}});
  return out;
}

inline nlohmann::json variation_json(const std::vector<VariationRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"instance", r.instance},
                   {"scenario_a", r.scenario_a},
                   {"scenario_b", r.scenario_b},
                   {"series", r.series},
                   {"emissions_pct", detail::json_optional(r.emissions_pct)},
                   {"distance_pct", detail::json_optional(r.distance_pct)}});
  return out;
}

inline nlohmann::json records_json(const RunReport& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : report.records) {
    nlohmann::json row = {{"instance", r.instance},
                          {"scenario", r.scenario},
                          {"solved", r.solved},
                          {"n_customers", r.n_customers},
                          {"satellite_nodes", r.satellite_nodes},
                          {"active_satellite_nodes", r.active_satellite_nodes}};
    if (r.solved) row["metrics"] = metrics_to_json(r.metrics);
    else row["error"] = r.error;
    out.push_back(row);
  }
  return out;
}

}  // namespace verde2e
