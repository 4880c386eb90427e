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

// Emissions-versus-distance frontier sweep.  The two extreme points are
// lexicographic optima (minimize one metric, then the other subject to the
// first staying within kSweepTol of its optimum); interior points minimize
// emissions under equally spaced distance bounds between the extremes, each
// refined the same lexicographic way so every reported point is
// non-dominated up to tolerance.  All metrics come from the validating
// evaluator, never from a solver's objective report.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "verde2e/core.hpp"
#include "verde2e/oracle.hpp"
#include "verde2e/solution.hpp"
#include "verde2e/validate.hpp"

namespace verde2e {

// Shared absolute tolerance of the sweep: lexicographic refinement slack and
// dominance comparisons.  Wide enough to absorb external-solver rounding.
inline constexpr double kSweepTol = 1e-6;

struct FrontierPoint {
  double emissions_kg = 0.0;
  double total_distance_km = 0.0;
  Solution solution;
  // Distance bound that produced the point; empty for the two extremes.
  std::optional<double> epsilon_used;
};

// Single-objective solver the sweep drives.  Implementations minimize
// `objective` over the instance subject to `caps` and return a
// validator-evaluated result.
class SweepBackend {
 public:
  virtual ~SweepBackend() = default;
  virtual SolveResult minimize(Metric objective, const std::vector<MetricCap>& caps) = 0;
};

// In-process exact backend.
class OracleBackend : public SweepBackend {
 public:
  OracleBackend(const Instance& instance, const Scenario& scenario,
                const SolveOptions& base = {})
      : instance_(instance), scenario_(scenario), base_(base) {}

  SolveResult minimize(Metric objective, const std::vector<MetricCap>& caps) override {
    SolveOptions options = base_;
    options.objective_override = objective;
    options.caps = caps;
    return solve_exact(instance_, scenario_, options);
  }

 private:
  Instance instance_;
  Scenario scenario_;
  SolveOptions base_;
};

// True if a is at least as good as b in both coordinates and strictly
// better in one, all at tolerance `tol`.  Asymmetric: two points can never
// eliminate each other.
inline bool weakly_dominates(const std::pair<double, double>& a,
                             const std::pair<double, double>& b, double tol = kSweepTol) {
  return a.first <= b.first + tol && a.second <= b.second + tol &&
         (a.first < b.first - tol || a.second < b.second - tol);
}

// Keeps exactly the points no other point weakly dominates, collapsing
// near-duplicates (both coordinates within tol) onto their first
// representative.  Order is preserved.
inline std::vector<std::pair<double, double>> filter_dominated(
    const std::vector<std::pair<double, double>>& points, double tol = kSweepTol) {
  std::vector<std::pair<double, double>> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < points.size() && !drop; ++j)
      if (j != i && weakly_dominates(points[j], points[i], tol)) drop = true;
    for (const auto& k : kept)
      if (!drop && std::abs(k.first - points[i].first) <= tol &&
          std::abs(k.second - points[i].second) <= tol)
        drop = true;  // duplicate of an earlier keeper
    if (!drop) kept.push_back(points[i]);
  }
  return kept;
}

// Index of the interior point farthest (perpendicular distance) from the
// chord joining the first and last point; ties take the lowest index.
// Empty for fewer than three points or coincident chord endpoints.
inline std::optional<std::size_t> knee_point(
    const std::vector<std::pair<double, double>>& frontier) {
  if (frontier.size() < 3) return std::nullopt;
  const auto [x1, y1] = frontier.front();
  const auto [xn, yn] = frontier.back();
  const double chord = std::sqrt((xn - x1) * (xn - x1) + (yn - y1) * (yn - y1));
  if (chord == 0.0) return std::nullopt;
  std::optional<std::size_t> best;
  double best_distance = -1.0;
  for (std::size_t i = 1; i + 1 < frontier.size(); ++i) {
    const double d =
        std::abs((xn - x1) * (y1 - frontier[i].second) -
                 (x1 - frontier[i].first) * (yn - y1)) /
        chord;
    if (d > best_distance) {
      best_distance = d;
      best = i;
    }
  }
  return best;
}

inline std::optional<std::size_t> knee_point(const std::vector<FrontierPoint>& frontier) {
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(frontier.size());
  for (const auto& p : frontier) pairs.emplace_back(p.emissions_kg, p.total_distance_km);
  return knee_point(pairs);
}

namespace detail {

inline FrontierPoint to_point(const SolveResult& r, std::optional<double> epsilon) {
  FrontierPoint p;
  p.emissions_kg = r.metrics.total_emissions;
  p.total_distance_km = r.metrics.total_distance;
  p.solution = r.solution;
  p.epsilon_used = epsilon;
  return p;
}

}  // namespace detail

// Traces the frontier with n_points probes: the two lexicographic extremes
// plus n_points-2 equally spaced distance bounds strictly between their
// distance values.  Output is dominance-filtered and sorted by emissions
// ascending (distance descending across the kept staircase).
inline std::vector<FrontierPoint> sweep(SweepBackend& backend, int n_points) {
  if (n_points < 2) throw Error("sweep: n_points must be at least 2");

  // Emissions-lexicographic extreme: cheapest emissions, then the shortest
  // distance attaining them (within tolerance).
  const SolveResult emin = backend.minimize(Metric::emissions, {});
  const SolveResult low_e = backend.minimize(
      Metric::total_distance, {{Metric::emissions, emin.metrics.total_emissions + kSweepTol}});
  // Distance-lexicographic extreme.
  const SolveResult dmin = backend.minimize(Metric::total_distance, {});
  const SolveResult low_d = backend.minimize(
      Metric::emissions, {{Metric::total_distance, dmin.metrics.total_distance + kSweepTol}});

  std::vector<FrontierPoint> candidates;
  candidates.push_back(detail::to_point(low_e, std::nullopt));
  candidates.push_back(detail::to_point(low_d, std::nullopt));
  const double d_high = low_e.metrics.total_distance;
  const double d_low = low_d.metrics.total_distance;
  const auto near_extreme = [&](const SolveResult& r) {
    for (int k = 0; k < 2; ++k)
      if (std::abs(r.metrics.total_emissions - candidates[k].emissions_kg) <= kSweepTol &&
          std::abs(r.metrics.total_distance - candidates[k].total_distance_km) <= kSweepTol)
        return true;
    return false;
  };
  if (n_points > 2 && d_high - d_low > kSweepTol) {
    const double step = (d_high - d_low) / (n_points - 1);
    for (int i = 1; i <= n_points - 2; ++i) {
      const double epsilon = d_low + step * i;
      const SolveResult capped =
          backend.minimize(Metric::emissions, {{Metric::total_distance, epsilon}});
      const SolveResult refined = backend.minimize(
          Metric::total_distance,
          {{Metric::emissions, capped.metrics.total_emissions + kSweepTol},
           {Metric::total_distance, epsilon}});
      // A probe often lands back on an extreme; keep the extreme's label
      // (no epsilon) for that point instead of a duplicate.
      if (!near_extreme(refined)) candidates.push_back(detail::to_point(refined, epsilon));
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const FrontierPoint& a, const FrontierPoint& b) {
                     if (a.emissions_kg != b.emissions_kg)
                       return a.emissions_kg < b.emissions_kg;
                     return a.total_distance_km < b.total_distance_km;
                   });
  std::vector<std::pair<double, double>> pairs;
  for (const auto& p : candidates) pairs.emplace_back(p.emissions_kg, p.total_distance_km);
  const auto kept_pairs = filter_dominated(pairs);
  std::vector<FrontierPoint> kept;
  std::size_t cursor = 0;
  for (const auto& p : candidates) {
    if (cursor < kept_pairs.size() &&
        p.emissions_kg == kept_pairs[cursor].first &&
        p.total_distance_km == kept_pairs[cursor].second) {
      kept.push_back(p);
      ++cursor;
    }
  }
  return kept;
}

// Oracle-backed convenience wrapper.
inline std::vector<FrontierPoint> sweep(const Instance& instance, int n_points,
                                        const SolveOptions& base = {},
                                        const Scenario& scenario = Scenario::ehc()) {
  OracleBackend backend(instance, scenario, base);
  return sweep(backend, n_points);
}

// CSV view: one row per frontier point, knee flagged on at most one row.
inline std::string frontier_csv(const std::vector<FrontierPoint>& frontier) {
  const auto knee = knee_point(frontier);
  std::ostringstream os;
  os << "emissions_kg,total_distance_km,epsilon,is_knee\n";
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const auto& p = frontier[i];
    os << format_number(p.emissions_kg) << ',' << format_number(p.total_distance_km) << ',';
    if (p.epsilon_used) os << format_number(*p.epsilon_used);
    os << ',' << (knee && *knee == i ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace verde2e
