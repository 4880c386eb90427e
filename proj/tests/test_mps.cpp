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

#include "verde2e/mps.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <algorithm>

#include "verde2e/oracle.hpp"
#include "support/builders.hpp"

using namespace verde2e;
using Catch::Matchers::ContainsSubstring;

namespace {

MilpModel single_binary_model() {
  MilpModel m;
  m.name = "single_binary";
  Column pick;
  pick.name = "pick";
  pick.kind = ColumnKind::binary;
  pick.upper = 1.0;
  pick.objective = 2.5;
  m.columns.push_back(pick);
  Row limit;
  limit.name = "limit";
  limit.sense = RowSense::le;
  limit.rhs = 4.0;
  limit.coefficients = {{0, 3.0}};
  m.rows.push_back(limit);
  Row floor_row;
  floor_row.name = "floor";
  floor_row.sense = RowSense::ge;
  floor_row.rhs = 0.0;
  floor_row.coefficients = {{0, 1.0}};
  m.rows.push_back(floor_row);
  return m;
}

// Row-coefficient equality up to ordering and serialization precision: the
// file carries 12 significant digits, so parsed values agree with the
// original at print precision, not necessarily bit for bit.
bool same_coefficients(const Row& a, const Row& b) {
  auto printed = [](const Row& r) {
    std::vector<std::pair<int, std::string>> out;
    for (const auto& [col, coeff] : r.coefficients) out.emplace_back(col, format_number(coeff));
    std::sort(out.begin(), out.end());
    return out;
  };
  return printed(a) == printed(b);
}

void check_isomorphic(const MilpModel& a, const MilpModel& b) {
  REQUIRE(a.columns.size() == b.columns.size());
  for (std::size_t i = 0; i < a.columns.size(); ++i) {
    CHECK(a.columns[i].name == b.columns[i].name);
    CHECK(a.columns[i].kind == b.columns[i].kind);
    CHECK(format_number(a.columns[i].lower) == format_number(b.columns[i].lower));
    CHECK(format_number(a.columns[i].upper) == format_number(b.columns[i].upper));
    CHECK(format_number(a.columns[i].objective) == format_number(b.columns[i].objective));
  }
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].name == b.rows[i].name);
    CHECK(a.rows[i].sense == b.rows[i].sense);
    CHECK(format_number(a.rows[i].rhs) == format_number(b.rows[i].rhs));
    CHECK(same_coefficients(a.rows[i], b.rows[i]));
  }
}

bool same_solution(const Solution& a, const Solution& b) {
  if (a.pickup != b.pickup) return false;
  if (a.home.size() != b.home.size()) return false;
  for (const auto& [c, assign] : a.home) {
    auto it = b.home.find(c);
    if (it == b.home.end() || it->second.satellite != assign.satellite ||
        it->second.vehicle != assign.vehicle)
      return false;
  }
  if (a.first_echelon_routes.size() != b.first_echelon_routes.size()) return false;
  for (std::size_t i = 0; i < a.first_echelon_routes.size(); ++i) {
    const auto& p = a.first_echelon_routes[i];
    const auto& q = b.first_echelon_routes[i];
    if (p.vehicle != q.vehicle || p.satellites != q.satellites ||
        p.leg_loads_kg != q.leg_loads_kg)
      return false;
  }
  if (a.second_echelon_routes.size() != b.second_echelon_routes.size()) return false;
  for (std::size_t i = 0; i < a.second_echelon_routes.size(); ++i) {
    const auto& p = a.second_echelon_routes[i];
    const auto& q = b.second_echelon_routes[i];
    if (p.vehicle != q.vehicle || p.satellite != q.satellite || p.customers != q.customers ||
        p.leg_loads_kg != q.leg_loads_kg)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("hand-written golden export", "[mps]") {
  const std::string expected = read_text_file(std::string(VERDE2E_GOLDEN_DIR) +
                                              "/single_binary.mps");
  CHECK(write_mps(single_binary_model()) == expected);
}

TEST_CASE("empty model exports bare section headers", "[mps]") {
  MilpModel empty;
  CHECK(write_mps(empty) == "NAME\nROWS\nCOLUMNS\nRHS\nENDATA\n");
  MilpModel back = parse_mps(write_mps(empty));
  CHECK(back.columns.empty());
  CHECK(back.rows.empty());
}

TEST_CASE("write-parse-write is byte stable on suite models", "[mps]") {
  std::vector<MilpModel> models;
  models.push_back(single_binary_model());
  for (const Scenario& scen : {Scenario::ehc(), Scenario::td()})
    models.push_back(build_model(testing::t1_instance(), scen));
  ModelOptions all_on;
  all_on.valid_inequalities = true;
  all_on.symmetry_breaking = true;
  for (std::uint64_t seed : {2ull, 5ull, 8ull})
    models.push_back(build_model(testing::tiny_random_instance(seed), Scenario::elc(), all_on));
  {
    Instance t1 = testing::t1_instance();
    MilpModel m = build_model(t1, Scenario::ehc());
    models.push_back(
        add_epsilon_constraint(m, scenario_instance(t1, Scenario::ehc()),
                               Metric::total_distance, 20.4));
  }

  for (const MilpModel& m : models) {
    const std::string text = write_mps(m);
    MilpModel back = parse_mps(text);
    CHECK(write_mps(back) == text);
    check_isomorphic(m, back);
    CHECK(back.index.size() == m.index.size());
  }
}

TEST_CASE("parsed models keep their structured variable index", "[mps]") {
  MilpModel m = build_model(testing::t1_instance(), Scenario::ehc());
  MilpModel back = parse_mps(write_mps(m));
  const VariableKey key{VariableKey::Family::x, 0, 1, 0};
  CHECK(back.index.id(key) == m.index.id(key));
  CHECK(back.columns[static_cast<std::size_t>(back.index.id(key))].name == "x_0_1_k0");
}

TEST_CASE("malformed files are rejected with context", "[mps]") {
  const std::string good = write_mps(build_model(testing::t1_instance(), Scenario::ehc()));

  SECTION("truncation names the first missing section") {
    const auto cut_before = [&](const std::string& header) {
      return good.substr(0, good.find("\n" + header) + 1);
    };
    CHECK_THROWS_WITH(parse_mps(cut_before("RHS")), ContainsSubstring("missing section RHS"));
    CHECK_THROWS_WITH(parse_mps(cut_before("ENDATA")),
                      ContainsSubstring("missing section ENDATA"));
    CHECK_THROWS_WITH(parse_mps(""), ContainsSubstring("missing section NAME"));
  }
  SECTION("section order is enforced") {
    CHECK_THROWS_WITH(parse_mps("ROWS\nENDATA\n"), ContainsSubstring("section order"));
    CHECK_THROWS_WITH(parse_mps("NAME x\nCOLUMNS\nENDATA\n"),
                      ContainsSubstring("section order"));
    CHECK_THROWS_WITH(parse_mps("NAME x\nGARBAGE\n"), ContainsSubstring("unknown section"));
  }
  SECTION("duplicate rows and columns") {
    CHECK_THROWS_WITH(parse_mps("NAME x\nROWS\n L  r\n L  r\nCOLUMNS\nRHS\nENDATA\n"),
                      ContainsSubstring("duplicate row"));
    CHECK_THROWS_WITH(
        parse_mps("NAME x\nROWS\n N  COST\n L  r\nCOLUMNS\n    a  r  1\n    b  r  1\n"
                  "    a  COST  1\nRHS\nENDATA\n"),
        ContainsSubstring("duplicate column"));
  }
  SECTION("unknown row in COLUMNS") {
    CHECK_THROWS_WITH(
        parse_mps("NAME x\nROWS\n N  COST\nCOLUMNS\n    a  missing  1\nRHS\nENDATA\n"),
        ContainsSubstring("unknown row"));
  }
  SECTION("bad numbers") {
    CHECK_THROWS_AS(
        parse_mps("NAME x\nROWS\n N  COST\n L  r\nCOLUMNS\n    a  r  abc\nRHS\nENDATA\n"),
        ParseError);
  }
}

TEST_CASE("solution files round-trip name value pairs", "[mps]") {
  MilpModel m = single_binary_model();
  const std::string text = write_solution_values(m, {1.0});
  CHECK(text == "pick 1\n");
  const auto values = parse_solution_file("# a comment\n\npick 1\n");
  REQUIRE(values.size() == 1);
  CHECK(values.at("pick") == 1.0);

  CHECK_THROWS_AS(parse_solution_file("pick\n"), ParseError);
  CHECK_THROWS_AS(parse_solution_file("pick one\n"), ParseError);
  CHECK_THROWS_AS(write_solution_values(m, {1.0, 2.0}), Error);
}

TEST_CASE("oracle solutions survive export and import unchanged", "[mps]") {
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Instance inst = testing::tiny_random_instance(seed);
    for (const Scenario& scen : {Scenario::ehc(), Scenario::td()}) {
      SolveResult r;
      try {
        r = solve_exact(inst, scen);
      } catch (const InfeasibleError&) {
        continue;
      }
      ++solved;
      const Instance effective = scenario_instance(inst, scen);
      MilpModel m = build_model(inst, scen);
      const auto values = solution_to_column_values(m, effective, r.solution);

      // Exact import from in-memory values.
      std::map<std::string, double> by_name;
      for (std::size_t i = 0; i < values.size(); ++i) by_name[m.columns[i].name] = values[i];
      Solution direct = import_solution(by_name, m, effective);
      CHECK(same_solution(direct, r.solution));

      // Via the text file format (12 significant digits).
      Solution via_text =
          import_solution(parse_solution_file(write_solution_values(m, values)), m, effective);
      const Metrics scored = evaluate(effective, via_text);
      CHECK_THAT(metric_value(scored, scen.objective),
                 Catch::Matchers::WithinAbs(r.objective, 1e-9));
    }
  }
  CHECK(solved >= 12);
}

TEST_CASE("import rejects unrepresentable files", "[mps]") {
  Instance t1 = testing::t1_instance();
  MilpModel m = build_model(t1, Scenario::ehc());

  CHECK_THROWS_WITH(import_solution({{"nope", 1.0}}, m, t1), ContainsSubstring("unknown"));
  CHECK_THROWS_WITH(import_solution({{"x_0_1_k0", 0.4}}, m, t1),
                    ContainsSubstring("fractional"));
  // Arc out of the warehouse with no return: an open path.
  CHECK_THROWS_WITH(import_solution({{"x_0_1_k0", 1.0}}, m, t1),
                    ContainsSubstring("closed walk"));
  // Second-echelon arcs without a satellite assignment.
  CHECK_THROWS_WITH(import_solution({{"x_1_2_k1", 1.0}, {"x_2_1_k1", 1.0}}, m, t1),
                    ContainsSubstring("no satellite assignment"));

  // All-zero file: imports cleanly, validator rejects it.
  Solution nothing = import_solution({}, m, t1);
  const auto violations = check_feasibility(t1, nothing);
  REQUIRE_FALSE(violations.empty());
  bool unserved = false;
  for (const auto& v : violations)
    if (v.code == ViolationCode::unserved_customer) unserved = true;
  CHECK(unserved);
}

TEST_CASE("import tolerates solver noise on binaries", "[mps]") {
  Instance t1 = testing::t1_instance();
  const Instance effective = scenario_instance(t1, Scenario::ehc());
  MilpModel m = build_model(t1, Scenario::ehc());
  SolveResult r = solve_exact(t1, Scenario::ehc());
  auto values = solution_to_column_values(m, effective, r.solution);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (m.columns[i].kind != ColumnKind::binary) continue;
    values[i] += values[i] > 0.5 ? -4e-7 : 4e-7;  // inside the 1e-6 gate
  }
  std::map<std::string, double> by_name;
  for (std::size_t i = 0; i < values.size(); ++i) by_name[m.columns[i].name] = values[i];
  Solution sol = import_solution(by_name, m, effective);
  CHECK(same_solution(sol, r.solution));
}
