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

// Fixed-format MPS export for external MILP solvers, a reader for exactly
// the dialect the writer produces, and import of solver variable/value files
// back into route-level solutions.
//
// Writer conventions (all deterministic):
//   - sections NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA in that order;
//     BOUNDS is omitted when no column needs one, and an empty model is just
//     the section headers;
//   - the objective row is named COST; binary columns sit between
//     INTORG/INTEND markers; every column carries its COST entry (zero
//     included) so each column appears at least once;
//   - columns in index order, row entries per column in row creation order,
//     RHS entries only for nonzero values, numbers via format_number,
//     names sanitized to [A-Za-z0-9_].

#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "verde2e/core.hpp"
#include "verde2e/model.hpp"
#include "verde2e/solution.hpp"

namespace verde2e {

// Solver values within this distance of an integer count as that integer.
inline constexpr double kBinaryTol = 1e-6;

namespace detail {

inline std::string sanitize_name(const std::string& s) {
  std::string out;
  for (char ch : s)
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') ? ch : '_';
  if (out.empty()) out = "_";
  if (out.size() > 255) out.resize(255);
  return out;
}

// Left-pads a field to the classic 10-column grid; longer names degrade to
// two-space separation, which the reader (whitespace-splitting) accepts.
inline std::string mps_field(const std::string& s) {
  if (s.size() < 10) return s + std::string(10 - s.size(), ' ');
  return s + "  ";
}

inline char sense_char(RowSense s) {
  switch (s) {
    case RowSense::le: return 'L';
    case RowSense::eq: return 'E';
    case RowSense::ge: return 'G';
  }
  throw Error("invalid row sense");
}

}  // namespace detail

inline std::string write_mps(const MilpModel& model) {
  using detail::mps_field;
  using detail::sanitize_name;
  std::ostringstream os;
  if (model.name.empty()) os << "NAME\n";
  else os << "NAME          " << sanitize_name(model.name) << "\n";

  os << "ROWS\n";
  if (!model.columns.empty()) os << " N  COST\n";
  for (const auto& r : model.rows)
    os << ' ' << detail::sense_char(r.sense) << "  " << sanitize_name(r.name) << "\n";

  // Transpose row-major coefficients into per-column entry lists.
  std::vector<std::vector<std::pair<int, double>>> entries(model.columns.size());
  for (std::size_t ri = 0; ri < model.rows.size(); ++ri)
    for (const auto& [col, coeff] : model.rows[ri].coefficients)
      entries[static_cast<std::size_t>(col)].emplace_back(static_cast<int>(ri), coeff);

  os << "COLUMNS\n";
  bool in_integer_block = false;
  for (std::size_t ci = 0; ci < model.columns.size(); ++ci) {
    const Column& col = model.columns[ci];
    const bool wants_integer = col.kind == ColumnKind::binary;
    if (wants_integer != in_integer_block) {
      os << "    " << mps_field("MARKER") << mps_field("'MARKER'")
         << (wants_integer ? "'INTORG'" : "'INTEND'") << "\n";
      in_integer_block = wants_integer;
    }
    const std::string cname = sanitize_name(col.name);
    os << "    " << mps_field(cname) << mps_field("COST") << format_number(col.objective)
       << "\n";
    for (const auto& [ri, coeff] : entries[ci])
      os << "    " << mps_field(cname)
         << mps_field(sanitize_name(model.rows[static_cast<std::size_t>(ri)].name))
         << format_number(coeff) << "\n";
  }
  if (in_integer_block)
    os << "    " << mps_field("MARKER") << mps_field("'MARKER'") << "'INTEND'\n";

  os << "RHS\n";
  for (const auto& r : model.rows)
    if (r.rhs != 0.0)
      os << "    " << mps_field("RHS") << mps_field(sanitize_name(r.name))
         << format_number(r.rhs) << "\n";

  std::ostringstream bounds;
  for (const auto& col : model.columns) {
    const std::string cname = sanitize_name(col.name);
    if (col.lower == col.upper) {
      bounds << " FX " << mps_field("BND") << mps_field(cname) << format_number(col.lower)
             << "\n";
      continue;
    }
    if (col.lower != 0.0)
      bounds << " LO " << mps_field("BND") << mps_field(cname) << format_number(col.lower)
             << "\n";
    if (col.upper != kInfinity)
      bounds << " UP " << mps_field("BND") << mps_field(cname) << format_number(col.upper)
             << "\n";
  }
  const std::string bound_lines = bounds.str();
  if (!bound_lines.empty()) os << "BOUNDS\n" << bound_lines;

  os << "ENDATA\n";
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) tokens.push_back(tok);
  return tokens;
}

inline double parse_mps_number(const std::string& tok, int line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("mps line " + std::to_string(line_no) + ": expected a number, got '" +
                     tok + "'");
  }
  if (used != tok.size())
    throw ParseError("mps line " + std::to_string(line_no) + ": expected a number, got '" +
                     tok + "'");
  return v;
}

}  // namespace detail

// Reads text produced by write_mps.  Not a general MPS reader: sections must
// appear in the writer's order and data lines use the writer's layouts
// (though any whitespace-separated spacing is accepted, plus the classic
// two-pairs-per-line form in COLUMNS and RHS).
inline MilpModel parse_mps(const std::string& text) {
  using detail::split_ws;
  enum Section { none, name, rows, columns, rhs, bounds, endata };
  const char* section_names[] = {"(start)", "NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS",
                                 "ENDATA"};
  Section current = none;

  MilpModel model;
  std::string objective_row;
  bool have_objective_row = false;
  std::map<std::string, int> row_ids;
  std::map<std::string, int> column_ids;
  std::string open_column;            // current contiguous COLUMNS block
  std::set<int> open_column_rows;     // rows already referenced by it
  bool integer_mode = false;

  auto row_id = [&](const std::string& rname, int line_no) {
    auto it = row_ids.find(rname);
    if (it == row_ids.end())
      throw ParseError("mps line " + std::to_string(line_no) + ": unknown row '" + rname +
                       "'");
    return it->second;
  };

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (current != endata && std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;

    if (line[0] != ' ' && line[0] != '\t') {  // section header
      const auto tokens = split_ws(line);
      const std::string& header = tokens[0];
      Section next;
      if (header == "NAME") next = name;
      else if (header == "ROWS") next = rows;
      else if (header == "COLUMNS") next = columns;
      else if (header == "RHS") next = rhs;
      else if (header == "BOUNDS") next = bounds;
      else if (header == "ENDATA") next = endata;
      else
        throw ParseError("mps line " + std::to_string(line_no) + ": unknown section '" +
                         header + "'");
      // BOUNDS is optional; everything else must appear in order.
      const bool ok = next == current + 1 || (next == endata && current == rhs);
      if (!ok)
        throw ParseError("mps line " + std::to_string(line_no) + ": section " + header +
                         " after " + section_names[current] + " breaks the section order");
      current = next;
      if (current == name && tokens.size() > 1) model.name = tokens[1];
      continue;
    }

    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    switch (current) {
      case none:
        throw ParseError("mps line " + std::to_string(line_no) +
                         ": data before the NAME section");
      case name:
        throw ParseError("mps line " + std::to_string(line_no) +
                         ": unexpected data in the NAME section");
      case rows: {
        if (tokens.size() != 2)
          throw ParseError("mps line " + std::to_string(line_no) +
                           ": ROWS entries are '<sense> <name>'");
        const std::string& sense = tokens[0];
        const std::string& rname = tokens[1];
        if (sense == "N") {
          if (have_objective_row)
            throw ParseError("mps line " + std::to_string(line_no) +
                             ": second objective row '" + rname + "'");
          objective_row = rname;
          have_objective_row = true;
          break;
        }
        Row row;
        row.name = rname;
        if (sense == "L") row.sense = RowSense::le;
        else if (sense == "E") row.sense = RowSense::eq;
        else if (sense == "G") row.sense = RowSense::ge;
        else
          throw ParseError("mps line " + std::to_string(line_no) + ": unknown row sense '" +
                           sense + "'");
        if (!row_ids.emplace(rname, static_cast<int>(model.rows.size())).second)
          throw ParseError("mps line " + std::to_string(line_no) + ": duplicate row '" +
                           rname + "'");
        model.rows.push_back(std::move(row));
        break;
      }
      case columns: {
        if (tokens.size() >= 3 && tokens[1] == "'MARKER'") {
          if (tokens[2] == "'INTORG'") integer_mode = true;
          else if (tokens[2] == "'INTEND'") integer_mode = false;
          else
            throw ParseError("mps line " + std::to_string(line_no) + ": unknown marker '" +
                             tokens[2] + "'");
          break;
        }
        if (tokens.size() != 3 && tokens.size() != 5)
          throw ParseError("mps line " + std::to_string(line_no) +
                           ": COLUMNS entries are '<column> <row> <value> [<row> <value>]'");
        const std::string& cname = tokens[0];
        if (cname != open_column) {
          if (column_ids.count(cname))
            throw ParseError("mps line " + std::to_string(line_no) + ": duplicate column '" +
                             cname + "' (entries must be contiguous)");
          Column col;
          col.name = cname;
          col.kind = integer_mode ? ColumnKind::binary : ColumnKind::continuous;
          if (integer_mode) col.upper = 1.0;  // integer-block default, see BOUNDS
          column_ids.emplace(cname, static_cast<int>(model.columns.size()));
          model.columns.push_back(std::move(col));
          open_column = cname;
          open_column_rows.clear();
        }
        const int col = column_ids.at(cname);
        for (std::size_t t = 1; t + 1 < tokens.size(); t += 2) {
          const std::string& rname = tokens[t];
          const double value = detail::parse_mps_number(tokens[t + 1], line_no);
          if (have_objective_row && rname == objective_row) {
            model.columns[static_cast<std::size_t>(col)].objective = value;
            continue;
          }
          const int ri = row_id(rname, line_no);
          if (!open_column_rows.insert(ri).second)
            throw ParseError("mps line " + std::to_string(line_no) +
                             ": duplicate coefficient for column '" + cname + "' in row '" +
                             rname + "'");
          model.rows[static_cast<std::size_t>(ri)].coefficients.emplace_back(col, value);
        }
        break;
      }
      case rhs: {
        if (tokens.size() != 3 && tokens.size() != 5)
          throw ParseError("mps line " + std::to_string(line_no) +
                           ": RHS entries are '<set> <row> <value> [<row> <value>]'");
        for (std::size_t t = 1; t + 1 < tokens.size(); t += 2)
          model.rows[static_cast<std::size_t>(row_id(tokens[t], line_no))].rhs =
              detail::parse_mps_number(tokens[t + 1], line_no);
        break;
      }
      case bounds: {
        if (tokens.size() != 4)
          throw ParseError("mps line " + std::to_string(line_no) +
                           ": BOUNDS entries are '<type> <set> <column> <value>'");
        auto it = column_ids.find(tokens[2]);
        if (it == column_ids.end())
          throw ParseError("mps line " + std::to_string(line_no) + ": unknown column '" +
                           tokens[2] + "'");
        Column& col = model.columns[static_cast<std::size_t>(it->second)];
        const double value = detail::parse_mps_number(tokens[3], line_no);
        if (tokens[0] == "UP") col.upper = value;
        else if (tokens[0] == "LO") col.lower = value;
        else if (tokens[0] == "FX") col.lower = col.upper = value;
        else
          throw ParseError("mps line " + std::to_string(line_no) + ": unsupported bound type '" +
                           tokens[0] + "'");
        break;
      }
      case endata:
        break;  // unreachable: the read loop stops at ENDATA
    }
  }

  if (current != endata) {
    Section expected = static_cast<Section>(current + 1);
    if (expected == bounds) expected = endata;  // BOUNDS never mandatory
    throw ParseError(std::string("mps: truncated file, missing section ") +
                     section_names[expected]);
  }

  for (std::size_t id = 0; id < model.columns.size(); ++id) {
    VariableKey key;
    if (VariableIndex::try_parse_name(model.columns[id].name, key)) model.index.add(key);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Solution files: one "name value" pair per line, '#' lines are comments.

inline std::string write_solution_values(const MilpModel& model,
                                         const std::vector<double>& values) {
  if (values.size() != model.columns.size())
    throw Error("solution values: expected one entry per column");
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i)
    os << detail::sanitize_name(model.columns[i].name) << ' '
       << format_number_exact(values[i]) << "\n";
  return os.str();
}

inline std::map<std::string, double> parse_solution_file(const std::string& text) {
  std::map<std::string, double> values;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens.size() != 2)
      throw ParseError("solution line " + std::to_string(line_no) +
                       ": expected '<name> <value>'");
    values[tokens[0]] = detail::parse_mps_number(tokens[1], line_no);
  }
  return values;
}

namespace detail {

// Reads a solver binary: must sit within kBinaryTol of 0 or 1.
inline bool binary_on(double value, const std::string& name) {
  if (std::abs(value) <= kBinaryTol) return false;
  if (std::abs(value - 1.0) <= kBinaryTol) return true;
  throw Error("solution: binary variable " + name + " has fractional value " +
              format_number(value));
}

// Follows the unique closed walk that starts at `start` over `arcs`.
// Consumes every arc or throws.
inline std::vector<int> closed_walk(int start, std::map<int, int>& succ,
                                    const std::string& what) {
  std::vector<int> stops;
  int at = start;
  while (true) {  // terminates: every step consumes one arc
    auto it = succ.find(at);
    if (it == succ.end())
      throw Error("solution: " + what + " arcs do not form a closed walk through node " +
                  std::to_string(at));
    const int next = it->second;
    succ.erase(it);
    if (next == start) {
      if (!succ.empty())
        throw Error("solution: " + what + " has disconnected arcs beyond the walk");
      return stops;
    }
    stops.push_back(next);
    at = next;
  }
}

}  // namespace detail

// Rebuilds a route-level solution from solver variable values.  Route
// structure comes from the x arcs (which must form one closed walk per used
// vehicle), leg loads from z, service modes from y/w, assignments from q/s.
// Unlisted variables count as zero.  The result is mechanical: semantic
// feasibility is the validator's job, but structurally unrepresentable data
// (fractional binaries, open walks, conflicting assignments) throws here.
inline Solution import_solution(const std::map<std::string, double>& values,
                                const MilpModel& model, const Instance& inst) {
  using F = VariableKey::Family;
  std::vector<double> by_id(model.columns.size(), 0.0);
  for (const auto& [vname, value] : values) {
    VariableKey key;
    if (!VariableIndex::try_parse_name(vname, key) || !model.index.find(key))
      throw ParseError("solution: unknown variable '" + vname + "'");
    by_id[static_cast<std::size_t>(model.index.id(key))] = value;
  }

  // Per-vehicle arc successor maps and z loads.
  std::map<int, std::map<int, int>> succ;          // vehicle -> from -> to
  std::map<int, std::map<int, double>> arc_load;   // vehicle -> from -> z
  std::map<int, int> base_satellite;               // K2 vehicle -> satellite
  Solution sol;
  for (std::size_t id = 0; id < model.columns.size(); ++id) {
    const VariableKey& key = model.index.key(static_cast<int>(id));
    const double value = by_id[id];
    const std::string& vname = model.columns[id].name;
    switch (key.family) {
      case F::x:
        if (detail::binary_on(value, vname)) {
          if (!succ[key.vehicle].emplace(key.a, key.b).second)
            throw Error("solution: vehicle " + std::to_string(key.vehicle) +
                        " leaves node " + std::to_string(key.a) + " twice");
        }
        break;
      case F::z:
        if (value != 0.0) arc_load[key.vehicle][key.a] = value;
        break;
      case F::w:
        if (detail::binary_on(value, vname)) {
          if (!sol.pickup.emplace(key.a, key.b).second)
            throw Error("solution: customer " + std::to_string(key.a) +
                        " picks up at two satellites");
        }
        break;
      case F::y:
        if (detail::binary_on(value, vname)) {
          auto [it, fresh] = sol.home.emplace(key.a, HomeAssignment{key.b, -1});
          if (!fresh)
            throw Error("solution: customer " + std::to_string(key.a) +
                        " is home-assigned to two satellites");
        }
        break;
      case F::q:
        if (detail::binary_on(value, vname)) {
          if (!base_satellite.emplace(key.b, key.a).second)
            throw Error("solution: vehicle " + std::to_string(key.b) +
                        " is assigned to two satellites");
        }
        break;
      case F::s:
      case F::l:
      case F::f:
        break;  // handled below or derived
    }
  }
  // Home vehicles from s; a missing s leaves -1 for the validator to flag.
  for (std::size_t id = 0; id < model.columns.size(); ++id) {
    const VariableKey& key = model.index.key(static_cast<int>(id));
    if (key.family != F::s) continue;
    if (!detail::binary_on(by_id[id], model.columns[id].name)) continue;
    auto it = sol.home.find(key.a);
    if (it == sol.home.end()) continue;  // s without y: validator territory
    if (it->second.vehicle != -1)
      throw Error("solution: customer " + std::to_string(key.a) +
                  " is assigned to two vehicles");
    it->second.vehicle = key.b;
  }

  for (auto& [vehicle, arcs] : succ) {
    const Vehicle* v = inst.find_vehicle(vehicle);
    const bool first = v && v->echelon == Echelon::first;
    const std::string what = "vehicle " + std::to_string(vehicle);
    int start = 0;
    if (!first) {
      auto it = base_satellite.find(vehicle);
      if (it == base_satellite.end())
        throw Error("solution: " + what + " drives arcs but has no satellite assignment");
      start = it->second;
    }
    // Walk before moving loads: closed_walk consumes the arc map.
    std::map<int, int> arcs_copy = arcs;
    const std::vector<int> stops = detail::closed_walk(start, arcs_copy, what);
    std::vector<double> legs;
    int at = start;
    for (std::size_t i = 0; i <= stops.size(); ++i) {
      const auto& loads = arc_load[vehicle];
      auto lit = loads.find(at);
      legs.push_back(lit == loads.end() ? 0.0 : lit->second);
      at = i < stops.size() ? stops[i] : start;
    }
    if (first) {
      sol.first_echelon_routes.push_back({vehicle, stops, std::move(legs)});
    } else {
      sol.second_echelon_routes.push_back({vehicle, start, stops, std::move(legs)});
    }
  }
  // Bare assignments: q set but no arcs driven.
  for (const auto& [vehicle, sat] : base_satellite)
    if (!succ.count(vehicle)) sol.second_echelon_routes.push_back({vehicle, sat, {}, {}});
  return sol;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
  if (!out) throw Error("failed writing file: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace verde2e
