#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "maxent/graph.hpp"

namespace maxent {

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline long parse_index(const std::string& field, std::size_t line) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (field.empty() || used != field.size()) {
    throw CsvError(line, "vertex index '" + field + "' is not an integer");
  }
  if (value < 1) throw CsvError(line, "vertex indices are 1-based, got " + field);
  return value;
}

inline double parse_weight(const std::string& field, std::size_t line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (field.empty() || used != field.size() || !std::isfinite(value)) {
    throw CsvError(line, "weight '" + field + "' is not a finite number");
  }
  if (value < 0.0) throw CsvError(line, "weight must be >= 0, got " + field);
  return value;
}

}  // namespace detail

// Reads an `i,j,weight` edge list with 1-based vertex indices. Pairs that are
// not listed have weight 0. The vertex count is `n` when given, otherwise the
// largest index seen. Self-loops and repeated pairs (in either orientation)
// are rejected.
inline WeightedGraph read_edge_list(std::istream& in, std::optional<std::size_t> n = std::nullopt) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  struct Edge {
    std::size_t i, j;
    double w;
  };
  std::vector<Edge> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t largest = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = detail::trim(line);
    if (content.empty()) continue;
    if (!have_header) {
      if (content != "i,j,weight") {
        throw CsvError(line_no, "expected header 'i,j,weight', got '" + content + "'");
      }
      have_header = true;
      continue;
    }
    const auto fields = detail::split_commas(content);
    if (fields.size() != 3) {
      throw CsvError(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    }
    const auto i = static_cast<std::size_t>(detail::parse_index(fields[0], line_no));
    const auto j = static_cast<std::size_t>(detail::parse_index(fields[1], line_no));
    const double w = detail::parse_weight(fields[2], line_no);
    if (i == j) throw CsvError(line_no, "self-loop at vertex " + std::to_string(i));
    const auto key = std::minmax(i, j);
    if (!seen.insert({key.first, key.second}).second) {
      throw CsvError(line_no, "duplicate pair (" + std::to_string(key.first) + "," +
                                  std::to_string(key.second) + ")");
    }
    if (n && std::max(i, j) > *n) {
      throw CsvError(line_no, "vertex index exceeds n = " + std::to_string(*n));
    }
    largest = std::max({largest, i, j});
    edges.push_back({i - 1, j - 1, w});
  }
  if (!have_header) throw CsvError(line_no, "missing header 'i,j,weight'");
  WeightedGraph g(n.value_or(largest));
  for (const auto& e : edges) g.set_edge(e.i, e.j, e.w);
  return g;
}

// Writes every pair i < j, zeros included, so the vertex count survives a
// round trip.
inline void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  out << "i,j,weight\n";
  char buf[64];
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", g(i, j));
      out << i + 1 << ',' << j + 1 << ',' << buf << '\n';
    }
  }
}

}  // namespace maxent
