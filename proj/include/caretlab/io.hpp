#pragma once

// CSV files for measures, and the artifact checks behind `caretlab validate`.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "caretlab/magma.hpp"
#include "caretlab/measure.hpp"
#include "caretlab/ramsey.hpp"
#include "caretlab/tree.hpp"

namespace caretlab {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

namespace detail {

struct CsvRow {
  std::string_view key;
  std::string_view value;
  std::size_t line_start;
  std::size_t value_start;
};

/// Splits `key,value` lines at the last comma; skips blanks, `#` comments and
/// a header equal to `header`.
inline std::vector<CsvRow> csv_pairs(std::string_view text, std::string_view header) {
  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t start = pos;
    pos = nl + 1;
    if (line.empty() || line.front() == '#' || line == header) continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string_view::npos) throw ParseError("row '" + std::string(line) + "' lacks a comma", start);
    rows.push_back({line.substr(0, comma), line.substr(comma + 1), start, start + comma + 1});
  }
  return rows;
}

inline Rational csv_weight(const CsvRow& row) {
  try {
    return parse_rational(row.value);
  } catch (const ParseError& e) {
    throw ParseError(std::string("bad weight: ") + e.what(), row.value_start + e.position());
  }
}

}  // namespace detail

/// CSV `tree,weight`, support in canonical order.
inline std::string format_tree_measure(const Measure<Tree>& mu) {
  std::string out = "tree,weight\n";
  for (const auto& [t, w] : mu) out += format_tree(t) + "," + format_rational(w) + "\n";
  return out;
}

/// Rows without normalisation checks; used by validation to report deficits.
inline std::vector<std::pair<Tree, Rational>> parse_tree_weight_rows(std::string_view text) {
  std::vector<std::pair<Tree, Rational>> out;
  for (const auto& row : detail::csv_pairs(text, "tree,weight")) {
    Tree t;
    try {
      t = parse_tree(row.key);
    } catch (const ParseError& e) {
      throw ParseError(std::string("bad tree: ") + e.what(), row.line_start + e.position());
    }
    out.emplace_back(std::move(t), detail::csv_weight(row));
  }
  return out;
}

inline Measure<Tree> parse_tree_measure(std::string_view text) { return make_measure(parse_tree_weight_rows(text)); }

/// CSV `element,weight` for measures on a magma's carrier.
inline std::string format_element_measure(const Measure<Element>& mu) {
  std::string out = "element,weight\n";
  for (const auto& [x, w] : mu) out += std::to_string(x) + "," + format_rational(w) + "\n";
  return out;
}

inline Measure<Element> parse_element_measure(std::string_view text) {
  std::vector<std::pair<Element, Rational>> pairs;
  for (const auto& row : detail::csv_pairs(text, "element,weight")) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(std::string(row.key), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != row.key.size() || row.key.empty() || row.key.front() == '-') {
      throw ParseError("bad element '" + std::string(row.key) + "'", row.line_start);
    }
    pairs.emplace_back(static_cast<Element>(v), detail::csv_weight(row));
  }
  return make_measure(pairs);
}

// ---------------------------------------------------------------------------
// Artifact validation: the first problem found, or "ok".

enum class ArtifactKind { measure, coloring, magma };

inline ArtifactKind guess_artifact_kind(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t nl = text.find('\n', i);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(i, nl - i);
    i = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("tree,value", 0) == 0) return ArtifactKind::coloring;
    if (line.rfind("tree,weight", 0) == 0 || line.rfind("element,weight", 0) == 0) return ArtifactKind::measure;
    return line.find(',') == std::string_view::npos ? ArtifactKind::magma : ArtifactKind::measure;
  }
  return ArtifactKind::measure;
}

inline std::string validate_measure_text(std::string_view text) {
  try {
    const bool on_elements = text.find("element,weight") != std::string_view::npos;
    if (on_elements) {
      parse_element_measure(text);
      return "ok";
    }
    const auto rows = parse_tree_weight_rows(text);
    if (rows.empty()) return "measure has no rows";
    Rational total = 0;
    for (const auto& [t, w] : rows) {
      if (sgn(w) < 0) return "negative weight " + format_rational(w) + " on " + format_tree(t);
      total += w;
    }
    if (total != 1) {
      const Rational deficit = 1 - total;
      return "weights sum to " + format_rational(total) + " (deficit " + format_rational(deficit) + ")";
    }
    return "ok";
  } catch (const std::exception& e) {
    return e.what();
  }
}

inline std::string validate_coloring_text(std::string_view text, std::size_t cap = kDefaultTreeCap) {
  try {
    parse_coloring(text, cap);
    return "ok";
  } catch (const std::exception& e) {
    return e.what();
  }
}

inline std::string validate_magma_text(std::string_view text) {
  try {
    parse_magma(text);
    return "ok";
  } catch (const std::exception& e) {
    return e.what();
  }
}

inline std::string validate_artifact_text(std::string_view text) {
  switch (guess_artifact_kind(text)) {
    case ArtifactKind::coloring: return validate_coloring_text(text);
    case ArtifactKind::magma: return validate_magma_text(text);
    case ArtifactKind::measure: return validate_measure_text(text);
  }
  return "ok";
}

}  // namespace caretlab
