#pragma once

// Finite binary systems given by a multiplication table.

#include <cstddef>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "caretlab/errors.hpp"

namespace caretlab {

using Element = std::uint32_t;

class Magma {
 public:
  Magma() = default;

  /// Row-major table: table[i * order + j] = i ⋆ j.
  Magma(std::size_t order, std::vector<Element> table) : order_(order), table_(std::move(table)) {
    if (order_ == 0) throw DomainError("magma order must be positive");
    if (table_.size() != order_ * order_) {
      throw DomainError("magma table has " + std::to_string(table_.size()) + " entries, expected " +
                        std::to_string(order_ * order_));
    }
    for (std::size_t idx = 0; idx < table_.size(); ++idx) {
      if (table_[idx] >= order_) {
        throw DomainError("table entry " + std::to_string(table_[idx]) + " at (" +
                          std::to_string(idx / order_) + "," + std::to_string(idx % order_) +
                          ") is outside [0," + std::to_string(order_) + ")");
      }
    }
  }

  std::size_t order() const noexcept { return order_; }
  const std::vector<Element>& table() const noexcept { return table_; }

  Element operator()(Element x, Element y) const {
    if (x >= order_ || y >= order_) {
      throw DomainError("element outside the magma carrier of order " + std::to_string(order_));
    }
    return table_[x * order_ + y];
  }

  bool contains(Element x) const noexcept { return x < order_; }

  /// Sub-magma on the listed elements, renumbered 0..|elements|-1 in the given
  /// order. Throws if the subset is not closed.
  Magma restrict_to(const std::vector<Element>& elements) const {
    std::vector<long> position(order_, -1);
    for (std::size_t i = 0; i < elements.size(); ++i) position.at(elements[i]) = static_cast<long>(i);
    std::vector<Element> table;
    table.reserve(elements.size() * elements.size());
    for (Element x : elements) {
      for (Element y : elements) {
        const long p = position[(*this)(x, y)];
        if (p < 0) throw DomainError("subset is not closed under the operation");
        table.push_back(static_cast<Element>(p));
      }
    }
    return Magma(elements.size(), std::move(table));
  }

  friend bool operator==(const Magma&, const Magma&) = default;

 private:
  std::size_t order_ = 0;
  std::vector<Element> table_;
};

// ---------------------------------------------------------------------------
// Text format: first line k, then k rows of k integers.

inline std::string format_magma(const Magma& m) {
  std::string out = std::to_string(m.order()) + "\n";
  for (std::size_t i = 0; i < m.order(); ++i) {
    for (std::size_t j = 0; j < m.order(); ++j) {
      if (j) out += ' ';
      out += std::to_string(m.table()[i * m.order() + j]);
    }
    out += '\n';
  }
  return out;
}

inline Magma parse_magma(std::string_view text) {
  std::vector<std::string> lines;
  std::vector<std::size_t> starts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) {
      lines.push_back(line);
      starts.push_back(pos);
    }
    pos = nl + 1;
  }
  if (lines.empty()) throw ParseError("empty magma description", 0);

  auto read_ints = [&](std::size_t li) {
    std::vector<long long> values;
    std::istringstream in(lines[li]);
    std::string token;
    while (in >> token) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw ParseError("malformed integer '" + token + "' on line " + std::to_string(li + 1),
                         starts[li] + lines[li].find(token));
      }
      values.push_back(v);
    }
    return values;
  };

  const auto header = read_ints(0);
  if (header.size() != 1 || header[0] <= 0) throw ParseError("first line must be the positive order k", starts[0]);
  const auto k = static_cast<std::size_t>(header[0]);
  if (lines.size() != k + 1) {
    throw ParseError("expected " + std::to_string(k) + " table rows, found " + std::to_string(lines.size() - 1),
                     text.size());
  }
  std::vector<Element> table;
  table.reserve(k * k);
  for (std::size_t r = 0; r < k; ++r) {
    const auto row = read_ints(r + 1);
    if (row.size() != k) {
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(k),
                       starts[r + 1]);
    }
    for (long long v : row) {
      if (v < 0 || static_cast<std::size_t>(v) >= k) {
        throw ParseError("entry " + std::to_string(v) + " in row " + std::to_string(r) + " is outside [0," +
                             std::to_string(k) + ")",
                         starts[r + 1]);
      }
      table.push_back(static_cast<Element>(v));
    }
  }
  return Magma(k, std::move(table));
}

// ---------------------------------------------------------------------------
// Named systems and generators of instances.

inline Magma cyclic_addition_magma(std::size_t k) {
  std::vector<Element> t;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) t.push_back(static_cast<Element>((i + j) % k));
  return Magma(k, std::move(t));
}

/// x ⋆ y = x + 1 mod k (depends on the left argument only).
inline Magma shift_magma(std::size_t k) {
  std::vector<Element> t;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) t.push_back(static_cast<Element>((i + 1) % k));
  return Magma(k, std::move(t));
}

/// x ⋆ y = x.
inline Magma left_zero_magma(std::size_t k) {
  std::vector<Element> t;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) t.push_back(static_cast<Element>(i));
  return Magma(k, std::move(t));
}

/// The magma whose table is the base-k digits of `code` (cell (0,0) least
/// significant). code ranges over [0, k^(k*k)).
inline Magma magma_from_code(std::size_t k, std::uint64_t code) {
  std::vector<Element> t(k * k);
  for (auto& e : t) {
    e = static_cast<Element>(code % k);
    code /= k;
  }
  return Magma(k, std::move(t));
}

inline std::uint64_t magma_count(std::size_t k) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < k * k; ++i) n *= k;
  return n;
}

inline Magma random_magma(std::size_t k, std::mt19937_64& rng) {
  std::vector<Element> t(k * k);
  for (auto& e : t) e = static_cast<Element>(rng() % k);
  return Magma(k, std::move(t));
}

}  // namespace caretlab
