#pragma once

// Finite Ramsey search for copies of T_m inside A_n. A copy is the range of a
// convex combination of substitution embeddings; its colour values are linear
// in the combination weights, so minimal oscillation is an exact LP.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "caretlab/errors.hpp"
#include "caretlab/lp.hpp"
#include "caretlab/measure.hpp"
#include "caretlab/parallel.hpp"
#include "caretlab/rational.hpp"
#include "caretlab/tree.hpp"

namespace caretlab {

inline constexpr std::size_t kDefaultEmbeddingCap = 200000;
inline constexpr std::size_t kExhaustiveColoringLimit = 20;  // exhaustive sweeps need |T_n| <= this

// ---------------------------------------------------------------------------
// Embeddings and copies

/// t ↦ t(u_0, ..., u_{m-1}), sending T_m into T_n with n = Σ #(u_i).
struct Embedding {
  std::vector<Tree> parts;

  std::size_t m() const { return parts.size(); }
  std::size_t n() const {
    std::size_t s = 0;
    for (const auto& u : parts) s += u.size();
    return s;
  }
  Tree apply(const Tree& t) const { return substitute(t, parts); }

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

inline std::string format_embedding(const Embedding& e) {
  std::string out;
  for (std::size_t i = 0; i < e.parts.size(); ++i) {
    if (i) out += " | ";
    out += format_tree(e.parts[i]);
  }
  return out;
}

/// Compositions of n into m positive parts, lexicographic.
inline std::vector<std::vector<std::size_t>> compositions(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  if (m == 0 || m > n) return out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t left, std::size_t parts_left) -> void {
    if (parts_left == 1) {
      cur.push_back(left);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    for (std::size_t first = 1; first + (parts_left - 1) <= left; ++first) {
      cur.push_back(first);
      self(self, left - first, parts_left - 1);
      cur.pop_back();
    }
  };
  rec(rec, n, m);
  return out;
}

inline std::uint64_t embedding_count(std::size_t m, std::size_t n) {
  std::uint64_t total = 0;
  for (const auto& comp : compositions(n, m)) {
    std::uint64_t prod = 1;
    for (std::size_t part : comp) prod *= catalan(part - 1);
    total += prod;
  }
  return total;
}

/// All embeddings of T_m into T_n: compositions in lexicographic order, then
/// the parts' trees in canonical order (last part varying fastest).
inline std::vector<Embedding> enumerate_embeddings(std::size_t m, std::size_t n, TreeCatalog& catalog,
                                                   std::size_t embedding_cap = kDefaultEmbeddingCap) {
  if (m < 1 || m > n) {
    throw DomainError("need 1 <= m <= n, got m=" + std::to_string(m) + ", n=" + std::to_string(n));
  }
  if (n > catalog.cap()) throw CapExceeded("n=" + std::to_string(n) + " exceeds tree cap " + std::to_string(catalog.cap()));
  const std::uint64_t count = embedding_count(m, n);
  if (count > embedding_cap) {
    throw CapExceeded(std::to_string(count) + " embeddings of T_" + std::to_string(m) + " in T_" + std::to_string(n) +
                      " exceed the embedding cap " + std::to_string(embedding_cap));
  }
  std::vector<Embedding> out;
  out.reserve(count);
  for (const auto& comp : compositions(n, m)) {
    std::vector<const std::vector<Tree>*> pools;
    for (std::size_t part : comp) pools.push_back(&catalog.trees(part));
    std::vector<std::size_t> odo(m, 0);
    for (bool more = true; more;) {
      Embedding e;
      for (std::size_t i = 0; i < m; ++i) e.parts.push_back((*pools[i])[odo[i]]);
      out.push_back(std::move(e));
      more = false;
      for (std::size_t i = m; i-- > 0;) {
        if (++odo[i] < pools[i]->size()) {
          more = true;
          break;
        }
        odo[i] = 0;
      }
    }
  }
  return out;
}

/// Σ_j λ_j δ_{e_j(t)}.
struct EmbeddingCopy {
  std::vector<Rational> weights;
  std::vector<Embedding> embeddings;
};

inline void validate_copy(const EmbeddingCopy& copy) {
  if (copy.weights.size() != copy.embeddings.size() || copy.embeddings.empty()) {
    throw DomainError("a copy needs one positive weight per embedding");
  }
  Rational total = 0;
  for (const auto& w : copy.weights) {
    if (sgn(w) <= 0) throw DomainError("copy weight " + format_rational(w) + " is not positive");
    total += w;
  }
  if (total != 1) throw DomainError("copy weights sum to " + format_rational(total));
  const std::size_t m = copy.embeddings.front().m(), n = copy.embeddings.front().n();
  for (const auto& e : copy.embeddings) {
    if (e.m() != m || e.n() != n) throw DomainError("copy mixes embeddings of different shapes");
  }
}

// ---------------------------------------------------------------------------
// Colorings of T_n

class Coloring {
 public:
  Coloring() = default;
  Coloring(std::size_t n, std::vector<Rational> values) : n_(n), values_(std::move(values)) {
    if (n_ == 0) throw DomainError("coloring size must be positive");
    if (values_.size() != catalan(n_ - 1)) {
      throw DomainError("coloring of T_" + std::to_string(n_) + " needs " + std::to_string(catalan(n_ - 1)) +
                        " values, got " + std::to_string(values_.size()));
    }
    for (const auto& v : values_) {
      if (sgn(v) < 0 || v > 1) throw DomainError("coloring value " + format_rational(v) + " is outside [0,1]");
    }
  }

  /// The 0/1 coloring whose bit i (least significant first) colours tree i.
  static Coloring from_bits(std::size_t n, std::uint64_t bits) {
    std::vector<Rational> v(catalan(n - 1));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (bits >> i) & 1U;
    return Coloring(n, std::move(v));
  }

  std::size_t n() const noexcept { return n_; }
  const std::vector<Rational>& values() const noexcept { return values_; }

  const Rational& operator()(const Tree& t) const {
    if (t.size() != n_) {
      throw DomainError("tree of size " + std::to_string(t.size()) + " is outside the coloured level T_" +
                        std::to_string(n_));
    }
    return values_[tree_rank(t)];
  }

  bool is_binary() const {
    return std::all_of(values_.begin(), values_.end(), [](const Rational& v) { return v == 0 || v == 1; });
  }

  /// c extended linearly to measures on T_n.
  Rational operator()(const Measure<Tree>& mu) const {
    return evaluate([this](const Tree& t) { return (*this)(t); }, mu);
  }

  friend bool operator==(const Coloring&, const Coloring&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Rational> values_;
};

/// CSV `tree,value`, one row per tree of T_n in canonical order.
inline std::string format_coloring(const Coloring& c, TreeCatalog& catalog) {
  std::string out = "tree,value\n";
  const auto& trees = catalog.trees(c.n());
  for (std::size_t i = 0; i < trees.size(); ++i) out += format_tree(trees[i]) + "," + format_rational(c.values()[i]) + "\n";
  return out;
}

/// Parses `tree,value` rows (any order, header and `#` lines optional) and
/// insists on every tree of T_n exactly once.
inline Coloring parse_coloring(std::string_view text, std::size_t cap = kDefaultTreeCap) {
  std::vector<std::pair<Tree, Rational>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t start = pos;
    pos = nl + 1;
    if (line.empty() || line.front() == '#' || line == "tree,value") continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string_view::npos) throw ParseError("coloring row lacks a comma", start);
    Tree t;
    try {
      t = parse_tree(line.substr(0, comma));
    } catch (const ParseError& e) {
      throw ParseError(std::string("bad tree in coloring: ") + e.what(), start + e.position());
    }
    Rational v;
    try {
      v = parse_rational(line.substr(comma + 1));
    } catch (const ParseError& e) {
      throw ParseError(std::string("bad value in coloring: ") + e.what(), start + comma + 1 + e.position());
    }
    rows.emplace_back(std::move(t), std::move(v));
  }
  if (rows.empty()) throw ParseError("coloring has no rows", 0);
  const std::size_t n = rows.front().first.size();
  if (n > cap) throw CapExceeded("coloring level T_" + std::to_string(n) + " exceeds tree cap " + std::to_string(cap));
  std::vector<std::optional<Rational>> slot(catalan(n - 1));
  for (auto& [t, v] : rows) {
    if (t.size() != n) {
      throw DomainError("coloring mixes sizes: " + format_tree(t) + " is not in T_" + std::to_string(n));
    }
    auto& s = slot[tree_rank(t)];
    if (s) throw DomainError("coloring lists " + format_tree(t) + " twice");
    s = std::move(v);
  }
  std::vector<Rational> values;
  values.reserve(slot.size());
  TreeCatalog catalog(n);
  for (std::size_t i = 0; i < slot.size(); ++i) {
    if (!slot[i]) throw DomainError("coloring has no row for tree " + format_tree(catalog.trees(n)[i]));
    values.push_back(std::move(*slot[i]));
  }
  return Coloring(n, std::move(values));
}

// ---------------------------------------------------------------------------
// Oscillation LP over an arbitrary set of value columns

/// values[j][t]: colour value at domain point t under column j.
using ValueMatrix = std::vector<std::vector<Rational>>;

inline Rational spread(const std::vector<Rational>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

struct OscillationOptimum {
  std::vector<Rational> weights;  // λ, one per column
  std::vector<Rational> values;   // Σ_j λ_j values[j][t]
  Rational oscillation;
  bool from_lp = false;           // false when a constant column settled it
  LinearProgram lp;               // the program solved (when from_lp)
  LpSolution solution;
};

inline std::vector<Rational> combine_columns(const ValueMatrix& columns, const std::vector<Rational>& weights) {
  std::vector<Rational> out(columns.front().size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (sgn(weights[j]) == 0) continue;
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += weights[j] * columns[j][t];
  }
  return out;
}

/// Variables (λ_0..λ_{k-1}, u, w) >= 0, minimise u - w subject to Σλ = 1 and
/// w <= Σ_j λ_j v_j(t) <= u. Values are shifted to be nonnegative first so the
/// sign constraints on u and w cost nothing.
inline LinearProgram oscillation_program(const ValueMatrix& columns) {
  const std::size_t k = columns.size(), points = columns.front().size();
  Rational lowest = columns.front().front();
  for (const auto& col : columns)
    for (const auto& v : col) lowest = std::min(lowest, v);
  LinearProgram lp;
  lp.cost.assign(k + 2, Rational(0));
  lp.cost[k] = 1;
  lp.cost[k + 1] = -1;
  std::vector<Rational> simplex(k + 2, Rational(0));
  for (std::size_t j = 0; j < k; ++j) simplex[j] = 1;
  lp.add_row(simplex, Relation::equal, 1);
  for (std::size_t t = 0; t < points; ++t) {
    std::vector<Rational> row(k + 2);
    for (std::size_t j = 0; j < k; ++j) row[j] = columns[j][t] - lowest;
    auto upper = row;
    upper[k] = -1;
    lp.add_row(std::move(upper), Relation::less_equal, 0);
    row[k + 1] = -1;
    lp.add_row(std::move(row), Relation::greater_equal, 0);
  }
  return lp;
}

inline OscillationOptimum min_oscillation_columns(const ValueMatrix& columns) {
  if (columns.empty() || columns.front().empty()) throw DomainError("oscillation needs at least one column and point");
  OscillationOptimum out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (sgn(spread(columns[j])) == 0) {
      out.weights.assign(columns.size(), Rational(0));
      out.weights[j] = 1;
      out.values = columns[j];
      out.oscillation = 0;
      return out;
    }
  }
  out.lp = oscillation_program(columns);
  out.solution = solve_lp(out.lp);
  if (out.solution.status != LpStatus::optimal) throw std::logic_error("oscillation program is always feasible and bounded");
  out.from_lp = true;
  out.weights.assign(out.solution.x.begin(), out.solution.x.begin() + static_cast<long>(columns.size()));
  out.values = combine_columns(columns, out.weights);
  out.oscillation = spread(out.values);
  if (out.oscillation != out.solution.objective) throw std::logic_error("oscillation LP objective disagrees with its point");
  return out;
}

// ---------------------------------------------------------------------------
// Embedding tables for a fixed (m, n)

class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t m, std::size_t n, TreeCatalog& catalog, std::size_t embedding_cap = kDefaultEmbeddingCap)
      : m_(m), n_(n), domain_(catalog.trees(m)), embeddings_(enumerate_embeddings(m, n, catalog, embedding_cap)) {
    image_.reserve(embeddings_.size());
    for (const auto& e : embeddings_) {
      std::vector<std::size_t> row;
      row.reserve(domain_.size());
      for (const auto& t : domain_) row.push_back(tree_rank(e.apply(t)));
      image_.push_back(std::move(row));
    }
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }
  const std::vector<Tree>& domain() const noexcept { return domain_; }
  const std::vector<Embedding>& embeddings() const noexcept { return embeddings_; }
  /// image()[j][t]: canonical index in T_n of e_j(domain()[t]).
  const std::vector<std::vector<std::size_t>>& image() const noexcept { return image_; }

  ValueMatrix values(const Coloring& c) const {
    check(c);
    ValueMatrix out(embeddings_.size(), std::vector<Rational>(domain_.size()));
    for (std::size_t j = 0; j < embeddings_.size(); ++j)
      for (std::size_t t = 0; t < domain_.size(); ++t) out[j][t] = c.values()[image_[j][t]];
    return out;
  }

  void check(const Coloring& c) const {
    if (c.n() != n_) {
      throw DomainError("coloring is on T_" + std::to_string(c.n()) + " but the copies live in T_" + std::to_string(n_));
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<Tree> domain_;
  std::vector<Embedding> embeddings_;
  std::vector<std::vector<std::size_t>> image_;
};

struct CopyValues {
  std::vector<Rational> values;  // indexed by T_m in canonical order
  Rational oscillation;
};

inline CopyValues copy_values(const EmbeddingCopy& copy, const Coloring& c, TreeCatalog& catalog) {
  validate_copy(copy);
  const std::size_t m = copy.embeddings.front().m();
  if (copy.embeddings.front().n() != c.n()) throw DomainError("copy and coloring live on different levels");
  CopyValues out;
  for (const auto& t : catalog.trees(m)) {
    Rational v = 0;
    for (std::size_t j = 0; j < copy.embeddings.size(); ++j) v += copy.weights[j] * c(copy.embeddings[j].apply(t));
    out.values.push_back(std::move(v));
  }
  out.oscillation = spread(out.values);
  return out;
}

inline EmbeddingCopy copy_from_weights(const EmbeddingTable& table, const std::vector<Rational>& weights) {
  EmbeddingCopy copy;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (sgn(weights[j]) == 0) continue;
    copy.weights.push_back(weights[j]);
    copy.embeddings.push_back(table.embeddings()[j]);
  }
  return copy;
}

struct MinOscillationCopy {
  EmbeddingCopy copy;
  Rational oscillation;
  OscillationOptimum optimum;
};

/// The least oscillation over all copies of T_m in A_n (exact).
inline MinOscillationCopy min_oscillation_copy(const Coloring& c, const EmbeddingTable& table) {
  MinOscillationCopy out;
  out.optimum = min_oscillation_columns(table.values(c));
  out.oscillation = out.optimum.oscillation;
  out.copy = copy_from_weights(table, out.optimum.weights);
  return out;
}

struct ConstantCopyResult {
  std::optional<EmbeddingCopy> copy;
  std::optional<Rational> constant;  // the common value on the witness
  LinearProgram lp;                  // feasibility program (empty when a pure embedding settled it)
  std::vector<Rational> farkas;      // infeasibility ray for lp when no copy exists
};

/// A copy on which a 0/1 colouring is constant, or an exact proof that none exists.
inline ConstantCopyResult constant_copy_exists(const Coloring& c, const EmbeddingTable& table) {
  if (!c.is_binary()) throw DomainError("constant-copy search needs a 0/1 coloring");
  const ValueMatrix columns = table.values(c);
  ConstantCopyResult out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (sgn(spread(columns[j])) == 0) {
      out.copy = EmbeddingCopy{{Rational(1)}, {table.embeddings()[j]}};
      out.constant = columns[j].front();
      return out;
    }
  }
  const std::size_t k = columns.size();
  out.lp.cost.assign(k, Rational(0));
  out.lp.add_row(std::vector<Rational>(k, Rational(1)), Relation::equal, 1);
  for (std::size_t t = 1; t < table.domain().size(); ++t) {
    std::vector<Rational> row(k);
    for (std::size_t j = 0; j < k; ++j) row[j] = columns[j][t] - columns[j][0];
    out.lp.add_row(std::move(row), Relation::equal, 0);
  }
  const LpSolution sol = solve_lp(out.lp);
  if (sol.status == LpStatus::optimal) {
    out.copy = copy_from_weights(table, sol.x);
    out.constant = combine_columns(columns, sol.x).front();
  } else {
    out.farkas = sol.farkas;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Searches over colorings

/// Small deterministic helpers; the standard distributions are not portable
/// across library implementations, and seeds must reproduce everywhere.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t bound) { return static_cast<std::size_t>(rng() % bound); }

inline Coloring random_binary_coloring(std::size_t n, std::mt19937_64& rng) {
  std::vector<Rational> v(catalan(n - 1));
  for (auto& x : v) x = static_cast<unsigned long>(rng() & 1U);
  return Coloring(n, std::move(v));
}

inline Coloring flip(const Coloring& c, std::size_t index) {
  auto v = c.values();
  v[index] = 1 - v[index];
  return Coloring(c.n(), std::move(v));
}

struct AdversaryResult {
  std::optional<Coloring> witness;  // min oscillation strictly above the threshold
  Coloring best;
  Rational best_oscillation;
  std::size_t evaluations = 0;
  std::size_t restarts = 0;
};

/// Steepest-ascent local search over 0/1 colourings with random restarts.
/// Each step evaluates every single-tree flip (in parallel, reduced by index);
/// `budget` bounds the number of oscillation evaluations.
inline AdversaryResult adversarial_coloring_search(const EmbeddingTable& table, const Rational& threshold,
                                                   std::size_t budget, std::uint64_t seed,
                                                   std::size_t threads = 1) {
  if (sgn(threshold) < 0 || threshold > 1) throw DomainError("threshold must lie in [0,1]");
  if (budget == 0) throw DomainError("budget must be positive");
  std::mt19937_64 rng(seed);
  AdversaryResult out;
  auto eval = [&](const Coloring& c) { return min_oscillation_columns(table.values(c)).oscillation; };
  bool have_best = false;
  while (out.evaluations < budget) {
    Coloring cur = random_binary_coloring(table.n(), rng);
    Rational cur_osc = eval(cur);
    ++out.evaluations;
    ++out.restarts;
    if (!have_best || cur_osc > out.best_oscillation) {
      out.best = cur;
      out.best_oscillation = cur_osc;
      have_best = true;
    }
    for (;;) {
      if (cur_osc > threshold) {
        out.witness = cur;
        out.best = cur;
        out.best_oscillation = cur_osc;
        return out;
      }
      const std::size_t width = cur.values().size();
      const std::size_t room = budget - std::min(budget, out.evaluations);
      if (room == 0) break;
      const std::size_t trial = std::min(width, room);
      const auto scores = parallel_map(trial, threads, [&](std::size_t i) { return eval(flip(cur, i)); });
      out.evaluations += trial;
      std::optional<std::size_t> pick;
      for (std::size_t i = 0; i < trial; ++i)
        if (scores[i] > cur_osc && (!pick || scores[i] > scores[*pick])) pick = i;
      if (!pick) break;
      cur = flip(cur, *pick);
      cur_osc = scores[*pick];
      if (cur_osc > out.best_oscillation) {
        out.best = cur;
        out.best_oscillation = cur_osc;
      }
    }
  }
  return out;
}

struct ExhaustiveSweep {
  std::uint64_t colorings = 0;   // number checked, always 2^|T_n|
  Rational worst_oscillation;    // max over colourings of the min oscillation
  Coloring worst;                // first colouring (by bit code) attaining it
};

/// Every 0/1 colouring of T_n, each solved exactly.
inline ExhaustiveSweep exhaustive_binary_sweep(const EmbeddingTable& table, std::size_t threads = 1) {
  const std::size_t width = catalan(table.n() - 1);
  if (width > kExhaustiveColoringLimit) {
    throw CapExceeded("exhaustive sweep over 2^" + std::to_string(width) + " colorings exceeds 2^" +
                      std::to_string(kExhaustiveColoringLimit));
  }
  const std::uint64_t total = std::uint64_t{1} << width;
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(total, 256));
  struct Partial {
    Rational worst = -1;
    std::uint64_t code = 0;
  };
  const auto partials = parallel_map(chunks, threads, [&](std::size_t chunk) {
    Partial p;
    const std::uint64_t lo = total * chunk / chunks, hi = total * (chunk + 1) / chunks;
    for (std::uint64_t code = lo; code < hi; ++code) {
      Rational osc = min_oscillation_columns(table.values(Coloring::from_bits(table.n(), code))).oscillation;
      if (osc > p.worst) {
        p.worst = std::move(osc);
        p.code = code;
      }
    }
    return p;
  });
  ExhaustiveSweep out;
  out.colorings = total;
  Partial best;
  for (const auto& p : partials)
    if (p.worst > best.worst) best = p;
  out.worst_oscillation = best.worst;
  out.worst = Coloring::from_bits(table.n(), best.code);
  return out;
}

enum class Verdict { suffices, fails, unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::suffices: return "suffices";
    case Verdict::fails: return "fails";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

struct ScanRow {
  std::size_t n = 0;
  Verdict verdict = Verdict::unknown;
  std::string certificate_kind;  // "exhaustive", "witness" or "none"
  Rational oscillation;          // worst (exhaustive), witnessed, or best found
  std::optional<Coloring> witness;
  std::uint64_t colorings_checked = 0;
  std::size_t evaluations = 0;
};

struct ScanOptions {
  Rational threshold{1, 2};
  std::size_t budget = 2000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t tree_cap = kDefaultTreeCap;
  std::size_t embedding_cap = kDefaultEmbeddingCap;
};

/// For n = m..n_max: does every 0/1 colouring of T_n admit a copy of T_m with
/// oscillation <= threshold? Exhaustive where |T_n| is small, otherwise an
/// adversarial search that can only certify failure.
inline std::vector<ScanRow> scan_minimal_n(std::size_t m, std::size_t n_max, const ScanOptions& opt) {
  if (m < 1) throw DomainError("m must be positive");
  TreeCatalog catalog(opt.tree_cap);
  std::vector<ScanRow> rows;
  for (std::size_t n = m; n <= n_max; ++n) {
    EmbeddingTable table(m, n, catalog, opt.embedding_cap);
    ScanRow row;
    row.n = n;
    if (catalan(n - 1) <= kExhaustiveColoringLimit) {
      const auto sweep = exhaustive_binary_sweep(table, opt.threads);
      row.colorings_checked = sweep.colorings;
      row.oscillation = sweep.worst_oscillation;
      if (sweep.worst_oscillation > opt.threshold) {
        row.verdict = Verdict::fails;
        row.certificate_kind = "witness";
        row.witness = sweep.worst;
      } else {
        row.verdict = Verdict::suffices;
        row.certificate_kind = "exhaustive";
      }
    } else {
      // Per-level seed, so a row does not depend on which levels ran before it.
      std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                        static_cast<std::uint32_t>(n)};
      std::uint32_t words[2];
      seq.generate(words, words + 2);
      const std::uint64_t level_seed = (std::uint64_t{words[0]} << 32) | words[1];
      const auto adv = adversarial_coloring_search(table, opt.threshold, opt.budget, level_seed, opt.threads);
      row.evaluations = adv.evaluations;
      row.oscillation = adv.best_oscillation;
      if (adv.witness) {
        row.verdict = Verdict::fails;
        row.certificate_kind = "witness";
        row.witness = adv.witness;
      } else {
        row.verdict = Verdict::unknown;
        row.certificate_kind = "none";
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Strong copies t ↦ t(μ_0, ..., μ_{m-1})

struct StrongCopy {
  std::vector<Measure<Tree>> measures;
  std::vector<Rational> values;  // on T_m in canonical order
  Rational oscillation;
};

inline std::vector<Rational> strong_copy_values(const std::vector<Measure<Tree>>& mus, const Coloring& c,
                                                const std::vector<Tree>& domain) {
  std::vector<Rational> out;
  out.reserve(domain.size());
  for (const auto& t : domain) out.push_back(c(substitute_measures(t, mus, CaretOp{})));
  return out;
}

/// The convex combination of embeddings that a strong copy expands to:
/// weight Π_i μ_i(s_i) on the embedding (s_0, ..., s_{m-1}).
inline EmbeddingCopy expand_strong_copy(const std::vector<Measure<Tree>>& mus) {
  EmbeddingCopy out;
  out.weights.push_back(1);
  out.embeddings.push_back(Embedding{});
  for (const auto& mu : mus) {
    EmbeddingCopy next;
    for (std::size_t j = 0; j < out.embeddings.size(); ++j) {
      for (const auto& [s, w] : mu) {
        Embedding e = out.embeddings[j];
        e.parts.push_back(s);
        next.embeddings.push_back(std::move(e));
        next.weights.push_back(out.weights[j] * w);
      }
    }
    out = std::move(next);
  }
  return out;
}

/// With n <= m + 1 every part has size 1 or 2, where A_1 and A_2 are single
/// points, so the strong copies are exactly the embeddings.
inline bool strong_copies_are_pure(std::size_t m, std::size_t n) { return n <= m + 1; }

struct StrongSearchResult {
  std::optional<StrongCopy> best;
  std::size_t evaluations = 0;
  std::size_t restarts = 0;
  bool exhaustive = false;  // best is the true minimum over all strong copies
};

struct StrongSearchOptions {
  std::size_t budget = 200;  // LP solves
  std::uint64_t seed = 0;
  std::size_t tree_cap = kDefaultTreeCap;
};

inline StrongSearchResult strong_copy_search(const Coloring& c, std::size_t m, const StrongSearchOptions& opt) {
  const std::size_t n = c.n();
  if (m < 1 || m > n) throw DomainError("need 1 <= m <= n for strong copies");
  TreeCatalog catalog(opt.tree_cap);
  const std::vector<Tree> domain = catalog.trees(m);
  StrongSearchResult out;

  auto consider = [&](std::vector<Measure<Tree>> mus) {
    StrongCopy sc;
    sc.values = strong_copy_values(mus, c, domain);
    sc.oscillation = spread(sc.values);
    sc.measures = std::move(mus);
    if (!out.best || sc.oscillation < out.best->oscillation) out.best = std::move(sc);
  };

  if (strong_copies_are_pure(m, n)) {
    out.exhaustive = true;
    for (const auto& e : enumerate_embeddings(m, n, catalog)) {
      std::vector<Measure<Tree>> mus;
      for (const auto& u : e.parts) mus.push_back(Measure<Tree>::point(u));
      consider(std::move(mus));
      ++out.evaluations;
    }
    return out;
  }

  std::mt19937_64 rng(opt.seed);
  while (out.evaluations < opt.budget && !(out.best && sgn(out.best->oscillation) == 0)) {
    ++out.restarts;
    // Uniform composition: m-1 distinct cut points among 1..n-1.
    std::vector<std::size_t> cuts(n - 1);
    for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i] = i + 1;
    for (std::size_t i = 0; i + 1 < m; ++i) std::swap(cuts[i], cuts[i + uniform_index(rng, cuts.size() - i)]);
    std::vector<std::size_t> chosen(cuts.begin(), cuts.begin() + static_cast<long>(m - 1));
    std::sort(chosen.begin(), chosen.end());
    std::vector<std::size_t> sizes;
    std::size_t prev = 0;
    for (std::size_t cut : chosen) {
      sizes.push_back(cut - prev);
      prev = cut;
    }
    sizes.push_back(n - prev);

    std::vector<Measure<Tree>> mus;
    for (std::size_t sz : sizes) {
      const auto& pool = catalog.trees(sz);
      mus.push_back(Measure<Tree>::point(pool[uniform_index(rng, pool.size())]));
    }
    Rational current = spread(strong_copy_values(mus, c, domain));
    consider(mus);

    bool improved = true;
    while (improved && out.evaluations < opt.budget && sgn(current) != 0) {
      improved = false;
      for (std::size_t i = 0; i < m && out.evaluations < opt.budget; ++i) {
        const auto& pool = catalog.trees(sizes[i]);
        if (pool.size() == 1) continue;
        ValueMatrix columns;
        columns.reserve(pool.size());
        auto trial = mus;
        for (const auto& s : pool) {
          trial[i] = Measure<Tree>::point(s);
          columns.push_back(strong_copy_values(trial, c, domain));
        }
        const auto opt_i = min_oscillation_columns(columns);
        ++out.evaluations;
        if (opt_i.oscillation < current) {
          std::map<Tree, Rational> w;
          for (std::size_t s = 0; s < pool.size(); ++s)
            if (sgn(opt_i.weights[s]) != 0) w.emplace(pool[s], opt_i.weights[s]);
          mus[i] = Measure<Tree>::from_normalized(std::move(w));
          current = opt_i.oscillation;
          improved = true;
          consider(mus);
        }
      }
    }
  }
  return out;
}

}  // namespace caretlab
