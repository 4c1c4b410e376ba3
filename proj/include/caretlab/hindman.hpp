#pragma once

// Homomorphisms from the free binary system into finite magmas, quotient
// systems induced by labelings of trees, and the quotient-scale construction
// of sequences μ_i with c(μ_i) and c(μ_i ^ μ_j) pinned near a common value.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "caretlab/idempotent.hpp"
#include "caretlab/magma.hpp"
#include "caretlab/measure.hpp"
#include "caretlab/tree.hpp"

namespace caretlab {

/// ev(1) = g, ev(a^b) = ev(a) ⋆ ev(b). T is free, so this is the unique
/// homomorphism sending the generator to g.
class EvaluationHom {
 public:
  EvaluationHom(Magma magma, Element generator) : magma_(std::move(magma)), generator_(generator) {
    if (!magma_.contains(generator_)) throw DomainError("generator is outside the magma carrier");
  }

  Element operator()(const Tree& t) const {
    if (t.is_leaf()) return generator_;
    return magma_((*this)(t.left()), (*this)(t.right()));
  }

  const Magma& magma() const noexcept { return magma_; }
  Element generator() const noexcept { return generator_; }

 private:
  Magma magma_;
  Element generator_;
};

/// R_m = ev(T_m) for m = 1..max_size, with eventual periodicity when detected.
struct ReachableSets {
  std::vector<std::vector<Element>> by_size;  // index 0 unused; each set ascending
  std::optional<std::size_t> start;           // m0: R_m = R_{m+period} for m0 <= m <= cap - period
  std::optional<std::size_t> period;
  std::size_t cap = 0;

  const std::vector<Element>& at(std::size_t m) const { return by_size.at(m); }
};

namespace detail {

struct SplitWitness {
  std::size_t left_size;
  Element left;
  Element right;
};

/// R_m and, for every reachable value, the first split (in descending
/// left-size order) producing it.
class ReachabilityTable {
 public:
  ReachabilityTable(const Magma& m, Element g) : magma_(m) {
    sets_.push_back({});
    splits_.push_back({});
    sets_.push_back({g});
    splits_.push_back({});
  }

  void grow_to(std::size_t n) {
    while (sets_.size() <= n) {
      const std::size_t m = sets_.size();
      std::map<Element, SplitWitness> found;
      for (std::size_t i = m - 1; i >= 1; --i) {
        for (Element x : sets_[i]) {
          for (Element y : sets_[m - i]) found.emplace(magma_(x, y), SplitWitness{i, x, y});
        }
      }
      std::vector<Element> set;
      for (const auto& [e, w] : found) set.push_back(e);
      sets_.push_back(std::move(set));
      splits_.push_back(std::move(found));
    }
  }

  const std::vector<Element>& set(std::size_t m) {
    grow_to(m);
    return sets_[m];
  }

  /// A tree of size m with ev = value, or nullopt when value ∉ R_m.
  std::optional<Tree> witness(std::size_t m, Element value) {
    grow_to(m);
    if (m == 1) {
      if (sets_[1].front() == value) return Tree::leaf();
      return std::nullopt;
    }
    auto key = std::make_pair(m, value);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto it = splits_[m].find(value);
    if (it == splits_[m].end()) return std::nullopt;
    const SplitWitness w = it->second;
    Tree t = caret(*witness(w.left_size, w.left), *witness(m - w.left_size, w.right));
    memo_.emplace(key, t);
    return t;
  }

 private:
  Magma magma_;
  std::vector<std::vector<Element>> sets_;
  std::vector<std::map<Element, SplitWitness>> splits_;
  std::map<std::pair<std::size_t, Element>, Tree> memo_;
};

}  // namespace detail

/// R_m for m <= cap. Since every tree of size m >= 2 is a^b with #a + #b = m,
/// R_m is exactly the union of R_i ⋆ R_{m-i}; no enumeration of T_m is needed.
/// The reported period is the smallest p whose stable window [m0, cap - p]
/// covers at least one full period, with m0 minimal for that p.
inline ReachableSets reachable_sets(const Magma& m, Element g, std::size_t cap = kDefaultTreeCap) {
  if (!m.contains(g)) throw DomainError("generator is outside the magma carrier");
  if (cap == 0) throw DomainError("cap must be positive");
  detail::ReachabilityTable table(m, g);
  table.grow_to(cap);
  ReachableSets out;
  out.cap = cap;
  out.by_size.push_back({});
  for (std::size_t s = 1; s <= cap; ++s) out.by_size.push_back(table.set(s));
  for (std::size_t p = 1; 2 * p <= cap; ++p) {
    // Smallest m0 with R_m = R_{m+p} for all m0 <= m <= cap - p.
    std::size_t m0 = cap - p + 1;
    while (m0 > 1 && out.by_size[m0 - 1] == out.by_size[m0 - 1 + p]) --m0;
    if (m0 <= cap - p && (cap - p) - m0 + 1 >= p) {
      out.start = m0;
      out.period = p;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quotient systems

struct QuotientViolation {
  Tree a, b;          // label(a^b) = first_value
  Tree a2, b2;        // same labels as (a, b), but label(a2^b2) = second_value
  std::size_t first_value = 0;
  std::size_t second_value = 0;
};

struct QuotientResult {
  std::optional<Magma> magma;
  std::vector<bool> determined;  // row-major, whether some (a, b) fixed the entry
  std::optional<QuotientViolation> violation;
};

using TreeLabel = std::function<std::optional<std::size_t>(const Tree&)>;

/// Tries to induce ⋆ on atom labels: atom(a^b) must depend only on
/// (atom(a), atom(b)) for all a, b with sizes in large_sizes and #a + #b <= max_size.
/// Entries no pair determines are left 0 and flagged in `determined`.
inline QuotientResult quotient_system(const TreeLabel& label, std::size_t max_size, std::vector<std::size_t> large_sizes,
                                      TreeCatalog& catalog) {
  if (large_sizes.empty())
    for (std::size_t s = 2; s <= max_size; ++s) large_sizes.push_back(s);
  std::sort(large_sizes.begin(), large_sizes.end());

  auto label_of = [&](const Tree& t) {
    auto v = label(t);
    if (!v) throw DomainError("label is undefined on tree " + format_tree(t));
    return *v;
  };
  std::size_t atoms = 0;
  for (std::size_t s = 1; s <= max_size; ++s)
    for (const Tree& t : catalog.trees(s)) atoms = std::max(atoms, label_of(t) + 1);

  struct Entry {
    std::size_t value;
    Tree a, b;
  };
  std::map<std::pair<std::size_t, std::size_t>, Entry> entries;
  QuotientResult out;
  for (std::size_t sa : large_sizes) {
    for (std::size_t sb : large_sizes) {
      if (sa + sb > max_size) continue;
      for (const Tree& a : catalog.trees(sa)) {
        const std::size_t la = label_of(a);
        for (const Tree& b : catalog.trees(sb)) {
          const std::size_t lb = label_of(b);
          const std::size_t v = label_of(caret(a, b));
          auto [it, inserted] = entries.try_emplace({la, lb}, Entry{v, a, b});
          if (!inserted && it->second.value != v) {
            out.violation = QuotientViolation{it->second.a, it->second.b, a, b, it->second.value, v};
            return out;
          }
        }
      }
    }
  }
  std::vector<Element> table(atoms * atoms, 0);
  out.determined.assign(atoms * atoms, false);
  for (const auto& [key, e] : entries) {
    table[key.first * atoms + key.second] = static_cast<Element>(e.value);
    out.determined[key.first * atoms + key.second] = true;
  }
  out.magma = Magma(atoms, std::move(table));
  return out;
}

// ---------------------------------------------------------------------------
// Pair engine

class EngineFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairCheck {
  std::size_t i = 0, j = 0;  // j == 0 marks the single-measure check c(μ_i)
  Rational value;
  Rational deviation;  // |value - r|
};

struct HindmanPairs {
  Rational r;
  std::size_t block = 0;       // μ_i lives on T_{i * block}
  std::vector<Element> core;   // R_block, closed under ⋆
  Measure<Element> nu = Measure<Element>::point(0);  // rationalized idempotent on `core`, original labels
  Rational nu_residual;        // ‖ν⋆ν − ν‖_∞ on the core
  Rational rounding_l1;        // ‖ν̃ − ν‖₁
  std::vector<Measure<Tree>> mus;
  std::vector<PairCheck> checks;
  Rational max_deviation;
  bool certified = false;
  SolveReport solve;
};

struct PairEngineOptions {
  std::size_t cap = kDefaultTreeCap;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 10000;
};

/// For the coloring c = f ∘ ev builds r and μ_1, μ_2, ... with
/// |c(μ_i) − r| < ε and |c(μ_i ^ μ_j) − r| < ε for i < j. Sizes are multiples
/// of a block size on which the reachable sets have stabilized, so
/// R* = R_block is a sub-magma; the μ_i transport an idempotent of R* back to
/// trees. The certificate is recomputed on the tree measures themselves.
inline HindmanPairs hindman_pair_engine(const Magma& m, Element g, const std::vector<Rational>& f, const Rational& eps,
                                        std::size_t count, const PairEngineOptions& opt = {}) {
  if (eps <= 0) throw DomainError("epsilon must be positive");
  if (f.size() != m.order()) throw DomainError("f must assign a value to every magma element");
  for (const auto& v : f)
    if (v < 0 || v > 1) throw DomainError("f must take values in [0,1]");
  if (count == 0) throw DomainError("count must be positive");

  const ReachableSets rs = reachable_sets(m, g, opt.cap);
  if (!rs.start) {
    throw EngineFailure("reachable sets did not stabilize within size cap " + std::to_string(opt.cap));
  }
  HindmanPairs out;
  out.block = ((*rs.start + *rs.period - 1) / *rs.period) * *rs.period;
  out.core = rs.at(out.block);

  const Magma sub = m.restrict_to(out.core);
  const Rational budget = eps / 8;
  SolveOptions so;
  so.seed = opt.seed;
  so.max_iterations = opt.max_iterations;
  so.tol = std::min(budget.get_d(), 1e-9);
  out.solve = find_idempotent(sub, so);
  if (out.solve.residual > budget) {
    throw EngineFailure("no idempotent on the stabilized core within residual " + format_rational(budget));
  }
  out.nu_residual = out.solve.residual;
  out.rounding_l1 = 0;
  for (std::size_t s = 0; s < out.core.size(); ++s) {
    out.rounding_l1 += abs_rational(out.solve.measure.weight(static_cast<Element>(s)) - Rational(out.solve.float_weights[s]));
  }
  if (out.rounding_l1 > budget) throw EngineFailure("rationalization moved the idempotent by more than eps/8");

  std::map<Element, Rational> relabeled;
  for (const auto& [s, w] : out.solve.measure) relabeled.emplace(out.core[s], w);
  out.nu = Measure<Element>::from_normalized(std::move(relabeled));
  out.r = evaluate([&](Element s) { return f[s]; }, out.nu);

  detail::ReachabilityTable table(m, g);
  for (std::size_t i = 1; i <= count; ++i) {
    const std::size_t size = i * out.block;
    std::map<Tree, Rational> weights;
    for (const auto& [s, w] : out.nu) {
      auto t = table.witness(size, s);
      if (!t) {
        throw EngineFailure("element " + std::to_string(s) + " is not reachable in T_" + std::to_string(size));
      }
      weights[*t] += w;
    }
    out.mus.push_back(Measure<Tree>::from_normalized(std::move(weights)));
  }

  const EvaluationHom ev(m, g);
  auto color = [&](const Tree& t) { return f[ev(t)]; };
  out.certified = true;
  out.max_deviation = 0;
  auto record = [&](std::size_t i, std::size_t j, Rational value) {
    Rational dev = abs_rational(value - out.r);
    if (dev >= eps) out.certified = false;
    if (dev > out.max_deviation) out.max_deviation = dev;
    out.checks.push_back({i, j, std::move(value), std::move(dev)});
  };
  for (std::size_t i = 0; i < count; ++i) record(i + 1, 0, evaluate(color, out.mus[i]));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      record(i + 1, j + 1, evaluate(color, convolve(CaretOp{}, out.mus[i], out.mus[j])));
    }
  }
  return out;
}

}  // namespace caretlab
