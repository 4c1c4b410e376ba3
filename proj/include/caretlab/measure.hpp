#pragma once

// Finitely supported probability measures with exact rational weights over
// any ordered carrier, and the bilinear operations on them.

#include <cassert>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "caretlab/errors.hpp"
#include "caretlab/rational.hpp"
#include "caretlab/tree.hpp"

namespace caretlab {

/// Probability measure with finite support. Stored weights are strictly
/// positive and sum to exactly 1; iteration follows the carrier's order, which
/// makes every reduction below deterministic.
template <class E>
class Measure {
 public:
  using element_type = E;
  using weight_map = std::map<E, Rational>;

  static Measure point(E x) {
    Measure m;
    m.weights_.emplace(std::move(x), Rational(1));
    return m;
  }

  /// Caller guarantees positivity and unit mass (checked in debug builds).
  static Measure from_normalized(weight_map weights) {
    Measure m;
    m.weights_ = std::move(weights);
    std::erase_if(m.weights_, [](const auto& kv) { return kv.second == 0; });
#ifndef NDEBUG
    Rational total = 0;
    for (const auto& [x, w] : m.weights_) {
      assert(w > 0);
      total += w;
    }
    assert(total == 1);
#endif
    return m;
  }

  const weight_map& weights() const noexcept { return weights_; }
  std::size_t support_size() const noexcept { return weights_.size(); }
  auto begin() const { return weights_.begin(); }
  auto end() const { return weights_.end(); }

  Rational weight(const E& x) const {
    auto it = weights_.find(x);
    return it == weights_.end() ? Rational(0) : it->second;
  }

  bool contains(const E& x) const { return weights_.count(x) != 0; }

  friend bool operator==(const Measure& a, const Measure& b) { return a.weights_ == b.weights_; }

 private:
  weight_map weights_;
};

/// Builds a measure from (element, weight) pairs. Repeated elements are merged,
/// zero weights dropped. Weights must already sum to 1.
template <class E>
Measure<E> make_measure(std::span<const std::pair<E, Rational>> pairs) {
  std::map<E, Rational> acc;
  Rational total = 0;
  for (const auto& [x, w] : pairs) {
    if (w < 0) throw DomainError("negative weight " + format_rational(w));
    total += w;
    if (w != 0) acc[x] += w;
  }
  if (total != 1) throw DomainError("weights sum to " + format_rational(total) + ", expected 1/1");
  return Measure<E>::from_normalized(std::move(acc));
}

template <class E>
Measure<E> make_measure(std::initializer_list<std::pair<E, Rational>> pairs) {
  return make_measure<E>(std::span<const std::pair<E, Rational>>(pairs.begin(), pairs.size()));
}

template <class E>
Measure<E> make_measure(const std::vector<std::pair<E, Rational>>& pairs) {
  return make_measure<E>(std::span<const std::pair<E, Rational>>(pairs));
}

/// (μ ⊗ ν)({(x,y)}) = μ({x}) ν({y}).
template <class A, class B>
Measure<std::pair<A, B>> tensor(const Measure<A>& mu, const Measure<B>& nu) {
  std::map<std::pair<A, B>, Rational> out;
  for (const auto& [x, wx] : mu) {
    for (const auto& [y, wy] : nu) out.emplace_hint(out.end(), std::pair<A, B>(x, y), wx * wy);
  }
  return Measure<std::pair<A, B>>::from_normalized(std::move(out));
}

/// The free caret as a binary system on Tree.
struct CaretOp {
  Tree operator()(const Tree& a, const Tree& b) const { return caret(a, b); }
};

/// μ ⋆ ν: pushforward of μ ⊗ ν along op.
template <class E, class Op>
Measure<E> convolve(const Op& op, const Measure<E>& mu, const Measure<E>& nu) {
  std::map<E, Rational> out;
  for (const auto& [x, wx] : mu) {
    for (const auto& [y, wy] : nu) out[op(x, y)] += wx * wy;
  }
  return Measure<E>::from_normalized(std::move(out));
}

namespace detail {

template <class E, class Op>
Measure<E> substitute_measures_from(const Tree& t, std::span<const Measure<E>> mus, std::size_t& next,
                                    const Op& op) {
  if (t.is_leaf()) return mus[next++];
  Measure<E> left = substitute_measures_from(t.left(), mus, next, op);
  Measure<E> right = substitute_measures_from(t.right(), mus, next, op);
  return convolve(op, left, right);
}

}  // namespace detail

/// t(μ_0, ..., μ_{m-1}): the multilinear extension of substitution, folded
/// bottom-up through convolve.
template <class E, class Op>
Measure<E> substitute_measures(const Tree& t, std::span<const Measure<E>> mus, const Op& op) {
  if (mus.size() != t.size()) {
    throw DomainError("substitute_measures needs " + std::to_string(t.size()) + " measures, got " +
                      std::to_string(mus.size()));
  }
  std::size_t next = 0;
  return detail::substitute_measures_from(t, mus, next, op);
}

template <class E, class Op>
Measure<E> substitute_measures(const Tree& t, const std::vector<Measure<E>>& mus, const Op& op) {
  return substitute_measures(t, std::span<const Measure<E>>(mus), op);
}

/// Σ μ({x}) c(x). c is a map (missing support points are an error) or a callable.
template <class E>
Rational evaluate(const std::map<E, Rational>& c, const Measure<E>& mu) {
  Rational total = 0;
  for (const auto& [x, w] : mu) {
    auto it = c.find(x);
    if (it == c.end()) throw DomainError("function undefined on a support point of the measure");
    total += w * it->second;
  }
  return total;
}

template <class E, class F>
  requires std::is_invocable_v<const F&, const E&>
Rational evaluate(const F& c, const Measure<E>& mu) {
  Rational total = 0;
  for (const auto& [x, w] : mu) total += w * Rational(c(x));
  return total;
}

namespace detail {

template <class T>
struct is_optional : std::false_type {};
template <class T>
struct is_optional<std::optional<T>> : std::true_type {};

}  // namespace detail

/// φ_*μ. φ may return std::optional; an empty result on the support throws.
template <class E, class F>
auto pushforward(const F& phi, const Measure<E>& mu) {
  using Raw = std::decay_t<std::invoke_result_t<const F&, const E&>>;
  if constexpr (detail::is_optional<Raw>::value) {
    using R = typename Raw::value_type;
    std::map<R, Rational> out;
    for (const auto& [x, w] : mu) {
      auto y = phi(x);
      if (!y) throw DomainError("map undefined on a support point of the measure");
      out[std::move(*y)] += w;
    }
    return Measure<R>::from_normalized(std::move(out));
  } else {
    std::map<Raw, Rational> out;
    for (const auto& [x, w] : mu) out[phi(x)] += w;
    return Measure<Raw>::from_normalized(std::move(out));
  }
}

/// μ(E) for a finite set or a predicate.
template <class E>
Rational mass_of(const Measure<E>& mu, const std::set<E>& set) {
  Rational total = 0;
  for (const auto& [x, w] : mu) {
    if (set.count(x)) total += w;
  }
  return total;
}

template <class E, class Pred>
  requires std::is_invocable_r_v<bool, const Pred&, const E&>
Rational mass_of(const Measure<E>& mu, const Pred& in_set) {
  Rational total = 0;
  for (const auto& [x, w] : mu) {
    if (in_set(x)) total += w;
  }
  return total;
}

/// ‖μ − ν‖_B = max over E in B of |μ(E) − ν(E)|; 0 for an empty family.
template <class E, class Family>
Rational seminorm_b(const Measure<E>& mu, const Measure<E>& nu, const Family& family) {
  Rational best = 0;
  for (const auto& set : family) {
    const Rational d = abs_rational(mass_of(mu, set) - mass_of(nu, set));
    if (d > best) best = d;
  }
  return best;
}

/// #(μ): the common size of the support trees, absent for mixed sizes.
inline std::optional<std::size_t> common_size(const Measure<Tree>& mu) {
  std::optional<std::size_t> n;
  for (const auto& [t, w] : mu) {
    if (n && *n != t.size()) return std::nullopt;
    n = t.size();
  }
  return n;
}

/// Uniform measure on a nonempty list of distinct elements.
template <class E>
Measure<E> uniform_measure(std::span<const E> xs) {
  if (xs.empty()) throw DomainError("uniform measure needs a nonempty support");
  std::map<E, Rational> out;
  const Rational w(1, static_cast<unsigned long>(xs.size()));
  for (const auto& x : xs) {
    if (!out.emplace(x, w).second) throw DomainError("uniform measure support has duplicates");
  }
  return Measure<E>::from_normalized(std::move(out));
}

template <class E>
Measure<E> uniform_measure(const std::vector<E>& xs) {
  return uniform_measure(std::span<const E>(xs));
}

}  // namespace caretlab
