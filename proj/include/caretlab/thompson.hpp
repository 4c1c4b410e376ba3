#pragma once

// Thompson's group F as reduced tree pairs (s -> t): the piecewise linear map
// sending the dyadic subdivision of s onto that of t.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caretlab/measure.hpp"
#include "caretlab/tree.hpp"

namespace caretlab {

namespace detail {

inline void exposed_carets_from(const Tree& t, std::size_t first_leaf, std::vector<std::size_t>& out) {
  if (t.is_leaf()) return;
  if (t.left().is_leaf() && t.right().is_leaf()) {
    out.push_back(first_leaf);
    return;
  }
  exposed_carets_from(t.left(), first_leaf, out);
  exposed_carets_from(t.right(), first_leaf + t.left().size(), out);
}

/// Leaf indices i such that leaves i and i+1 hang from a common caret.
inline std::vector<std::size_t> exposed_carets(const Tree& t) {
  std::vector<std::size_t> out;
  exposed_carets_from(t, 0, out);
  return out;
}

/// Replaces the exposed caret whose left leaf has index `leaf` by a leaf.
inline Tree collapse_caret(const Tree& t, std::size_t leaf) {
  if (t.is_leaf()) throw DomainError("no exposed caret at leaf " + std::to_string(leaf));
  if (leaf == 0 && t.left().is_leaf() && t.right().is_leaf()) return Tree::leaf();
  const std::size_t left_n = t.left().size();
  if (leaf < left_n) return caret(collapse_caret(t.left(), leaf), t.right());
  return caret(t.left(), collapse_caret(t.right(), leaf - left_n));
}

/// The subtrees of `fine` hanging at each leaf of `coarse`, or nullopt when
/// `fine` does not refine `coarse`.
inline bool split_into(const Tree& coarse, const Tree& fine, std::vector<Tree>& out) {
  if (coarse.is_leaf()) {
    out.push_back(fine);
    return true;
  }
  if (fine.is_leaf()) return false;
  return split_into(coarse.left(), fine.left(), out) && split_into(coarse.right(), fine.right(), out);
}

inline std::optional<std::vector<Tree>> split(const Tree& coarse, const Tree& fine) {
  std::vector<Tree> out;
  if (!split_into(coarse, fine, out)) return std::nullopt;
  return out;
}

/// Smallest common refinement of two dyadic subdivisions.
inline Tree tree_union(const Tree& a, const Tree& b) {
  if (a.is_leaf()) return b;
  if (b.is_leaf()) return a;
  return caret(tree_union(a.left(), b.left()), tree_union(a.right(), b.right()));
}

}  // namespace detail

class FElement {
 public:
  /// The identity (1 -> 1).
  FElement() = default;

  /// Reduced representative of the map (s -> t): matching exposed carets are
  /// cancelled, leftmost first, until none remain.
  static FElement from_tree_pair(Tree s, Tree t) {
    if (s.size() != t.size()) {
      throw DomainError("tree pair sizes differ: " + std::to_string(s.size()) + " vs " + std::to_string(t.size()));
    }
    for (;;) {
      const auto in_s = detail::exposed_carets(s);
      const auto in_t = detail::exposed_carets(t);
      std::optional<std::size_t> common;
      for (std::size_t i : in_s) {
        if (std::find(in_t.begin(), in_t.end(), i) != in_t.end()) {
          common = i;
          break;
        }
      }
      if (!common) break;
      s = detail::collapse_caret(s, *common);
      t = detail::collapse_caret(t, *common);
    }
    FElement f;
    f.domain_ = std::move(s);
    f.range_ = std::move(t);
    return f;
  }

  const Tree& domain() const noexcept { return domain_; }
  const Tree& range() const noexcept { return range_; }
  bool is_identity() const noexcept { return domain_.is_leaf(); }

  friend bool operator==(const FElement&, const FElement&) = default;

 private:
  Tree domain_;
  Tree range_;
};

inline FElement invert(const FElement& f) { return FElement::from_tree_pair(f.range(), f.domain()); }

/// f ∘ g (g acts first). Both pairs are expanded until g's range equals f's
/// domain, then the outer trees are paired and reduced.
inline FElement compose(const FElement& f, const FElement& g) {
  const Tree common = detail::tree_union(g.range(), f.domain());
  const auto under_g = detail::split(g.range(), common);
  const auto under_f = detail::split(f.domain(), common);
  const Tree new_domain = substitute(g.domain(), *under_g);
  const Tree new_range = substitute(f.range(), *under_f);
  return FElement::from_tree_pair(new_domain, new_range);
}

inline FElement power(const FElement& f, long long exponent) {
  FElement base = exponent < 0 ? invert(f) : f;
  FElement out;
  for (long long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) out = compose(out, base);
  return out;
}

inline constexpr std::size_t kDefaultGeneratorCap = 64;

/// x_0 and x_1 as literal pairs; x_{k+1} = x_0^k x_1 x_0^{-k} for k >= 1.
inline FElement generator(std::size_t k, std::size_t cap = kDefaultGeneratorCap) {
  if (k > cap) throw CapExceeded("generator index " + std::to_string(k) + " exceeds cap " + std::to_string(cap));
  const Tree one;
  const Tree x0_domain = caret(caret(one, one), one);
  const Tree x0_range = caret(one, caret(one, one));
  if (k == 0) return FElement::from_tree_pair(x0_domain, x0_range);
  const FElement x1 = FElement::from_tree_pair(caret(one, x0_domain), caret(one, x0_range));
  if (k == 1) return x1;
  const FElement x0 = generator(0);
  const auto shift = static_cast<long long>(k - 1);
  return compose(power(x0, shift), compose(x1, power(x0, -shift)));
}

/// f · t: defined when t refines the domain tree of f; the subtrees of t at
/// the domain's leaves are carried over to the range's leaves.
inline std::optional<Tree> partial_apply(const FElement& f, const Tree& t) {
  auto pieces = detail::split(f.domain(), t);
  if (!pieces) return std::nullopt;
  return substitute(f.range(), *pieces);
}

struct InvarianceDefect {
  Rational undefined_mass;
  Rational tv_defect;  // sup over sets of |μ_def(E) − (f·μ_def)(E)|
};

inline InvarianceDefect invariance_defect(const Measure<Tree>& mu, const FElement& f) {
  InvarianceDefect out;
  std::map<Tree, Rational> diff;
  for (const auto& [t, w] : mu) {
    auto image = partial_apply(f, t);
    if (!image) {
      out.undefined_mass += w;
      continue;
    }
    diff[t] += w;
    diff[*image] -= w;
  }
  Rational total = 0;
  for (const auto& [t, d] : diff) total += abs_rational(d);
  out.tv_defect = total / 2;
  return out;
}

inline std::string format_felement(const FElement& f) {
  return format_tree(f.domain()) + " -> " + format_tree(f.range());
}

/// "s -> t" (reduced on parse) or a generator name "x<k>".
inline FElement parse_felement(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.size() >= 2 && text[0] == 'x' && text.find_first_not_of("0123456789", 1) == std::string_view::npos) {
    return generator(std::stoul(std::string(text.substr(1))));
  }
  const auto arrow = text.find("->");
  if (arrow == std::string_view::npos) throw ParseError("expected 's -> t' or a generator name like x0", 0);
  std::string_view lhs = text.substr(0, arrow);
  std::string_view rhs = text.substr(arrow + 2);
  while (!lhs.empty() && lhs.back() == ' ') lhs.remove_suffix(1);
  std::size_t skipped = 0;
  while (!rhs.empty() && rhs.front() == ' ') {
    rhs.remove_prefix(1);
    ++skipped;
  }
  Tree s, t;
  try {
    s = parse_tree(lhs);
  } catch (const ParseError& e) {
    throw ParseError(std::string("in domain tree: ") + e.what(), e.position());
  }
  try {
    t = parse_tree(rhs);
  } catch (const ParseError& e) {
    throw ParseError(std::string("in range tree: ") + e.what(), arrow + 2 + skipped + e.position());
  }
  return FElement::from_tree_pair(std::move(s), std::move(t));
}

}  // namespace caretlab
