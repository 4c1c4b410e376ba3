#pragma once

// The free binary system on one generator: rooted ordered binary trees under
// the caret operation, with the attributes and pruning machinery used by the
// rest of the library.

#include <compare>
#include <cstddef>
#include <deque>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caretlab/errors.hpp"
#include "caretlab/rational.hpp"

namespace caretlab {

inline constexpr std::size_t kDefaultTreeCap = 16;

/// Immutable binary tree; the default value is the generator `1` (a leaf).
/// Subtrees are shared, so copies are cheap.
class Tree {
 public:
  Tree() = default;

  static Tree leaf() { return Tree(); }
  static Tree caret(Tree left, Tree right);

  bool is_leaf() const noexcept { return node_ == nullptr; }
  std::size_t size() const noexcept;
  /// Precondition: !is_leaf().
  const Tree& left() const;
  const Tree& right() const;

  friend bool operator==(const Tree& a, const Tree& b) noexcept;
  /// Canonical order: size ascending; within a size, left-subtree size
  /// descending, then left subtree, then right subtree. Within T_n this is
  /// exactly the enumeration order of enumerate_trees.
  friend std::strong_ordering operator<=>(const Tree& a, const Tree& b) noexcept;

 private:
  struct Node;
  explicit Tree(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Tree::Node {
  Tree left;
  Tree right;
  std::size_t size;
};

inline Tree Tree::caret(Tree left, Tree right) {
  const std::size_t n = left.size() + right.size();
  return Tree(std::make_shared<const Node>(Node{std::move(left), std::move(right), n}));
}

inline std::size_t Tree::size() const noexcept { return node_ ? node_->size : 1; }

inline const Tree& Tree::left() const {
  if (!node_) throw DomainError("leaf has no left subtree");
  return node_->left;
}

inline const Tree& Tree::right() const {
  if (!node_) throw DomainError("leaf has no right subtree");
  return node_->right;
}

inline bool operator==(const Tree& a, const Tree& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->size != b.node_->size) return false;
  return a.node_->left == b.node_->left && a.node_->right == b.node_->right;
}

inline std::strong_ordering operator<=>(const Tree& a, const Tree& b) noexcept {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  // Same size >= 2 from here (two leaves share the null node).
  if (auto c = b.node_->left.size() <=> a.node_->left.size(); c != 0) return c;
  if (auto c = a.node_->left <=> b.node_->left; c != 0) return c;
  return a.node_->right <=> b.node_->right;
}

inline Tree caret(const Tree& a, const Tree& b) { return Tree::caret(a, b); }

// ---------------------------------------------------------------------------
// Text codec: t := "1" | "(" t " " t ")"

inline void format_tree_to(const Tree& t, std::string& out) {
  if (t.is_leaf()) {
    out += '1';
    return;
  }
  out += '(';
  format_tree_to(t.left(), out);
  out += ' ';
  format_tree_to(t.right(), out);
  out += ')';
}

inline std::string format_tree(const Tree& t) {
  std::string out;
  out.reserve(4 * t.size());
  format_tree_to(t, out);
  return out;
}

namespace detail {

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  Tree parse_all() {
    Tree t = parse();
    if (pos_ != text_.size()) fail("trailing characters after tree");
    return t;
  }

 private:
  Tree parse() {
    if (pos_ >= text_.size()) fail("unexpected end of input, expected '1' or '('");
    const char ch = text_[pos_];
    if (ch == '1') {
      ++pos_;
      return Tree::leaf();
    }
    if (ch != '(') fail(std::string("unexpected character '") + ch + "', expected '1' or '('");
    ++pos_;
    Tree left = parse();
    expect(' ');
    Tree right = parse();
    expect(')');
    return Tree::caret(std::move(left), std::move(right));
  }

  void expect(char want) {
    if (pos_ >= text_.size()) fail(std::string("unexpected end of input, expected '") + want + "'");
    if (text_[pos_] != want) {
      fail(std::string("unexpected character '") + text_[pos_] + "', expected '" + want + "'");
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Tree parse_tree(std::string_view text) { return detail::TreeParser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Combinatorics of T_n

/// Catalan(n) = |T_{n+1}| for n <= 35 (fits in 64 bits).
inline std::uint64_t catalan(std::size_t n) {
  if (n > 35) throw CapExceeded("catalan(" + std::to_string(n) + ") overflows 64 bits");
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

/// Position of t among the trees of its size in canonical order.
inline std::size_t tree_rank(const Tree& t) {
  if (t.is_leaf()) return 0;
  const std::size_t n = t.size();
  const std::size_t left_n = t.left().size();
  std::size_t offset = 0;
  for (std::size_t i = n - 1; i > left_n; --i) offset += catalan(i - 1) * catalan(n - i - 1);
  return offset + tree_rank(t.left()) * catalan(n - left_n - 1) + tree_rank(t.right());
}

/// Caches T_1..T_n in canonical order. Not thread-safe while growing; build the
/// sizes you need up front and then share it read-only.
class TreeCatalog {
 public:
  explicit TreeCatalog(std::size_t cap = kDefaultTreeCap) : cap_(cap) { by_size_.push_back({}); }

  std::size_t cap() const noexcept { return cap_; }

  const std::vector<Tree>& trees(std::size_t n) {
    if (n == 0) throw DomainError("tree size must be positive");
    if (n > cap_) {
      throw CapExceeded("tree size " + std::to_string(n) + " exceeds cap " + std::to_string(cap_));
    }
    while (by_size_.size() <= n) extend();
    return by_size_[n];
  }

  /// Position of t in trees(t.size()).
  std::size_t index_of(const Tree& t) const { return tree_rank(t); }

 private:
  void extend() {
    const std::size_t n = by_size_.size();
    std::vector<Tree> level;
    if (n == 1) {
      level.push_back(Tree::leaf());
    } else {
      level.reserve(catalan(n - 1));
      for (std::size_t i = n - 1; i >= 1; --i) {
        for (const Tree& a : by_size_[i]) {
          for (const Tree& b : by_size_[n - i]) level.push_back(Tree::caret(a, b));
        }
      }
    }
    by_size_.push_back(std::move(level));
  }

  std::size_t cap_;
  std::deque<std::vector<Tree>> by_size_;  // deque: returned levels stay valid as it grows
};

/// All of T_n in canonical order.
inline std::vector<Tree> enumerate_trees(std::size_t n, std::size_t cap = kDefaultTreeCap) {
  TreeCatalog catalog(cap);
  return catalog.trees(n);
}

inline Tree left_comb(std::size_t n) {
  if (n == 0) throw DomainError("tree size must be positive");
  Tree t;
  for (std::size_t i = 1; i < n; ++i) t = caret(t, Tree::leaf());
  return t;
}

inline Tree right_comb(std::size_t n) {
  if (n == 0) throw DomainError("tree size must be positive");
  Tree t;
  for (std::size_t i = 1; i < n; ++i) t = caret(Tree::leaf(), t);
  return t;
}

// ---------------------------------------------------------------------------
// Attributes

struct TreeStats {
  std::size_t size = 1;
  std::size_t left_depth = 0;   // l(1) = 0, l(a^b) = l(a) + 1
  std::size_t right_spine = 0;  // 0 at a leaf, +1 per step into the right child

  friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

inline std::size_t left_depth(const Tree& t) {
  std::size_t d = 0;
  for (const Tree* p = &t; !p->is_leaf(); p = &p->left()) ++d;
  return d;
}

inline std::size_t right_spine(const Tree& t) {
  std::size_t d = 0;
  for (const Tree* p = &t; !p->is_leaf(); p = &p->right()) ++d;
  return d;
}

inline TreeStats tree_stats(const Tree& t) { return {t.size(), left_depth(t), right_spine(t)}; }

/// The model of T inside finite subsets of (0,1]: repr(1) = {1},
/// repr(a^b) = a/2 ∪ (b+1)/2. Returned ascending.
inline std::vector<Rational> dyadic_repr(const Tree& t) {
  if (t.is_leaf()) return {Rational(1)};
  std::vector<Rational> out = dyadic_repr(t.left());
  for (auto& x : out) x /= 2;
  for (auto x : dyadic_repr(t.right())) {
    x = (x + 1) / 2;
    out.push_back(std::move(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Addresses

/// Finite 0/1 word; the empty address is legal everywhere.
class Address {
 public:
  Address() = default;

  static Address parse(std::string_view bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1') {
        throw ParseError(std::string("address digit must be 0 or 1, got '") + bits[i] + "'", i);
      }
    }
    Address a;
    a.bits_ = std::string(bits);
    return a;
  }

  std::size_t length() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_.at(i) - '0'; }
  const std::string& str() const noexcept { return bits_; }

  Address prefix(std::size_t n) const {
    Address a;
    a.bits_ = bits_.substr(0, n);
    return a;
  }

  bool is_prefix_of(const Address& other) const {
    return bits_.size() <= other.bits_.size() && other.bits_.compare(0, bits_.size(), bits_) == 0;
  }

  /// Neither is a prefix of the other.
  bool incompatible_with(const Address& other) const {
    return !is_prefix_of(other) && !other.is_prefix_of(*this);
  }

  /// Uses both digits.
  bool nonconstant() const {
    return bits_.find('0') != std::string::npos && bits_.find('1') != std::string::npos;
  }

  friend bool operator==(const Address&, const Address&) = default;
  /// Lexicographic.
  friend auto operator<=>(const Address&, const Address&) = default;

 private:
  std::string bits_;
};

class InvalidAddress : public DomainError {
 public:
  InvalidAddress(const Address& failing_prefix)
      : DomainError("address runs into a leaf at prefix '" + failing_prefix.str() + "'"),
        failing_prefix_(failing_prefix) {}

  const Address& failing_prefix() const noexcept { return failing_prefix_; }

 private:
  Address failing_prefix_;
};

/// t/σ: (a^b)/0σ = a/σ, (a^b)/1σ = b/σ, t/ε = t.
inline Tree subterm(const Tree& t, const Address& sigma) {
  const Tree* p = &t;
  for (std::size_t i = 0; i < sigma.length(); ++i) {
    if (p->is_leaf()) throw InvalidAddress(sigma.prefix(i + 1));
    p = sigma[i] == 0 ? &p->left() : &p->right();
  }
  return *p;
}

inline std::optional<Tree> try_subterm(const Tree& t, const Address& sigma) {
  const Tree* p = &t;
  for (std::size_t i = 0; i < sigma.length(); ++i) {
    if (p->is_leaf()) return std::nullopt;
    p = sigma[i] == 0 ? &p->left() : &p->right();
  }
  return *p;
}

// ---------------------------------------------------------------------------
// Substitution and pruning

namespace detail {

inline Tree substitute_from(const Tree& t, std::span<const Tree> us, std::size_t& next) {
  if (t.is_leaf()) return us[next++];
  Tree left = substitute_from(t.left(), us, next);
  Tree right = substitute_from(t.right(), us, next);
  return caret(left, right);
}

}  // namespace detail

/// t(u_0, ..., u_{m-1}): the i-th leaf (left to right) becomes u_i.
inline Tree substitute(const Tree& t, std::span<const Tree> us) {
  if (us.size() != t.size()) {
    throw DomainError("substitute needs " + std::to_string(t.size()) + " trees, got " +
                      std::to_string(us.size()));
  }
  std::size_t next = 0;
  return detail::substitute_from(t, us, next);
}

/// t_k: 1_0 = 1; (a^b)_k = a_k ^ 1 when k < #a, else a ^ b_{k-#a}.
inline Tree prune(const Tree& t, std::size_t k) {
  if (k >= t.size()) {
    throw DomainError("prune index " + std::to_string(k) + " out of range for tree of size " +
                      std::to_string(t.size()));
  }
  if (t.is_leaf()) return t;
  const std::size_t left_n = t.left().size();
  if (k < left_n) return caret(prune(t.left(), k), Tree::leaf());
  return caret(t.left(), prune(t.right(), k - left_n));
}

struct Admissibility {
  std::vector<long long> bounds;  // l_k(t) = #(t_k) - 2
  bool admissible = false;
};

inline Admissibility admissibility(const Tree& t, std::span<const long long> indices) {
  if (indices.size() != t.size()) {
    throw DomainError("index sequence has length " + std::to_string(indices.size()) +
                      ", tree has size " + std::to_string(t.size()));
  }
  for (std::size_t k = 1; k < indices.size(); ++k) {
    if (indices[k] <= indices[k - 1]) throw DomainError("index sequence must be strictly increasing");
  }
  Admissibility out;
  out.admissible = true;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const long long bound = static_cast<long long>(prune(t, k).size()) - 2;
    out.bounds.push_back(bound);
    if (bound > indices[k]) out.admissible = false;
  }
  return out;
}

}  // namespace caretlab
