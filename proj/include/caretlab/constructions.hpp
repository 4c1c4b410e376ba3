#pragma once

// Finite instruments for subterm-order statistics and the separating maps
// built from the words u_σ: the relation ≪, the maps h_r, the odometer code
// of the right spine, and membership in E_{r,n} and E_{r,p}.

#include <compare>
#include <concepts>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "caretlab/measure.hpp"
#include "caretlab/tree.hpp"

namespace caretlab {

/// A linear quasi-order on trees, exposed as a three-way comparison.
template <class Q>
concept QuasiOrder = requires(const Q& q, const Tree& a, const Tree& b) {
  { q.compare(a, b) } -> std::convertible_to<std::weak_ordering>;
};

/// s ⪯ t iff #(s) <= #(t).
struct SizeOrder {
  std::weak_ordering compare(const Tree& a, const Tree& b) const { return a.size() <=> b.size(); }
};

struct AddressProfile {
  Rational less;       // t/σ ≺ t/ς
  Rational greater;    // t/ς ≺ t/σ
  Rational equiv;
  Rational undefined;  // σ or ς runs off t
};

template <QuasiOrder Q>
AddressProfile address_profile(const Measure<Tree>& mu, const Address& sigma, const Address& varsigma,
                               const Q& order) {
  if (!sigma.incompatible_with(varsigma)) {
    throw DomainError("addresses '" + sigma.str() + "' and '" + varsigma.str() + "' are compatible");
  }
  AddressProfile out;
  for (const auto& [t, w] : mu) {
    const auto a = try_subterm(t, sigma);
    const auto b = try_subterm(t, varsigma);
    if (!a || !b) {
      out.undefined += w;
      continue;
    }
    const std::weak_ordering c = order.compare(*a, *b);
    if (c < 0) {
      out.less += w;
    } else if (c > 0) {
      out.greater += w;
    } else {
      out.equiv += w;
    }
  }
  return out;
}

struct MonotonicityProfile {
  Rational chain_a;  // #(t/001) < #(t/01) < #(t/10)
  Rational chain_b;  // #(t/10) < #(t/01) < #(t/001)
  Rational other;
};

inline MonotonicityProfile monotonicity_profile(const Measure<Tree>& mu) {
  static const Address a001 = Address::parse("001");
  static const Address a01 = Address::parse("01");
  static const Address a10 = Address::parse("10");
  MonotonicityProfile out;
  for (const auto& [t, w] : mu) {
    const auto x = try_subterm(t, a001);
    const auto y = try_subterm(t, a01);
    const auto z = try_subterm(t, a10);
    if (x && y && z) {
      const std::size_t sx = x->size(), sy = y->size(), sz = z->size();
      if (sx < sy && sy < sz) {
        out.chain_a += w;
        continue;
      }
      if (sz < sy && sy < sx) {
        out.chain_b += w;
        continue;
      }
    }
    out.other += w;
  }
  return out;
}

/// An element of 2^ω read to finite precision.
class BitPrefix {
 public:
  static BitPrefix parse(std::string_view bits) {
    if (bits.empty()) throw DomainError("bit prefix must be nonempty");
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1') throw ParseError("bit prefix digits must be 0 or 1", i);
    }
    BitPrefix r;
    r.bits_ = std::string(bits);
    return r;
  }

  std::size_t length() const noexcept { return bits_.size(); }
  int operator[](std::size_t i) const { return bits_.at(i) - '0'; }
  const std::string& str() const noexcept { return bits_; }

  /// r↾k, k >= 1.
  BitPrefix restrict_to(std::size_t k) const {
    if (k == 0 || k > bits_.size()) {
      throw DomainError("cannot restrict a prefix of length " + std::to_string(bits_.size()) + " to " +
                        std::to_string(k) + " bits");
    }
    BitPrefix r;
    r.bits_ = bits_.substr(0, k);
    return r;
  }

  friend bool operator==(const BitPrefix&, const BitPrefix&) = default;

 private:
  std::string bits_;
};

/// u_σ = 1 for |σ| = 1; u_{0σ} = u_σ ^ 1; u_{1σ} = 1 ^ u_σ. #(u_σ) = |σ|.
inline Tree u_sigma(const BitPrefix& sigma) {
  Tree u;
  for (std::size_t i = sigma.length() - 1; i-- > 0;) u = sigma[i] == 0 ? caret(u, Tree::leaf()) : caret(Tree::leaf(), u);
  return u;
}

inline std::size_t two_adic_valuation(std::size_t n) {
  std::size_t v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  return v;
}

/// a ≪ b iff #(a) < 2^p and 2^p | #(b) for some p, i.e. #(a) < 2^{v_2(#b)}.
inline bool much_less(std::size_t size_a, std::size_t size_b) {
  if (size_b == 0) throw DomainError("sizes must be positive");
  const std::size_t v = two_adic_valuation(size_b);
  return v < 63 && size_a < (std::size_t{1} << v);
}

inline bool much_less(const Tree& a, const Tree& b) { return much_less(a.size(), b.size()); }

/// h_r(a^b) = h_r(a) ^ h_r(b) when a ≪ b, otherwise u_{r↾#t}. Size preserving.
inline Tree h_r_tree(const Tree& t, const BitPrefix& r) {
  if (r.length() < t.size()) {
    throw DomainError("bit prefix of length " + std::to_string(r.length()) + " is too short for a tree of size " +
                      std::to_string(t.size()));
  }
  if (!t.is_leaf() && much_less(t.left(), t.right())) return caret(h_r_tree(t.left(), r), h_r_tree(t.right(), r));
  return u_sigma(r.restrict_to(t.size()));
}

inline Measure<Tree> h_r_push(const Measure<Tree>& mu, const BitPrefix& r) {
  return pushforward([&](const Tree& t) { return h_r_tree(t, r); }, mu);
}

/// h(t) to p bits: h(1) = 0, h(s^t) = h(t) + 1 with carry to the right, which
/// is the least-significant-first binary expansion of the right spine length.
inline std::vector<int> odometer_bits(const Tree& t, std::size_t p) {
  std::size_t spine = right_spine(t);
  std::vector<int> bits(p, 0);
  for (std::size_t i = 0; i < p && spine; ++i, spine >>= 1) bits[i] = static_cast<int>(spine & 1);
  return bits;
}

/// t ∈ E_{r,p}: h(t)(i) = r(i) for all i < p.
inline bool in_E_rp(const Tree& t, const BitPrefix& r, std::size_t p) {
  if (p > r.length()) throw DomainError("precision exceeds the bit prefix length");
  const auto bits = odometer_bits(t, p);
  for (std::size_t i = 0; i < p; ++i)
    if (bits[i] != r[i]) return false;
  return true;
}

/// Membership in E_{r,n}, the subsystem generated by {u_{r↾k} : n < k}.
class SubsystemMembership {
 public:
  SubsystemMembership(BitPrefix r, std::size_t n) : r_(std::move(r)), n_(n) {}

  bool contains(const Tree& t) {
    if (r_.length() < t.size()) {
      throw DomainError("bit prefix of length " + std::to_string(r_.length()) + " is too short for a tree of size " +
                        std::to_string(t.size()));
    }
    // Generators have #(u_{r↾k}) = k, so the only candidate is k = #t.
    if (t.size() > n_ && t == generator(t.size())) return true;
    return !t.is_leaf() && contains(t.left()) && contains(t.right());
  }

 private:
  const Tree& generator(std::size_t k) {
    auto it = generators_.find(k);
    if (it == generators_.end()) it = generators_.emplace(k, u_sigma(r_.restrict_to(k))).first;
    return it->second;
  }

  BitPrefix r_;
  std::size_t n_;
  std::map<std::size_t, Tree> generators_;
};

inline bool in_E_r(const Tree& t, const BitPrefix& r, std::size_t n) { return SubsystemMembership(r, n).contains(t); }

}  // namespace caretlab
