#pragma once

// Exact two-phase simplex over the rationals for small dense problems:
//   minimize c·x  subject to  row_i(A)·x (<=, =, >=) b_i,  x >= 0.
// Pivoting follows Bland's rule. Every answer carries a certificate that can
// be checked without trusting the solver: dual multipliers for optimality,
// a Farkas ray for infeasibility.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "caretlab/errors.hpp"
#include "caretlab/rational.hpp"

namespace caretlab {

enum class Relation { less_equal, equal, greater_equal };

struct LinearProgram {
  std::vector<std::vector<Rational>> rows;  // A, one vector per constraint
  std::vector<Relation> relations;
  std::vector<Rational> rhs;                // b
  std::vector<Rational> cost;               // c

  std::size_t variables() const { return cost.size(); }
  std::size_t constraints() const { return rows.size(); }

  void add_row(std::vector<Rational> coefficients, Relation rel, Rational b) {
    if (coefficients.size() != cost.size()) throw DomainError("constraint width does not match the variable count");
    rows.push_back(std::move(coefficients));
    relations.push_back(rel);
    rhs.push_back(std::move(b));
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<Rational> x;        // primal point (optimal)
  Rational objective;             // c·x (optimal)
  std::vector<Rational> duals;    // y per constraint (optimal)
  std::vector<Rational> farkas;   // y per constraint (infeasible)
  std::size_t pivots = 0;
};

inline Rational row_dot(const std::vector<Rational>& a, const std::vector<Rational>& x) {
  Rational s = 0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (sgn(a[j]) != 0) s += a[j] * x[j];
  return s;
}

/// x >= 0 and every constraint holds exactly.
inline bool verify_primal(const LinearProgram& lp, const std::vector<Rational>& x) {
  if (x.size() != lp.variables()) return false;
  for (const auto& v : x)
    if (sgn(v) < 0) return false;
  for (std::size_t i = 0; i < lp.constraints(); ++i) {
    const Rational lhs = row_dot(lp.rows[i], x);
    switch (lp.relations[i]) {
      case Relation::less_equal:
        if (lhs > lp.rhs[i]) return false;
        break;
      case Relation::equal:
        if (lhs != lp.rhs[i]) return false;
        break;
      case Relation::greater_equal:
        if (lhs < lp.rhs[i]) return false;
        break;
    }
  }
  return true;
}

/// Sign pattern of a dual vector: y_i <= 0 on <= rows, y_i >= 0 on >= rows.
inline bool dual_signs_ok(const LinearProgram& lp, const std::vector<Rational>& y) {
  for (std::size_t i = 0; i < lp.constraints(); ++i) {
    if (lp.relations[i] == Relation::less_equal && sgn(y[i]) > 0) return false;
    if (lp.relations[i] == Relation::greater_equal && sgn(y[i]) < 0) return false;
  }
  return true;
}

inline std::vector<Rational> transpose_apply(const LinearProgram& lp, const std::vector<Rational>& y) {
  std::vector<Rational> out(lp.variables());
  for (std::size_t i = 0; i < lp.constraints(); ++i) {
    if (sgn(y[i]) == 0) continue;
    for (std::size_t j = 0; j < lp.variables(); ++j) out[j] += y[i] * lp.rows[i][j];
  }
  return out;
}

/// Weak duality with equal objectives: x is feasible, y is dual feasible
/// (A^T y <= c with the sign pattern above) and c·x = b·y.
inline bool verify_optimal(const LinearProgram& lp, const std::vector<Rational>& x, const std::vector<Rational>& y) {
  if (y.size() != lp.constraints() || !verify_primal(lp, x) || !dual_signs_ok(lp, y)) return false;
  const auto aty = transpose_apply(lp, y);
  for (std::size_t j = 0; j < lp.variables(); ++j)
    if (aty[j] > lp.cost[j]) return false;
  return row_dot(lp.cost, x) == row_dot(lp.rhs, y);
}

/// y proves infeasibility: A^T y <= 0, the sign pattern holds and b·y > 0.
inline bool verify_farkas(const LinearProgram& lp, const std::vector<Rational>& y) {
  if (y.size() != lp.constraints() || !dual_signs_ok(lp, y)) return false;
  for (const auto& v : transpose_apply(lp, y))
    if (sgn(v) > 0) return false;
  return sgn(row_dot(lp.rhs, y)) > 0;
}

namespace detail {

class Tableau {
 public:
  // Columns: structural, then one slack per inequality, then one artificial per row.
  explicit Tableau(const LinearProgram& lp) : m_(lp.constraints()), n_(lp.variables()) {
    std::size_t slack_count = 0;
    for (auto rel : lp.relations)
      if (rel != Relation::equal) ++slack_count;
    slack_begin_ = n_;
    art_begin_ = n_ + slack_count;
    width_ = art_begin_ + m_;
    t_.assign(m_, std::vector<Rational>(width_));
    b_.resize(m_);
    sign_.resize(m_);
    basis_.resize(m_);
    std::size_t slack = slack_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      sign_[i] = sgn(lp.rhs[i]) < 0 ? -1 : 1;
      for (std::size_t j = 0; j < n_; ++j) t_[i][j] = lp.rows[i][j] * sign_[i];
      if (lp.relations[i] == Relation::less_equal) t_[i][slack++] = sign_[i];
      if (lp.relations[i] == Relation::greater_equal) t_[i][slack++] = -sign_[i];
      t_[i][art_begin_ + i] = 1;
      b_[i] = lp.rhs[i] * sign_[i];
      basis_[i] = art_begin_ + i;
    }
  }

  /// Runs the simplex for the given column costs. Returns false if unbounded.
  bool optimize(const std::vector<Rational>& costs, bool allow_artificial_entry, std::size_t& pivots) {
    price(costs);
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < width_; ++j) {
        if (!allow_artificial_entry && j >= art_begin_) break;
        if (sgn(d_[j]) < 0) {
          enter = j;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best_ratio;
      for (std::size_t i = 0; i < m_; ++i) {
        if (sgn(t_[i][*enter]) <= 0) continue;
        Rational ratio = b_[i] / t_[i][*enter];
        if (!leave || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[*leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
      ++pivots;
    }
  }

  /// Pivots basic artificials out wherever a structural or slack entry allows it.
  void expel_artificials(std::size_t& pivots) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (sgn(t_[i][j]) != 0) {
          pivot(i, j);
          ++pivots;
          break;
        }
      }
    }
  }

  Rational objective_value(const std::vector<Rational>& costs) const {
    Rational z = 0;
    for (std::size_t i = 0; i < m_; ++i) z += costs[basis_[i]] * b_[i];
    return z;
  }

  std::vector<Rational> structural_solution() const {
    std::vector<Rational> x(n_);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = b_[i];
    return x;
  }

  /// y = c_B B^{-1}, read off the artificial columns (which started as the
  /// identity), and mapped back to the caller's row signs.
  std::vector<Rational> multipliers(const std::vector<Rational>& costs) const {
    std::vector<Rational> y(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      Rational v = 0;
      for (std::size_t i = 0; i < m_; ++i)
        if (sgn(costs[basis_[i]]) != 0) v += costs[basis_[i]] * t_[i][art_begin_ + k];
      y[k] = v * sign_[k];
    }
    return y;
  }

  std::size_t width() const { return width_; }
  std::size_t artificial_begin() const { return art_begin_; }

 private:
  void price(const std::vector<Rational>& costs) {
    d_ = costs;
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational& cb = costs[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j < width_; ++j)
        if (sgn(t_[i][j]) != 0) d_[j] -= cb * t_[i][j];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    b_[r] /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || sgn(t_[i][c]) == 0) continue;
      const Rational f = t_[i][c];
      for (std::size_t j = 0; j < width_; ++j)
        if (sgn(t_[r][j]) != 0) t_[i][j] -= f * t_[r][j];
      b_[i] -= f * b_[r];
    }
    if (!d_.empty() && sgn(d_[c]) != 0) {
      const Rational f = d_[c];
      for (std::size_t j = 0; j < width_; ++j)
        if (sgn(t_[r][j]) != 0) d_[j] -= f * t_[r][j];
    }
    basis_[r] = c;
  }

  std::size_t m_, n_, slack_begin_ = 0, art_begin_ = 0, width_ = 0;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> b_;
  std::vector<Rational> d_;
  std::vector<int> sign_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp) {
  if (lp.relations.size() != lp.rows.size() || lp.rhs.size() != lp.rows.size()) {
    throw DomainError("linear program has inconsistent row data");
  }
  for (const auto& row : lp.rows)
    if (row.size() != lp.variables()) throw DomainError("constraint width does not match the variable count");

  LpSolution out;
  detail::Tableau tab(lp);
  const std::size_t width = tab.width();
  const std::size_t art = tab.artificial_begin();

  std::vector<Rational> phase1(width);
  for (std::size_t j = art; j < width; ++j) phase1[j] = 1;
  tab.optimize(phase1, true, out.pivots);
  if (sgn(tab.objective_value(phase1)) > 0) {
    out.status = LpStatus::infeasible;
    // Phase-one multipliers already satisfy A^T y <= 0 and b·y = phase-one optimum > 0.
    out.farkas = tab.multipliers(phase1);
    if (!verify_farkas(lp, out.farkas)) throw std::logic_error("simplex produced an invalid infeasibility certificate");
    return out;
  }
  tab.expel_artificials(out.pivots);

  std::vector<Rational> phase2(width);
  for (std::size_t j = 0; j < lp.variables(); ++j) phase2[j] = lp.cost[j];
  if (!tab.optimize(phase2, false, out.pivots)) {
    out.status = LpStatus::unbounded;
    return out;
  }
  out.status = LpStatus::optimal;
  out.x = tab.structural_solution();
  out.objective = row_dot(lp.cost, out.x);
  out.duals = tab.multipliers(phase2);
  if (!verify_optimal(lp, out.x, out.duals)) throw std::logic_error("simplex produced an invalid optimality certificate");
  return out;
}

}  // namespace caretlab
