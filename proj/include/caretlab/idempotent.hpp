#pragma once

// Idempotent measures on finite magmas: μ with μ ⋆ μ = μ.
//
// The float solvers only propose candidates. Every candidate is rationalized
// and its residual ‖μ⋆μ − μ‖_∞ recomputed exactly through convolve; that exact
// number is the only thing a caller should trust.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "caretlab/magma.hpp"
#include "caretlab/measure.hpp"
#include "caretlab/rational.hpp"

namespace caretlab {

enum class SolveMethod { damped, residual_descent, exhaustive_support };

inline std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::damped: return "damped";
    case SolveMethod::residual_descent: return "residual-descent";
    case SolveMethod::exhaustive_support: return "exhaustive-support";
  }
  return "unknown";
}

inline SolveMethod parse_solve_method(const std::string& s) {
  if (s == "damped") return SolveMethod::damped;
  if (s == "residual-descent") return SolveMethod::residual_descent;
  if (s == "exhaustive-support") return SolveMethod::exhaustive_support;
  throw DomainError("unknown solve method '" + s + "'");
}

struct SolveOptions {
  double tol = 1e-8;
  std::uint64_t seed = 0;
  SolveMethod method = SolveMethod::damped;
  std::size_t max_iterations = 10000;  // summed over all starts
  std::size_t iterations_per_start = 2000;
  double alpha = 0.5;  // damping: μ ← (1−α)μ + α μ⋆μ
  long long denominator_cap = 1000000;
};

struct SolveReport {
  bool success = false;
  std::vector<double> float_weights;
  Measure<Element> measure = Measure<Element>::point(0);  // rationalized copy
  Rational residual;                                      // exact, of `measure`
  std::size_t iterations = 0;
  SolveMethod method = SolveMethod::damped;
  std::uint64_t seed = 0;
  long long denominator_cap = 0;  // cap that produced `measure`; 0 if exact
  std::string note;
};

/// ‖μ⋆μ − μ‖_∞ in exact arithmetic.
inline Rational verify_idempotent(const Magma& m, const Measure<Element>& mu) {
  for (const auto& [x, w] : mu) {
    if (!m.contains(x)) throw DomainError("measure support point " + std::to_string(x) + " is outside the magma");
  }
  const Measure<Element> sq = convolve(m, mu, mu);
  Rational worst = 0;
  for (Element x = 0; x < m.order(); ++x) {
    const Rational d = abs_rational(sq.weight(x) - mu.weight(x));
    if (d > worst) worst = d;
  }
  return worst;
}

/// Per-coordinate best approximation, then the largest coordinate absorbs the
/// rounding so the total is exactly 1.
inline Measure<Element> rationalize_weights(const std::vector<double>& w, long long denominator_cap) {
  const mpz_class cap(std::to_string(denominator_cap));
  std::vector<Rational> q(w.size());
  std::size_t largest = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    q[i] = w[i] <= 0 ? Rational(0) : best_rational_approximation(w[i], cap);
    if (w[i] > w[largest]) largest = i;
  }
  Rational rest = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (i != largest) rest += q[i];
  q[largest] = 1 - rest;
  if (q[largest] < 0) throw DomainError("weights cannot be rationalized into a probability vector");
  std::map<Element, Rational> out;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] != 0) out.emplace(static_cast<Element>(i), q[i]);
  return Measure<Element>::from_normalized(std::move(out));
}

namespace detail {

inline std::vector<double> float_square(const Magma& m, const std::vector<double>& mu) {
  const std::size_t k = m.order();
  std::vector<double> out(k, 0.0);
  const auto& t = m.table();
  for (std::size_t i = 0; i < k; ++i) {
    if (mu[i] == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) out[t[i * k + j]] += mu[i] * mu[j];
  }
  return out;
}

inline double float_residual(const Magma& m, const std::vector<double>& mu) {
  const auto sq = float_square(m, mu);
  double r = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) r = std::max(r, std::abs(sq[i] - mu[i]));
  return r;
}

/// Euclidean projection onto the probability simplex (sort-based).
inline std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0, theta = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0) theta = candidate;
  }
  for (auto& x : v) x = std::max(0.0, x - theta);
  return v;
}

inline std::vector<double> random_simplex_point(std::size_t k, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(k);
  double s = 0;
  for (auto& x : p) s += (x = expo(rng));
  for (auto& x : p) x /= s;
  return p;
}

inline double sum_of_squares(const Magma& m, const std::vector<double>& mu, std::vector<double>* residual = nullptr) {
  auto sq = float_square(m, mu);
  double f = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    sq[i] -= mu[i];
    f += sq[i] * sq[i];
  }
  if (residual) *residual = std::move(sq);
  return f;
}

/// One start of damped iteration. Returns iterations used.
inline std::size_t run_damped(const Magma& m, std::vector<double>& mu, double alpha, double float_tol,
                              std::size_t limit) {
  std::size_t it = 0;
  while (it < limit && float_residual(m, mu) > float_tol) {
    const auto sq = float_square(m, mu);
    double total = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) total += (mu[i] = (1 - alpha) * mu[i] + alpha * sq[i]);
    // Total mass s evolves as s ← (1−α)s + αs², which repels from 1; renormalize.
    for (auto& x : mu) x /= total;
    ++it;
  }
  return it;
}

/// One start of projected gradient descent on ‖μ⋆μ − μ‖₂² with backtracking.
inline std::size_t run_residual_descent(const Magma& m, std::vector<double>& mu, double float_tol,
                                        std::size_t limit) {
  const std::size_t k = m.order();
  const auto& t = m.table();
  std::size_t it = 0;
  double step = 1.0;
  std::vector<double> r;
  double f = sum_of_squares(m, mu, &r);
  while (it < limit && float_residual(m, mu) > float_tol) {
    std::vector<double> grad(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      double g = -r[i];
      for (std::size_t j = 0; j < k; ++j) g += mu[j] * (r[t[i * k + j]] + r[t[j * k + i]]);
      grad[i] = 2 * g;
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      std::vector<double> trial(k);
      for (std::size_t i = 0; i < k; ++i) trial[i] = mu[i] - step * grad[i];
      trial = project_to_simplex(std::move(trial));
      std::vector<double> r_trial;
      const double f_trial = sum_of_squares(m, trial, &r_trial);
      if (f_trial < f) {
        mu = std::move(trial);
        r = std::move(r_trial);
        f = f_trial;
        step = std::min(step * 2, 1e6);
        accepted = true;
        break;
      }
      step /= 2;
    }
    ++it;
    if (!accepted) break;  // stationary point of the squared residual
  }
  return it;
}

/// Rationalize with escalating denominator caps until the exact residual
/// meets tol (or the caps run out); returns the best candidate.
inline void rationalize_into(const Magma& m, const std::vector<double>& mu, const Rational& tol,
                             long long first_cap, SolveReport& best, bool& have_best) {
  for (long long cap = first_cap; cap > 0 && cap <= 1000000000000LL; cap *= 1000) {
    Measure<Element> candidate = rationalize_weights(mu, cap);
    Rational residual = verify_idempotent(m, candidate);
    if (!have_best || residual < best.residual) {
      best.float_weights = mu;
      best.measure = std::move(candidate);
      best.residual = std::move(residual);
      best.denominator_cap = cap;
      have_best = true;
    }
    if (best.residual <= tol) return;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact solutions with support of size at most two.

struct ExactIdempotent {
  std::vector<Element> support;  // one or two elements, ascending
  /// Exact measure when the weights are rational (for a continuum, the
  /// representative p = 1/2).
  std::optional<Measure<Element>> measure;
  /// Weight on support[0], as text: "1/2", "(3 - sqrt(5))/2", or "any p in (0,1)".
  std::string weight_expression;
  double weight_approx = 1.0;
  bool continuum = false;
};

namespace detail {

inline bool is_perfect_square(long long d, long long& root) {
  if (d < 0) return false;
  root = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(d))));
  while (root * root > d) --root;
  while ((root + 1) * (root + 1) <= d) ++root;
  return root * root == d;
}

}  // namespace detail

/// Every idempotent supported on one or two points. For support {i, j} with
/// weight p on i, closure forces all four products into {i, j} and the mass
/// balance at i reads (a − b + c)p² + (b − 2c − 1)p + c = 0, where
/// a = [i⋆i = i], b = [i⋆j = i] + [j⋆i = i], c = [j⋆j = i].
inline std::vector<ExactIdempotent> exact_small_support_idempotents(const Magma& m) {
  std::vector<ExactIdempotent> out;
  for (Element i = 0; i < m.order(); ++i) {
    if (m(i, i) == i) {
      out.push_back({{i}, Measure<Element>::point(i), "1/1", 1.0, false});
    }
  }
  for (Element i = 0; i < m.order(); ++i) {
    for (Element j = i + 1; j < m.order(); ++j) {
      const Element prods[4] = {m(i, i), m(i, j), m(j, i), m(j, j)};
      if (!std::all_of(std::begin(prods), std::end(prods), [&](Element e) { return e == i || e == j; })) continue;
      const long long a = m(i, i) == i;
      const long long b = (m(i, j) == i) + (m(j, i) == i);
      const long long c = m(j, j) == i;
      const long long qa = a - b + c, qb = b - 2 * c - 1, qc = c;
      auto push_rational = [&](const Rational& p, bool continuum) {
        std::map<Element, Rational> w{{i, p}, {j, 1 - p}};
        out.push_back({{i, j}, Measure<Element>::from_normalized(std::move(w)),
                       continuum ? "any p in (0,1)" : format_rational(p), p.get_d(), continuum});
      };
      if (qa == 0) {
        if (qb == 0) {
          if (qc == 0) push_rational(Rational(1, 2), true);
          continue;
        }
        Rational p(mpz_class(static_cast<long>(-qc)), mpz_class(static_cast<long>(qb)));
        p.canonicalize();
        if (p > 0 && p < 1) push_rational(p, false);
        continue;
      }
      const long long disc = qb * qb - 4 * qa * qc;
      if (disc < 0) continue;
      long long root = 0;
      const bool rational_roots = detail::is_perfect_square(disc, root);
      for (int sign : {-1, 1}) {
        if (disc == 0 && sign == 1) break;
        if (rational_roots) {
          Rational p(mpz_class(static_cast<long>(-qb + sign * root)), mpz_class(static_cast<long>(2 * qa)));
          p.canonicalize();
          if (p > 0 && p < 1) push_rational(p, false);
        } else {
          const double p = (-static_cast<double>(qb) + sign * std::sqrt(static_cast<double>(disc))) / (2.0 * qa);
          if (p > 0 && p < 1) {
            std::string expr = "(" + std::to_string(-qb) + (sign < 0 ? " - " : " + ") + "sqrt(" + std::to_string(disc) +
                               "))/" + std::to_string(2 * qa);
            out.push_back({{i, j}, std::nullopt, expr, p, false});
          }
        }
      }
    }
  }
  return out;
}

/// Searches for an idempotent with verified exact residual <= tol. Failure is
/// reported in the result (success = false with the best residual found).
inline SolveReport find_idempotent(const Magma& m, const SolveOptions& opt = {}) {
  if (!(opt.tol > 0)) throw DomainError("tolerance must be positive");
  const Rational tol(opt.tol);
  SolveReport best;
  best.method = opt.method;
  best.seed = opt.seed;
  bool have_best = false;
  const std::size_t k = m.order();

  if (opt.method == SolveMethod::exhaustive_support) {
    for (const auto& sol : exact_small_support_idempotents(m)) {
      SolveReport r;
      r.float_weights.assign(k, 0.0);
      r.float_weights[sol.support[0]] = sol.weight_approx;
      if (sol.support.size() == 2) r.float_weights[sol.support[1]] = 1.0 - sol.weight_approx;
      if (sol.measure) {
        r.measure = *sol.measure;
        r.residual = verify_idempotent(m, r.measure);
        r.note = "exact weight " + sol.weight_expression;
      } else {
        bool have = false;
        detail::rationalize_into(m, r.float_weights, tol, opt.denominator_cap, r, have);
        r.note = "irrational weight " + sol.weight_expression;
      }
      r.method = opt.method;
      r.seed = opt.seed;
      r.success = r.residual <= tol;
      if (!have_best || r.residual < best.residual) {
        best = std::move(r);
        have_best = true;
      }
      if (best.success) return best;
    }
    if (!have_best) {
      best.float_weights.assign(k, 1.0 / static_cast<double>(k));
      best.measure = rationalize_weights(best.float_weights, opt.denominator_cap);
      best.residual = verify_idempotent(m, best.measure);
      best.denominator_cap = opt.denominator_cap;
      best.note = "no idempotent with support of size <= 2";
    }
    return best;
  }

  std::mt19937_64 rng(opt.seed);
  const double float_tol = std::min(opt.tol * 1e-3, 1e-12);
  std::size_t used = 0;
  for (std::size_t start = 0; used < opt.max_iterations; ++start) {
    std::vector<double> mu =
        start == 0 ? std::vector<double>(k, 1.0 / static_cast<double>(k)) : detail::random_simplex_point(k, rng);
    const std::size_t limit = std::min(opt.iterations_per_start, opt.max_iterations - used);
    const std::size_t it = opt.method == SolveMethod::damped ? detail::run_damped(m, mu, opt.alpha, float_tol, limit)
                                                             : detail::run_residual_descent(m, mu, float_tol, limit);
    used += std::max<std::size_t>(it, 1);
    detail::rationalize_into(m, mu, tol, opt.denominator_cap, best, have_best);
    if (best.residual <= tol) break;
    // Slow convergence usually means the limit sits on a face of the simplex
    // while some weights creep to zero; keep the j heaviest weights and
    // polish on that face.
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return mu[x] > mu[y]; });
    for (std::size_t keep = 1; keep < k && used < opt.max_iterations; ++keep) {
      std::vector<double> face(k, 0.0);
      double total = 0;
      for (std::size_t i = 0; i < keep; ++i) total += (face[order[i]] = mu[order[i]]);
      if (total <= 0) continue;
      for (auto& x : face) x /= total;
      const std::size_t polish = std::min<std::size_t>(200, opt.max_iterations - used);
      used += detail::run_damped(m, face, opt.alpha, float_tol, polish);
      detail::rationalize_into(m, face, tol, opt.denominator_cap, best, have_best);
      if (best.residual <= tol) break;
    }
    if (best.residual <= tol) break;
  }
  best.iterations = used;
  best.method = opt.method;
  best.seed = opt.seed;
  best.success = best.residual <= tol;
  if (!best.success) best.note = "iteration budget exhausted";
  return best;
}

}  // namespace caretlab
