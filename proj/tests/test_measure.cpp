#include <gtest/gtest.h>

#include "caretlab/magma.hpp"
#include "caretlab/measure.hpp"
#include "caretlab/thompson.hpp"
#include "test_support.hpp"

using namespace caretlab;
using caretlab::testkit::random_measure_on;
using caretlab::testkit::trees_in_range;

namespace {

Tree T(const char* s) { return parse_tree(s); }
const Rational kHalf(1, 2);
const Rational kQuarter(1, 4);

// Brute-force substitution: sum over all support tuples of the product of weights.
Measure<Tree> substitute_by_tuples(const Tree& t, const std::vector<Measure<Tree>>& mus) {
  std::map<Tree, Rational> acc;
  std::vector<Tree> tuple(mus.size());
  std::function<void(std::size_t, Rational)> rec = [&](std::size_t i, Rational w) {
    if (i == mus.size()) {
      acc[substitute(t, tuple)] += w;
      return;
    }
    for (const auto& [u, wu] : mus[i]) {
      tuple[i] = u;
      rec(i + 1, w * wu);
    }
  };
  rec(0, Rational(1));
  return Measure<Tree>::from_normalized(std::move(acc));
}

}  // namespace

TEST(MakeMeasure, Examples) {
  const auto delta = make_measure<Tree>({{T("1"), Rational(1)}});
  EXPECT_EQ(delta, Measure<Tree>::point(T("1")));
  const auto two = make_measure<Tree>({{T("1"), kHalf}, {T("(1 1)"), kHalf}});
  EXPECT_EQ(two.support_size(), 2u);
  EXPECT_THROW(make_measure<Tree>({{T("1"), kHalf}}), DomainError);
  EXPECT_THROW(make_measure<Tree>({{T("1"), Rational(3, 2)}, {T("(1 1)"), -kHalf}}), DomainError);
  const auto dropped = make_measure<Tree>({{T("1"), Rational(1)}, {T("(1 1)"), Rational(0)}});
  EXPECT_EQ(dropped.support_size(), 1u);
  EXPECT_FALSE(dropped.contains(T("(1 1)")));
}

TEST(Tensor, Examples) {
  const auto a = Measure<int>::point(1);
  const auto b = Measure<int>::point(2);
  EXPECT_EQ(tensor(a, b), (Measure<std::pair<int, int>>::point({1, 2})));
  const auto u = make_measure<int>({{0, kHalf}, {1, kHalf}});
  const auto v = make_measure<int>({{2, kHalf}, {3, kHalf}});
  const auto uv = tensor(u, v);
  EXPECT_EQ(uv.support_size(), 4u);
  for (const auto& [p, w] : uv) EXPECT_EQ(w, kQuarter);
  const auto relabeled = tensor(u, b);
  EXPECT_EQ(relabeled.weight({0, 2}), kHalf);
  EXPECT_EQ(relabeled.weight({1, 2}), kHalf);
}

TEST(Tensor, AssociativeUpToReassociation) {
  std::mt19937_64 rng(11);
  std::vector<int> pool = {0, 1, 2, 3, 4, 5, 6, 7};
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = random_measure_on(pool, 5, rng);
    const auto nu = random_measure_on(pool, 5, rng);
    const auto xi = random_measure_on(pool, 5, rng);
    const auto left = tensor(tensor(mu, nu), xi);
    const auto right = tensor(mu, tensor(nu, xi));
    const auto moved = pushforward(
        [](const std::pair<std::pair<int, int>, int>& p) {
          return std::pair<int, std::pair<int, int>>(p.first.first, {p.first.second, p.second});
        },
        left);
    EXPECT_EQ(moved, right);
  }
}

TEST(Convolve, Examples) {
  const auto m = make_measure<Tree>({{T("1"), kHalf}, {T("(1 1)"), kHalf}});
  const auto sq = convolve(CaretOp{}, m, m);
  EXPECT_EQ(sq.support_size(), 4u);
  for (const char* s : {"(1 1)", "(1 (1 1))", "((1 1) 1)", "((1 1) (1 1))"}) EXPECT_EQ(sq.weight(T(s)), kQuarter);
  EXPECT_EQ(convolve(CaretOp{}, Measure<Tree>::point(T("1")), Measure<Tree>::point(T("1"))),
            Measure<Tree>::point(T("(1 1)")));
  const Magma z2 = cyclic_addition_magma(2);
  const auto uni = make_measure<Element>({{0, kHalf}, {1, kHalf}});
  EXPECT_EQ(convolve(z2, uni, uni), uni);
}

TEST(Convolve, SizeIsAdditiveAndPointMassesCommute) {
  std::mt19937_64 rng(5);
  const auto t3 = trees_in_range(3, 3), t4 = trees_in_range(4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = random_measure_on(t3, 2, rng);
    const auto nu = random_measure_on(t4, 5, rng);
    const auto c = convolve(CaretOp{}, mu, nu);
    EXPECT_EQ(common_size(c), std::optional<std::size_t>(7));
  }
  for (const auto& a : trees_in_range(1, 3))
    for (const auto& b : trees_in_range(1, 3))
      EXPECT_EQ(convolve(CaretOp{}, Measure<Tree>::point(a), Measure<Tree>::point(b)),
                Measure<Tree>::point(caret(a, b)));
}

TEST(SubstituteMeasures, Examples) {
  const std::vector<Measure<Tree>> pts = {Measure<Tree>::point(T("(1 1)")), Measure<Tree>::point(T("1"))};
  EXPECT_EQ(substitute_measures(T("(1 1)"), pts, CaretOp{}), Measure<Tree>::point(T("((1 1) 1)")));
  const std::vector<Measure<Tree>> mixed = {make_measure<Tree>({{T("1"), kHalf}, {T("(1 1)"), kHalf}}),
                                            Measure<Tree>::point(T("1"))};
  EXPECT_EQ(substitute_measures(T("(1 1)"), mixed, CaretOp{}),
            make_measure<Tree>({{T("(1 1)"), kHalf}, {T("((1 1) 1)"), kHalf}}));
  const auto mu = mixed[0];
  EXPECT_EQ(substitute_measures(T("1"), std::vector<Measure<Tree>>{mu}, CaretOp{}), mu);
  EXPECT_THROW(substitute_measures(T("(1 1)"), std::vector<Measure<Tree>>{mu}, CaretOp{}), DomainError);
}

TEST(SubstituteMeasures, MatchesTupleExpansion) {
  std::mt19937_64 rng(17);
  const auto pool = trees_in_range(1, 3);
  for (const auto& t : trees_in_range(1, 4)) {
    std::vector<Measure<Tree>> mus;
    for (std::size_t i = 0; i < t.size(); ++i) mus.push_back(random_measure_on(pool, 3, rng));
    EXPECT_EQ(substitute_measures(t, mus, CaretOp{}), substitute_by_tuples(t, mus));
  }
}

TEST(Evaluate, Examples) {
  const auto mu = make_measure<Tree>({{T("((1 1) 1)"), kHalf}, {T("(1 (1 1))"), kHalf}});
  EXPECT_EQ(evaluate([](const Tree& t) { return static_cast<long>(left_depth(t) % 2); }, mu), kHalf);
  const std::set<Tree> e = {T("((1 1) 1)")};
  EXPECT_EQ(mass_of(mu, e), kHalf);
  EXPECT_EQ(evaluate([](const Tree&) { return Rational(2, 7); }, mu), Rational(2, 7));
  std::map<Tree, Rational> partial = {{T("((1 1) 1)"), Rational(1)}};
  EXPECT_THROW(evaluate(partial, mu), DomainError);
}

TEST(Pushforward, Examples) {
  const auto mu = make_measure<Tree>({{T("(1 1)"), kHalf}, {T("((1 1) 1)"), kHalf}});
  EXPECT_EQ(pushforward([](const Tree& t) { return t; }, mu), mu);
  EXPECT_EQ(pushforward([](const Tree&) { return 0; }, mu), Measure<int>::point(0));
  EXPECT_EQ(pushforward([](const Tree& t) { return t.size(); }, mu),
            (make_measure<std::size_t>({{2, kHalf}, {3, kHalf}})));
  EXPECT_THROW(pushforward([](const Tree& t) -> std::optional<int> {
                 if (t.size() == 2) return 1;
                 return std::nullopt;
               }, mu),
               DomainError);
}

TEST(Pushforward, MultiplicativeAlongEvaluation) {
  std::mt19937_64 rng(23);
  const Magma m = shift_magma(3);
  auto ev = [&](const Tree& t) {
    std::function<Element(const Tree&)> go = [&](const Tree& s) -> Element {
      return s.is_leaf() ? Element(1) : m(go(s.left()), go(s.right()));
    };
    return go(t);
  };
  const auto pool = trees_in_range(1, 5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto mu = random_measure_on(pool, 4, rng);
    const auto nu = random_measure_on(pool, 4, rng);
    EXPECT_EQ(pushforward(ev, convolve(CaretOp{}, mu, nu)), convolve(m, pushforward(ev, mu), pushforward(ev, nu)));
  }
}

TEST(SeminormB, Examples) {
  const auto a = Measure<Tree>::point(T("1"));
  const auto b = Measure<Tree>::point(T("(1 1)"));
  const std::vector<std::set<Tree>> singleton = {{T("1")}};
  EXPECT_EQ(seminorm_b(a, a, singleton), 0);
  EXPECT_EQ(seminorm_b(a, b, singleton), 1);
  const std::vector<std::set<Tree>> whole = {{T("1"), T("(1 1)")}};
  EXPECT_EQ(seminorm_b(a, b, whole), 0);
  EXPECT_EQ(seminorm_b(a, b, std::vector<std::set<Tree>>{}), 0);
}

TEST(Reassociation, XZeroCarriesLeftToRightBracketing) {
  std::mt19937_64 rng(29);
  const auto pool = trees_in_range(1, 3);
  const FElement x0 = generator(0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = random_measure_on(pool, 3, rng);
    const auto nu = random_measure_on(pool, 3, rng);
    const auto xi = random_measure_on(pool, 3, rng);
    const auto left = convolve(CaretOp{}, convolve(CaretOp{}, mu, nu), xi);
    const auto right = convolve(CaretOp{}, mu, convolve(CaretOp{}, nu, xi));
    for (const auto& [w, weight] : left) {
      const auto moved = partial_apply(x0, w);
      ASSERT_TRUE(moved.has_value());
      EXPECT_EQ(right.weight(*moved), weight);
    }
    EXPECT_EQ(pushforward([&](const Tree& w) { return partial_apply(x0, w); }, left), right);
  }
}

TEST(IdempotentPruning, SubstitutionCollapsesBeyondIndexK) {
  std::mt19937_64 rng(31);
  struct Case {
    Magma m;
    Measure<Element> mu;
  };
  const std::vector<Case> cases = {
      {cyclic_addition_magma(2), make_measure<Element>({{0, kHalf}, {1, kHalf}})},
      {cyclic_addition_magma(2), Measure<Element>::point(0)},
      {left_zero_magma(3), make_measure<Element>({{0, Rational(1, 3)}, {1, Rational(1, 6)}, {2, kHalf}})},
  };
  for (const auto& c : cases) {
    std::vector<Element> pool;
    for (Element x = 0; x < c.m.order(); ++x) pool.push_back(x);
    for (const auto& t : trees_in_range(1, 6)) {
      for (std::size_t k = 0; k < t.size(); ++k) {
        std::vector<Measure<Element>> rho;
        for (std::size_t i = 0; i < k; ++i) rho.push_back(random_measure_on(pool, 3, rng));
        const Tree tk = prune(t, k);
        auto args = [&](std::size_t size) {
          std::vector<Measure<Element>> out = rho;
          while (out.size() < size) out.push_back(c.mu);
          return out;
        };
        EXPECT_EQ(substitute_measures(t, args(t.size()), c.m), substitute_measures(tk, args(tk.size()), c.m));
      }
    }
  }
}
