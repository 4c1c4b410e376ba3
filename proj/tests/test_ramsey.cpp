#include <gtest/gtest.h>

#include <random>

#include "caretlab/io.hpp"
#include "caretlab/ramsey.hpp"
#include "test_support.hpp"

using namespace caretlab;

namespace {

Tree T(const char* s) { return parse_tree(s); }
Rational Q(long p, long q = 1) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

// Colours L4, A, B, C, R4 = 1, 1, 0, 0, 1.
Coloring gap_coloring() { return Coloring(4, {Q(1), Q(1), Q(0), Q(0), Q(1)}); }

// Oscillation of the combination at λ.
Rational spread_at(const ValueMatrix& cols, const std::vector<Rational>& lambda) {
  return spread(combine_columns(cols, lambda));
}

// Exact minimum over the simplex for at most three columns: the objective is
// convex and piecewise linear with kinks on the lines v_s = v_t, so it is
// minimised at an intersection of two of those lines or simplex facets.
Rational min_spread_by_vertices(const ValueMatrix& cols) {
  const std::size_t k = cols.size(), pts = cols.front().size();
  if (k == 1) return spread(cols[0]);
  // Parametrise λ by its first k-1 coordinates; every line is a·x = c.
  struct Line {
    std::vector<Rational> a;
    Rational c;
  };
  std::vector<Line> lines;
  const std::size_t d = k - 1;
  for (std::size_t j = 0; j < d; ++j) {
    Line l{std::vector<Rational>(d), 0};
    l.a[j] = 1;
    lines.push_back(l);
  }
  lines.push_back({std::vector<Rational>(d, Rational(1)), 1});
  for (std::size_t s = 0; s < pts; ++s)
    for (std::size_t t = s + 1; t < pts; ++t) {
      // Σ_j λ_j (v_j(s) - v_j(t)) = 0 with λ_{k-1} = 1 - Σ others.
      Line l{std::vector<Rational>(d), 0};
      const Rational last = cols[k - 1][s] - cols[k - 1][t];
      for (std::size_t j = 0; j < d; ++j) l.a[j] = (cols[j][s] - cols[j][t]) - last;
      l.c = -last;
      lines.push_back(l);
    }
  std::vector<std::vector<Rational>> candidates;
  if (d == 1) {
    for (const auto& l : lines)
      if (sgn(l.a[0]) != 0) candidates.push_back({l.c / l.a[0]});
  } else {
    for (std::size_t i = 0; i < lines.size(); ++i)
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        const auto& p = lines[i];
        const auto& q = lines[j];
        const Rational det = p.a[0] * q.a[1] - p.a[1] * q.a[0];
        if (sgn(det) == 0) continue;
        candidates.push_back({(p.c * q.a[1] - p.a[1] * q.c) / det, (p.a[0] * q.c - p.c * q.a[0]) / det});
      }
  }
  std::optional<Rational> best;
  for (const auto& x : candidates) {
    std::vector<Rational> lambda = x;
    Rational rest = 1;
    for (const auto& v : x) rest -= v;
    lambda.push_back(rest);
    if (std::any_of(lambda.begin(), lambda.end(), [](const Rational& v) { return sgn(v) < 0; })) continue;
    const Rational s = spread_at(cols, lambda);
    if (!best || s < *best) best = s;
  }
  return *best;
}

// Constant copy oracle for m = 3: with d_j = c(e_j(L)) - c(e_j(R)), a constant
// combination exists iff some d_j = 0 or the d_j take both signs.
bool constant_copy_by_signs(const EmbeddingTable& table, const Coloring& c) {
  bool pos = false, neg = false;
  for (const auto& col : table.values(c)) {
    const Rational d = col[0] - col[1];
    if (sgn(d) == 0) return true;
    (sgn(d) > 0 ? pos : neg) = true;
  }
  return pos && neg;
}

}  // namespace

TEST(Embeddings, CountsAndOrder) {
  TreeCatalog cat;
  EXPECT_EQ(enumerate_embeddings(2, 3, cat).size(), 2u);
  const auto e23 = enumerate_embeddings(2, 3, cat);
  EXPECT_EQ(format_embedding(e23[0]), "1 | (1 1)");
  EXPECT_EQ(format_embedding(e23[1]), "(1 1) | 1");
  EXPECT_EQ(enumerate_embeddings(3, 4, cat).size(), 3u);
  EXPECT_EQ(enumerate_embeddings(3, 5, cat).size(), 9u);
  for (std::size_t n = 1; n <= 8; ++n) EXPECT_EQ(enumerate_embeddings(1, n, cat).size(), catalan(n - 1));
  // Oracle: count tuples of trees by brute force over all size vectors.
  for (std::size_t m = 1; m <= 4; ++m)
    for (std::size_t n = m; n <= 7; ++n) {
      std::uint64_t brute = 0;
      std::vector<std::size_t> sizes(m, 1);
      std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
        if (i == m) {
          if (left == 0) {
            std::uint64_t prod = 1;
            for (auto s : sizes) prod *= cat.trees(s).size();
            brute += prod;
          }
          return;
        }
        for (std::size_t s = 1; s <= left; ++s) {
          sizes[i] = s;
          rec(i + 1, left - s);
        }
      };
      rec(0, n);
      EXPECT_EQ(embedding_count(m, n), brute);
      const auto es = enumerate_embeddings(m, n, cat);
      EXPECT_EQ(es.size(), brute);
      for (const auto& e : es)
        for (const auto& t : cat.trees(m)) EXPECT_EQ(e.apply(t).size(), n);
    }
  EXPECT_THROW(enumerate_embeddings(3, 2, cat), DomainError);
  EXPECT_THROW(enumerate_embeddings(2, 10, cat, 10), CapExceeded);
}

TEST(CopyValues, Examples) {
  TreeCatalog cat;
  const auto es = enumerate_embeddings(3, 4, cat);
  // Indicator of ((1 1) (1 1)).
  const Coloring c(4, {Q(0), Q(0), Q(1), Q(0), Q(0)});
  EmbeddingCopy uniform{{Q(1, 3), Q(1, 3), Q(1, 3)}, es};
  // Left comb goes to B, A, L4 and right comb to R4, C, B.
  EXPECT_EQ(es[0].apply(T("((1 1) 1)")), T("((1 1) (1 1))"));
  EXPECT_EQ(es[2].apply(T("(1 (1 1))")), T("((1 1) (1 1))"));
  const auto v = copy_values(uniform, c, cat);
  EXPECT_EQ(v.values, (std::vector<Rational>{Q(1, 3), Q(1, 3)}));
  EXPECT_EQ(v.oscillation, 0);
  const auto single = copy_values(EmbeddingCopy{{Q(1)}, {es[1]}}, gap_coloring(), cat);
  EXPECT_EQ(single.values, (std::vector<Rational>{gap_coloring()(es[1].apply(T("((1 1) 1)"))),
                                                  gap_coloring()(es[1].apply(T("(1 (1 1))")))}));
  EXPECT_THROW(copy_values(EmbeddingCopy{{Q(1, 2)}, {es[1]}}, c, cat), DomainError);
}

TEST(MinOscillation, SmallCases) {
  TreeCatalog cat;
  std::mt19937_64 rng(3);
  for (std::size_t n = 2; n <= 5; ++n) {
    EmbeddingTable table(2, n, cat);
    for (int trial = 0; trial < 5; ++trial)
      EXPECT_EQ(min_oscillation_copy(random_binary_coloring(n, rng), table).oscillation, 0);
  }
  EmbeddingTable t33(3, 3, cat);
  for (std::uint64_t bits = 0; bits < 4; ++bits) {
    const Coloring c = Coloring::from_bits(3, bits);
    EXPECT_EQ(min_oscillation_copy(c, t33).oscillation, abs_rational(c.values()[0] - c.values()[1]));
  }
  EmbeddingTable t34(3, 4, cat);
  for (std::uint64_t bits = 0; bits < 32; ++bits) {
    const auto res = min_oscillation_copy(Coloring::from_bits(4, bits), t34);
    EXPECT_EQ(res.oscillation, 0) << bits;
    validate_copy(res.copy);
    EXPECT_EQ(copy_values(res.copy, Coloring::from_bits(4, bits), cat).oscillation, 0);
  }
}

TEST(MinOscillation, MatchesVertexEnumerationOracle) {
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<long> num(0, 12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 3, pts = 2 + trial % 4;
    ValueMatrix cols(k, std::vector<Rational>(pts));
    for (auto& col : cols)
      for (auto& v : col) v = Q(num(rng), 12);
    EXPECT_EQ(min_oscillation_columns(cols).oscillation, min_spread_by_vertices(cols)) << "trial " << trial;
  }
}

TEST(MinOscillation, MoreEmbeddingsNeverHurt) {
  std::mt19937_64 rng(89);
  std::uniform_int_distribution<long> num(0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + trial % 5, pts = 2 + trial % 5;
    ValueMatrix cols(k, std::vector<Rational>(pts));
    for (auto& col : cols)
      for (auto& v : col) v = Q(num(rng), 6);
    const ValueMatrix fewer(cols.begin(), cols.end() - 1);
    EXPECT_LE(min_oscillation_columns(cols).oscillation, min_oscillation_columns(fewer).oscillation);
  }
}

TEST(ConstantCopy, AgreesWithZeroOscillationAndSignOracle) {
  TreeCatalog cat;
  for (std::size_t n = 3; n <= 5; ++n) {
    EmbeddingTable table(3, n, cat);
    const std::uint64_t total = std::uint64_t{1} << catalan(n - 1);
    for (std::uint64_t bits = 0; bits < total; ++bits) {
      const Coloring c = Coloring::from_bits(n, bits);
      const auto cc = constant_copy_exists(c, table);
      const bool zero = min_oscillation_copy(c, table).oscillation == 0;
      ASSERT_EQ(cc.copy.has_value(), zero) << "n=" << n << " bits=" << bits;
      ASSERT_EQ(cc.copy.has_value(), constant_copy_by_signs(table, c));
      if (cc.copy) {
        validate_copy(*cc.copy);
        const auto vals = copy_values(*cc.copy, c, cat);
        EXPECT_EQ(vals.oscillation, 0);
        EXPECT_EQ(vals.values.front(), *cc.constant);
      } else {
        EXPECT_TRUE(verify_farkas(cc.lp, cc.farkas));
      }
    }
  }
  EXPECT_THROW(constant_copy_exists(Coloring(3, {Q(1, 2), Q(0)}), EmbeddingTable(3, 3, cat)), DomainError);
}

TEST(ConstantCopy, ConstantColoringUsesOneEmbedding) {
  TreeCatalog cat;
  const auto cc = constant_copy_exists(Coloring(5, std::vector<Rational>(14, Q(1))), EmbeddingTable(3, 5, cat));
  ASSERT_TRUE(cc.copy.has_value());
  EXPECT_EQ(cc.copy->embeddings.size(), 1u);
  EXPECT_EQ(*cc.constant, 1);
}

TEST(Adversary, Examples) {
  TreeCatalog cat;
  const auto a33 = adversarial_coloring_search(EmbeddingTable(3, 3, cat), Q(0), 50, 1);
  ASSERT_TRUE(a33.witness.has_value());
  EXPECT_EQ(a33.best_oscillation, 1);
  EXPECT_NE(a33.witness->values()[0], a33.witness->values()[1]);
  EXPECT_FALSE(adversarial_coloring_search(EmbeddingTable(3, 4, cat), Q(0), 200, 1).witness.has_value());
  for (std::size_t n = 2; n <= 5; ++n)
    EXPECT_FALSE(adversarial_coloring_search(EmbeddingTable(2, n, cat), Q(0), 100, 9).witness.has_value());
}

TEST(Adversary, ReproducibleAcrossThreadCounts) {
  TreeCatalog cat;
  EmbeddingTable table(4, 6, cat);
  const auto a = adversarial_coloring_search(table, Q(1, 2), 60, 5, 1);
  const auto b = adversarial_coloring_search(table, Q(1, 2), 60, 5, 3);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.best_oscillation, b.best_oscillation);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Scan, SmallM) {
  ScanOptions opt;
  opt.threshold = 0;
  const auto two = scan_minimal_n(2, 2, opt);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].verdict, Verdict::suffices);
  const auto three = scan_minimal_n(3, 4, opt);
  ASSERT_EQ(three.size(), 2u);
  EXPECT_EQ(three[0].verdict, Verdict::fails);
  EXPECT_EQ(three[0].certificate_kind, "witness");
  EXPECT_EQ(three[0].oscillation, 1);
  ASSERT_TRUE(three[0].witness.has_value());
  TreeCatalog cat;
  // Independent re-check of the witness.
  EXPECT_EQ(min_oscillation_copy(*three[0].witness, EmbeddingTable(3, 3, cat)).oscillation, 1);
  EXPECT_EQ(three[1].verdict, Verdict::suffices);
  EXPECT_EQ(three[1].certificate_kind, "exhaustive");
  EXPECT_EQ(three[1].colorings_checked, 32u);
}

TEST(StrongCopies, PureRegimeAndGapColoring) {
  EXPECT_TRUE(strong_copies_are_pure(3, 4));
  EXPECT_FALSE(strong_copies_are_pure(3, 5));
  const auto res = strong_copy_search(gap_coloring(), 3, {});
  ASSERT_TRUE(res.best.has_value());
  EXPECT_TRUE(res.exhaustive);
  EXPECT_EQ(res.evaluations, 3u);
  EXPECT_EQ(res.best->oscillation, 1);
  TreeCatalog cat;
  // Every embedding of T_3 in T_4 is defeated by hand as well.
  for (const auto& e : enumerate_embeddings(3, 4, cat)) {
    const auto c = gap_coloring();
    EXPECT_NE(c(e.apply(T("((1 1) 1)"))), c(e.apply(T("(1 (1 1))"))));
  }
  const auto cc = constant_copy_exists(gap_coloring(), EmbeddingTable(3, 4, cat));
  ASSERT_TRUE(cc.copy.has_value());
  EXPECT_EQ(*cc.constant, Q(1, 2));
}

TEST(StrongCopies, TrivialCases) {
  const auto constant = strong_copy_search(Coloring(5, std::vector<Rational>(14, Q(0))), 3, {});
  EXPECT_EQ(constant.best->oscillation, 0);
  std::mt19937_64 rng(4);
  const auto two = strong_copy_search(random_binary_coloring(5, rng), 2, {});
  EXPECT_EQ(two.best->oscillation, 0);
}

TEST(StrongCopies, ExpansionIsAValidCopyWithTheSameValues) {
  TreeCatalog cat;
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6;
    const Coloring c = random_binary_coloring(n, rng);
    StrongSearchOptions opt;
    opt.seed = static_cast<std::uint64_t>(trial);
    opt.budget = 30;
    const auto res = strong_copy_search(c, 3, opt);
    ASSERT_TRUE(res.best.has_value());
    const auto copy = expand_strong_copy(res.best->measures);
    validate_copy(copy);
    const auto vals = copy_values(copy, c, cat);
    EXPECT_EQ(vals.values, res.best->values);
    EXPECT_EQ(vals.oscillation, res.best->oscillation);
  }
  // A hand-built strong copy with genuinely mixed measures.
  const std::vector<Measure<Tree>> mus = {
      make_measure<Tree>({{T("(1 1)"), Q(1, 3)}, {T("1"), Q(2, 3)}}) , Measure<Tree>::point(T("1")),
      Measure<Tree>::point(T("1"))};
  EXPECT_THROW(validate_copy(expand_strong_copy(mus)), DomainError);  // mixed sizes are not a copy in one A_n
  const std::vector<Measure<Tree>> same = {uniform_measure(enumerate_trees(3)), Measure<Tree>::point(T("1")),
                                           Measure<Tree>::point(T("(1 1)"))};
  const auto copy = expand_strong_copy(same);
  validate_copy(copy);
  const Coloring c = random_binary_coloring(6, rng);
  EXPECT_EQ(copy_values(copy, c, cat).values, strong_copy_values(same, c, cat.trees(3)));
}

TEST(ColoringFiles, RoundTripAndDiagnostics) {
  TreeCatalog cat;
  std::mt19937_64 rng(101);
  for (std::size_t n = 1; n <= 6; ++n) {
    const Coloring c = random_binary_coloring(n, rng);
    EXPECT_EQ(parse_coloring(format_coloring(c, cat)), c);
  }
  const Coloring frac(3, {Q(1, 3), Q(2, 3)});
  EXPECT_EQ(parse_coloring(format_coloring(frac, cat)), frac);
  const std::string missing = "tree,value\n((1 1) 1),1/1\n";
  try {
    parse_coloring(missing);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(1 (1 1))"), std::string::npos);
  }
  EXPECT_THROW(parse_coloring("tree,value\n((1 1) 1),3/2\n(1 (1 1)),0\n"), DomainError);
  EXPECT_THROW(parse_coloring("tree,value\n((1 1) 1),1\n(1 1),0\n"), DomainError);
  EXPECT_EQ(gap_coloring()(T("(((1 1) 1) 1)")), 1);
  EXPECT_EQ(gap_coloring()(T("((1 1) (1 1))")), 0);
}

TEST(ArtifactValidation, Diagnostics) {
  EXPECT_EQ(validate_artifact_text("tree,weight\n1,1/2\n(1 1),1/4\n"), "weights sum to 3/4 (deficit 1/4)");
  EXPECT_EQ(validate_artifact_text("tree,weight\n1,1/2\n(1 1),1/2\n"), "ok");
  EXPECT_EQ(validate_artifact_text("2\n0 1\n1 0\n"), "ok");
  EXPECT_NE(validate_artifact_text("2\n0 1\n1 5\n"), "ok");
  EXPECT_NE(validate_artifact_text("tree,value\n((1 1) 1),1\n").find("(1 (1 1))"), std::string::npos);
  const auto mu = make_measure<Tree>({{T("1"), Q(1, 3)}, {T("((1 1) 1)"), Q(2, 3)}});
  EXPECT_EQ(parse_tree_measure(format_tree_measure(mu)), mu);
  const auto nu = make_measure<Element>({{0, Q(1, 2)}, {3, Q(1, 2)}});
  EXPECT_EQ(parse_element_measure(format_element_measure(nu)), nu);
}
