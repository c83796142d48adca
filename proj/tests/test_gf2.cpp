#include <gtest/gtest.h>

#include <set>

#include "burststream/gf2.hpp"

using namespace bst;

namespace {

// Rank by enumerating all 2^r row combinations: rank = log2(#distinct spans).
size_t rank_by_enumeration(const BitMatrix &m) {
  std::set<std::string> span;
  const size_t r = m.rows();
  for (uint64_t mask = 0; mask < (uint64_t(1) << r); ++mask) {
    std::string v(m.cols(), '0');
    for (size_t i = 0; i < r; ++i)
      if (mask >> i & 1)
        for (size_t j = 0; j < m.cols(); ++j)
          if (m.get(i, j)) v[j] = v[j] == '0' ? '1' : '0';
    span.insert(v);
  }
  size_t k = 0;
  while ((size_t(1) << k) < span.size()) ++k;
  return k;
}

}  // namespace

TEST(Gf2Rank, SpecExamples) {
  EXPECT_EQ(rank(BitMatrix::identity(4)), 4u);
  EXPECT_EQ(rank(BitMatrix::zero(3, 5)), 0u);
  EXPECT_EQ(rank(BitMatrix::from_rows({"110", "011", "101"})), 2u);
}

TEST(Gf2Rank, MatchesEnumerationAndTranspose) {
  Rng rng(7);
  for (int it = 0; it < 200; ++it) {
    const size_t r = 1 + rng.below(7), c = 1 + rng.below(9);
    const BitMatrix m = BitMatrix::random(r, c, rng);
    const size_t k = rank(m);
    EXPECT_EQ(k, rank_by_enumeration(m));
    EXPECT_EQ(k, rank(m.transpose()));
    EXPECT_LE(k, std::min(r, c));
  }
}

TEST(Gf2Rref, SpecExamples) {
  auto a = rref(BitMatrix::identity(3));
  EXPECT_EQ(a.matrix, BitMatrix::identity(3));
  EXPECT_EQ(a.pivots, (std::vector<size_t>{0, 1, 2}));
  auto b = rref(BitMatrix::from_rows({"11", "11"}));
  EXPECT_EQ(b.matrix, BitMatrix::from_rows({"11", "00"}));
  EXPECT_EQ(b.pivots, (std::vector<size_t>{0}));
  auto c = rref(BitMatrix::from_rows({"011", "101"}));
  EXPECT_EQ(c.matrix, BitMatrix::from_rows({"101", "011"}));
  EXPECT_EQ(c.pivots, (std::vector<size_t>{0, 1}));
}

TEST(Gf2Rref, IdempotentAndMatchesReference) {
  Rng rng(11);
  for (int it = 0; it < 100; ++it) {
    const BitMatrix m = BitMatrix::random(1 + rng.below(80), 1 + rng.below(140), rng);
    const auto r1 = rref(m);
    const auto r2 = rref(r1.matrix);
    EXPECT_EQ(r1.matrix, r2.matrix);
    EXPECT_EQ(r1.pivots, r2.pivots);
    const auto ref = reference::rref(m);
    EXPECT_EQ(r1.matrix, ref.matrix);
    EXPECT_EQ(r1.pivots, ref.pivots);
    for (size_t k = 1; k < r1.pivots.size(); ++k) EXPECT_LT(r1.pivots[k - 1], r1.pivots[k]);
  }
}

TEST(Gf2Rref, LargeParallelPathMatchesReference) {
  Rng rng(12);
  const BitMatrix m = BitMatrix::random(300, 280, rng);
  EXPECT_EQ(rref(m).matrix, reference::rref(m).matrix);
}

TEST(Gf2Solve, SpecExamples) {
  Rng rng(3);
  const BitMatrix b = BitMatrix::random(2, 3, rng);
  EXPECT_EQ(*solve(BitMatrix::identity(2), b), b);

  const BitMatrix a = BitMatrix::from_rows({"11"});
  const auto x = solve(a, BitMatrix::from_rows({"1"}));
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ(*x, BitMatrix::from_rows({"1", "0"}));
  // enumerate the 4 candidates: exactly [1,0] and [0,1] solve; free var zeroed picks [1,0]
  int solutions = 0;
  for (int v = 0; v < 4; ++v) solutions += ((v & 1) ^ (v >> 1 & 1)) == 1;
  EXPECT_EQ(solutions, 2);

  EXPECT_FALSE(solve(BitMatrix::from_rows({"0", "0"}), BitMatrix::from_rows({"1", "0"})).has_value());
}

TEST(Gf2Solve, SolutionsAreExact) {
  Rng rng(5);
  for (int it = 0; it < 200; ++it) {
    const size_t r = 1 + rng.below(12), c = 1 + rng.below(12), k = 1 + rng.below(4);
    const BitMatrix a = BitMatrix::random(r, c, rng);
    const BitMatrix b = a * BitMatrix::random(c, k, rng);
    auto x = solve(a, b);
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(a * *x, b);
  }
}

TEST(Gf2SolveUnique, MatchesReference) {
  Rng rng(9);
  for (int it = 0; it < 60; ++it) {
    const size_t c = 1 + rng.below(150), r = c + rng.below(20);
    const BitMatrix a = BitMatrix::random(r, c, rng);
    const BitVector x = BitVector::random(c, rng);
    BitVector b = a * x;
    if (it % 5 == 0) b.flip(0);
    const auto fast = solve_unique(a, b);
    const auto ref = reference::solve_unique(a, b);
    ASSERT_EQ(fast.has_value(), ref.has_value());
    if (fast) {
      EXPECT_EQ(*fast, *ref);
      EXPECT_EQ(a * *fast, b);
    }
  }
}

TEST(Gf2Invert, SpecExamples) {
  EXPECT_EQ(invert(BitMatrix::identity(5)), BitMatrix::identity(5));
  const BitMatrix m = BitMatrix::from_rows({"11", "01"});
  EXPECT_EQ(invert(m), m);
  Rng rng(21);
  for (int it = 0; it < 20; ++it) {
    const BitMatrix r = BitMatrix::random_invertible(8, rng);
    const BitMatrix ri = invert(r);
    EXPECT_EQ(r * ri, BitMatrix::identity(8));
    EXPECT_EQ(ri * r, BitMatrix::identity(8));
  }
  EXPECT_THROW(invert(BitMatrix::from_rows({"11", "11"})), std::domain_error);
}

TEST(Gf2IndependentRows, SpecExamples) {
  auto a = independent_rows(BitMatrix::identity(3), 3);
  EXPECT_EQ(a.perm, (std::vector<size_t>{0, 1, 2}));
  EXPECT_EQ(a.V.rows(), 0u);

  auto b = independent_rows(BitMatrix::from_rows({"10", "10"}), 1);
  EXPECT_EQ(b.perm, (std::vector<size_t>{0, 1}));
  EXPECT_EQ(b.V, BitMatrix::from_rows({"1"}));

  auto c = independent_rows(BitMatrix::from_rows({"00", "11", "11"}), 1);
  EXPECT_EQ(c.perm, (std::vector<size_t>{1, 0, 2}));
  EXPECT_EQ(c.V, BitMatrix::from_rows({"0", "1"}));

  EXPECT_THROW(independent_rows(BitMatrix::identity(3), 2), std::invalid_argument);
}

TEST(Gf2IndependentRows, Reconstructs) {
  Rng rng(31);
  for (int it = 0; it < 100; ++it) {
    const size_t r = 1 + rng.below(8), c = 1 + rng.below(8);
    const size_t k0 = 1 + rng.below(std::min(r, c));
    const BitMatrix m = BitMatrix::random(r, k0, rng) * BitMatrix::random(k0, c, rng);
    const size_t k = rank(m);
    const auto ir = independent_rows(m, k);
    std::vector<size_t> ind(ir.perm.begin(), ir.perm.begin() + long(k));
    std::vector<size_t> dep(ir.perm.begin() + long(k), ir.perm.end());
    const BitMatrix I = m.select_rows(ind);
    EXPECT_EQ(rank(I), k);
    if (!dep.empty()) EXPECT_EQ(ir.V * I, m.select_rows(dep));
  }
}

TEST(Gf2Json, Roundtrip) {
  Rng rng(1);
  const BitMatrix m = BitMatrix::random(3, 7, rng);
  const auto j = to_json(m);
  EXPECT_EQ(j["rows"], 3);
  EXPECT_EQ(j["data"][0].get<std::string>().size(), 7u);
  EXPECT_EQ(matrix_from_json(j), m);
}

TEST(Gf2Bits, RangeOps) {
  Rng rng(2);
  const BitVector v = BitVector::random(300, rng);
  for (size_t pos : {0, 5, 63, 64, 100, 200}) {
    const BitVector s = v.slice(pos, 77);
    for (size_t i = 0; i < 77; ++i) EXPECT_EQ(s.get(i), v.get(pos + i));
  }
  EXPECT_EQ(BitVector::from_hex(v.to_hex(), 300), v);
}

TEST(Gf2Nullspace, BasisSpansKernel) {
  Rng rng(41);
  for (int it = 0; it < 50; ++it) {
    const BitMatrix m = BitMatrix::random(1 + rng.below(10), 1 + rng.below(14), rng);
    const BitMatrix ns = nullspace(m);
    EXPECT_EQ(ns.rows(), m.cols() - rank(m));
    EXPECT_TRUE((m * ns.transpose()).is_zero());
    if (ns.rows()) EXPECT_EQ(rank(ns), ns.rows());
  }
  EXPECT_EQ(nullspace(BitMatrix::identity(3)).rows(), 0u);
}

TEST(Gf2FixedSolver, MatchesReferenceSolve) {
  Rng rng(77);
  for (int it = 0; it < 40; ++it) {
    const size_t n = 1 + rng.below(70), rows = n + rng.below(8);
    const BitMatrix a = BitMatrix::random(rows, n, rng);
    const FixedSolver fs(a);
    for (int k = 0; k < 3; ++k) {
      const BitVector b = (k == 0) ? BitVector::random(rows, rng) : a * BitVector::random(n, rng);
      const auto want = reference::solve_unique(a, b);
      const auto got = fs.solve(b);
      ASSERT_EQ(got.has_value(), want.has_value());
      if (got) EXPECT_EQ(*got, *want);
    }
  }
}

TEST(Gf2FixedSolver, WideMatrixNeverUnique) {
  Rng rng(3);
  const FixedSolver fs(BitMatrix::random(4, 6, rng));
  EXPECT_FALSE(fs.unique());
  EXPECT_FALSE(fs.solve(BitVector(4)).has_value());
}
