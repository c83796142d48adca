#include <gtest/gtest.h>

#include <cmath>

#include "burststream/sources.hpp"

using namespace bst;

TEST(Sources, IidWhenKZero) {
  const DiagonalSourceSpec s{{3}, {}};
  const auto tr = gen_diagonal(s, 4, 50, 1);
  EXPECT_TRUE(validate_diagonal_trace(s, tr));
  EXPECT_EQ(tr.width, 3u);
  size_t ones = 0;
  for (long t = 0; t < 50; ++t) ones += tr.at(t).popcount();
  EXPECT_GT(ones, 200u);
  EXPECT_LT(ones, 400u);
}

TEST(Sources, ShiftStructure) {
  const DiagonalSourceSpec s{{1, 1}, {BitMatrix::identity(1)}};
  const auto tr = gen_diagonal(s, 3, 40, 2);
  for (long t = tr.t_min + 1; t < 40; ++t)
    for (size_t c = 0; c < 3; ++c) EXPECT_EQ(tr.sub(t, c, 1, 1), tr.sub(t - 1, c, 0, 1));
}

TEST(Sources, RandomDiagonalRecomputed) {
  Rng rng(5);
  for (int it = 0; it < 20; ++it) {
    std::vector<size_t> N{1 + rng.below(4)};
    for (size_t k = 0, K = rng.below(4); k < K; ++k) N.push_back(1 + rng.below(N.back()));
    const auto spec = DiagonalSourceSpec::random(N, rng);
    const auto tr = gen_diagonal(spec, 2, 30, rng.next());
    EXPECT_EQ(tr.t_min, -long(spec.K()) - 1);
    for (long t = tr.t_min + 1; t < 30; ++t)
      for (size_t c = 0; c < 2; ++c)
        for (size_t j = 1; j <= spec.K(); ++j) {
          BitVector expect = spec.R[j - 1] * tr.sub(t - 1, c, spec.offset(j - 1), N[j - 1]);
          EXPECT_EQ(tr.sub(t, c, spec.offset(j), N[j]), expect);
        }
  }
}

TEST(Sources, DiagonalSpecValidation) {
  EXPECT_THROW((DiagonalSourceSpec{{1, 2}, {BitMatrix::from_rows({"1", "1"})}}).validate(), std::invalid_argument);
  EXPECT_THROW((DiagonalSourceSpec{{2, 1}, {BitMatrix::from_rows({"00"})}}).validate(), std::invalid_argument);
  Rng rng(1);
  const auto s = DiagonalSourceSpec::random({3, 2, 1}, rng);
  const auto back = DiagonalSourceSpec::from_json(s.to_json());
  EXPECT_EQ(back.N, s.N);
  for (size_t j = 0; j < 2; ++j) EXPECT_EQ(back.R[j], s.R[j]);
  EXPECT_EQ(s.prod(2, 0), s.R[1] * s.R[0]);
  EXPECT_EQ(s.prod(1, 1), BitMatrix::identity(2));
}

TEST(Sources, SemiDetExamples) {
  const SemiDetSpec zero{2, 2, BitMatrix::zero(2, 2), BitMatrix::zero(2, 2)};
  const auto tz = gen_semidet(zero, 2, 20, 3);
  for (long t = 0; t < 20; ++t)
    for (size_t c = 0; c < 2; ++c) EXPECT_FALSE(tz.sub(t, c, 2, 2).any());

  const SemiDetSpec shift{2, 2, BitMatrix::identity(2), BitMatrix::zero(2, 2)};
  const auto ts = gen_semidet(shift, 2, 20, 4);
  for (long t = 0; t < 20; ++t)
    for (size_t c = 0; c < 2; ++c) EXPECT_EQ(ts.sub(t, c, 2, 2), ts.sub(t - 1, c, 0, 2));

  Rng rng(6);
  for (int it = 0; it < 20; ++it) {
    const auto spec = SemiDetSpec::random(1 + rng.below(5), 1 + rng.below(5), rng);
    const auto tr = gen_semidet(spec, 3, 25, rng.next());
    EXPECT_TRUE(validate_semidet_trace(spec, tr));
    for (long t = 0; t < 25; ++t)
      for (size_t c = 0; c < 3; ++c) {
        BitVector expect = spec.A * tr.sub(t - 1, c, 0, spec.N0);
        expect ^= spec.B * tr.sub(t - 1, c, spec.N0, spec.Nd);
        EXPECT_EQ(tr.sub(t, c, spec.N0, spec.Nd), expect);
      }
  }
}

TEST(Sources, SameSeedSameTrace) {
  Rng rng(8);
  const auto spec = DiagonalSourceSpec::random({3, 2}, rng);
  EXPECT_EQ(gen_diagonal(spec, 4, 10, 9).sym, gen_diagonal(spec, 4, 10, 9).sym);
  EXPECT_NE(gen_diagonal(spec, 4, 10, 9).sym, gen_diagonal(spec, 4, 10, 10).sym);
}

TEST(Sources, CopiesLookIndependent) {
  // 2x2 contingency of bit 0 across copies 0 and 1, chi-square with 1 dof.
  const DiagonalSourceSpec s{{1}, {}};
  const auto tr = gen_diagonal(s, 2, 20000, 12);
  double cnt[2][2] = {{0, 0}, {0, 0}};
  for (long t = 0; t < 20000; ++t) cnt[tr.at(t).get(0)][tr.at(t).get(1)] += 1;
  double chi = 0;
  for (auto &row : cnt)
    for (double v : row) chi += (v - 5000) * (v - 5000) / 5000;
  EXPECT_LT(chi, 10.83);
}

TEST(Sources, NormalizeK) {
  Rng rng(2);
  const auto s2 = DiagonalSourceSpec::random({2, 2, 1}, rng);
  EXPECT_EQ(normalize_K(s2, 1, 1).spec.N, s2.N);
  const auto s1 = DiagonalSourceSpec::random({2, 1}, rng);
  const auto n1 = normalize_K(s1, 1, 1);
  EXPECT_EQ(n1.spec.N, (std::vector<size_t>{2, 1, 0}));
  EXPECT_FALSE(n1.truncated());
  const auto s3 = DiagonalSourceSpec::random({3, 2, 2, 1}, rng);
  const auto n3 = normalize_K(s3, 1, 1);
  EXPECT_EQ(n3.spec.K(), 2u);
  EXPECT_TRUE(n3.truncated());
}

TEST(Sources, CompleteTailRebuildsTruncatedBlocks) {
  Rng rng(3);
  const auto s3 = DiagonalSourceSpec::random({3, 2, 2, 1}, rng);
  const auto ns = normalize_K(s3, 1, 1);
  const auto tr = gen_diagonal(s3, 2, 20, 4);
  const auto tt = truncate_trace(ns, tr);
  for (long t = 0; t < 20; ++t)
    for (size_t c = 0; c < 2; ++c)
      for (size_t m : {1, 2, 3}) EXPECT_EQ(complete_tail(ns, tt.copy(t, c), tr.copy(t - long(m), c), m), tr.copy(t, c));
}

TEST(Sources, BinaryMarkov) {
  const auto c0 = gen_binary_markov(0.0, 5, 30, 1);
  for (size_t t = 0; t < 30; ++t) EXPECT_EQ(c0.x[t], c0.initial);
  const auto c1 = gen_binary_markov(1.0, 5, 30, 1);
  for (size_t t = 0; t < 30; ++t)
    for (size_t i = 0; i < 5; ++i) EXPECT_EQ(c1.x[t][i], c1.initial[i] ^ ((t + 1) & 1));
  const double eps = 0.2;
  const auto c = gen_binary_markov(eps, 10, 10000, 3);
  size_t flips = 0;
  for (size_t t = 1; t < 10000; ++t)
    for (size_t i = 0; i < 10; ++i) flips += c.x[t][i] != c.x[t - 1][i];
  const double n = 99990, sigma = std::sqrt(n * eps * (1 - eps));
  EXPECT_LT(std::abs(double(flips) - n * eps), 3 * sigma);
  EXPECT_THROW(gen_binary_markov(1.5, 1, 1, 1), std::invalid_argument);
}

TEST(Sources, GaussianMoments) {
  const auto g = gen_gaussian_iid(1000, 20, 5);
  double m = 0, v = 0;
  for (const auto &row : g.x)
    for (double x : row) m += x, v += x * x;
  m /= 20000;
  v /= 20000;
  EXPECT_LT(std::abs(m), 0.03);
  EXPECT_LT(std::abs(v - 1), 0.05);
}

TEST(Sources, SemidetRankEntropy) {
  // A = I, B = 0 is the shift source: H(s_k|s_0) = N0 + Nd for k >= 2.
  const SemiDetSpec shift{2, 2, BitMatrix::identity(2), BitMatrix::zero(2, 2)};
  EXPECT_EQ(semidet_cond_entropy_rank(shift, 1), 2u);
  EXPECT_EQ(semidet_cond_entropy_rank(shift, 3), 4u);
  const SemiDetSpec zero{3, 2, BitMatrix::zero(2, 3), BitMatrix::identity(2)};
  EXPECT_EQ(semidet_cond_entropy_rank(zero, 4), 3u);
  const Rational r = semidet_r_minus_exact(shift, 1, 1);
  EXPECT_EQ(double(r.num) / double(r.den), diagonal_rate({2, 2}, 1, 1));
}
