#include <gtest/gtest.h>

#include "burststream/markov.hpp"
#include "oracles.hpp"

using namespace bst;
using oracle::hb;

TEST(Markov, KStepIdentityAndClosedForm) {
  const auto c = FiniteMarkovChain::binary_symmetric(0.2);
  const auto I = k_step(c, 0);
  EXPECT_DOUBLE_EQ(I[0][0], 1.0);
  EXPECT_DOUBLE_EQ(I[0][1], 0.0);
  for (size_t k = 1; k <= 8; ++k) {
    // repeated multiplication oracle
    RealMatrix m = c.P();
    for (size_t i = 1; i < k; ++i) m = mat_mul(m, c.P());
    const double ek = (1.0 - std::pow(1.0 - 0.4, double(k))) / 2.0;
    EXPECT_NEAR(k_step(c, k)[0][1], ek, 1e-14);
    EXPECT_NEAR(m[0][1], ek, 1e-14);
  }
  const auto u = k_step(FiniteMarkovChain::binary_symmetric(0.5), 3);
  EXPECT_NEAR(u[1][0], 0.5, 1e-15);
}

TEST(Markov, CondEntropyGap) {
  EXPECT_NEAR(cond_entropy_gap(FiniteMarkovChain::binary_symmetric(0.5), 1), 1.0, 1e-15);
  EXPECT_EQ(cond_entropy_gap(FiniteMarkovChain::binary_symmetric(0.0), 5), 0.0);
  const auto c = FiniteMarkovChain::binary_symmetric(0.25);
  const oracle::PathJoint pj(c, 2);
  EXPECT_NEAR(cond_entropy_gap(c, 2), pj.Hcond({2}, {0}), 1e-12);
  EXPECT_NEAR(cond_entropy_gap(c, 2), 0.954434, 1e-6);
  EXPECT_NEAR(cond_entropy_gap(c, 2), hb(0.375), 1e-12);
}

TEST(Markov, CondMutualInfo) {
  const auto c = FiniteMarkovChain::binary_symmetric(0.25);
  EXPECT_EQ(cond_mutual_info(c, 0, 3), 0.0);
  EXPECT_NEAR(cond_mutual_info(FiniteMarkovChain::binary_symmetric(0.5), 2, 2), 0.0, 1e-15);
  const oracle::PathJoint pj(c, 2);
  EXPECT_NEAR(cond_mutual_info(c, 1, 1), pj.I({1}, {2}, {0}), 1e-12);
}

TEST(Markov, BlockCondEntropy) {
  const auto c = FiniteMarkovChain::binary_symmetric(0.25);
  EXPECT_NEAR(block_cond_entropy(c, 2, 0), cond_entropy_gap(c, 3), 1e-15);
  EXPECT_NEAR(block_cond_entropy(FiniteMarkovChain::binary_symmetric(0.5), 3, 2), 3.0, 1e-12);
  const oracle::PathJoint pj(c, 4);
  EXPECT_NEAR(block_cond_entropy(c, 1, 2), pj.Hcond({2, 3, 4}, {0}), 1e-12);
  EXPECT_NEAR(block_cond_entropy(c, 1, 2), hb(0.375) + 2 * hb(0.25), 1e-12);
}

TEST(Markov, IsSymmetric) {
  EXPECT_TRUE(is_symmetric(FiniteMarkovChain::binary_symmetric(0.3)));
  const FiniteMarkovChain two({{0.9, 0.1}, {0.4, 0.6}});
  EXPECT_NEAR(two.pi()[0], 0.8, 1e-13);
  EXPECT_NEAR(two.pi()[0] * 0.1, 0.08, 1e-13);
  EXPECT_TRUE(is_symmetric(two));
  const FiniteMarkovChain cyc({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  EXPECT_FALSE(is_symmetric(cyc));
}

TEST(Markov, StationaryMatchesDirectSolve) {
  Rng rng(4);
  for (int it = 0; it < 30; ++it) {
    const auto c = oracle::random_chain(2 + rng.below(5), rng);
    const auto d = stationary_direct(c.P());
    for (size_t a = 0; a < c.alphabet(); ++a) EXPECT_NEAR(c.pi()[a], d[a], 1e-12);
  }
}

TEST(Markov, RejectsBadRows) {
  EXPECT_THROW(FiniteMarkovChain({{0.5, 0.4}, {0.5, 0.5}}), std::invalid_argument);
  EXPECT_THROW(FiniteMarkovChain::from_json(nlohmann::json{{"P", {{1.0}}}, {"alphabet", 2}}),
               std::invalid_argument);
}

TEST(MarkovProperties, BlockEntropyIdentity) {
  Rng rng(17);
  for (int it = 0; it < 60; ++it) {
    const auto c = oracle::random_chain(2 + rng.below(5), rng);
    const size_t B = rng.below(5), W = rng.below(5);
    const double lhs = block_cond_entropy(c, B, W);
    // both forms: I(s_B; s_{B+1} | s_0) and I(s_{B+1}; s_B | s_0)
    EXPECT_NEAR(lhs, cond_mutual_info(c, B, 1) + double(W + 1) * cond_entropy_gap(c, 1), 1e-9);
    EXPECT_NEAR(lhs, cond_entropy_gap(c, B + 1) - cond_entropy_gap(c, 1) + double(W + 1) * cond_entropy_gap(c, 1),
                1e-9);
  }
}

TEST(MarkovProperties, MutualInfoNonincreasingInGap) {
  Rng rng(18);
  for (int it = 0; it < 40; ++it) {
    const auto c = oracle::random_chain(2 + rng.below(5), rng);
    const size_t B = 1 + rng.below(3);
    double prev = cond_mutual_info(c, B, 1);
    for (size_t g = 2; g <= 8; ++g) {
      const double cur = cond_mutual_info(c, B, g);
      EXPECT_LE(cur, prev + 1e-12);
      prev = cur;
    }
  }
}

TEST(MarkovProperties, GapEntropyNondecreasingForSymmetric) {
  for (double e : {0.05, 0.1, 0.25, 0.4}) {
    const auto c = FiniteMarkovChain::binary_symmetric(e);
    for (size_t k = 1; k < 10; ++k) EXPECT_LE(cond_entropy_gap(c, k), cond_entropy_gap(c, k + 1) + 1e-12);
  }
}
