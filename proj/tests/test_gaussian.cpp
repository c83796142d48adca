#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "burststream/gaussian_stream.hpp"
#include "burststream/rates.hpp"
#include "oracles.hpp"

using namespace bst;

namespace {

const std::vector<double> kSixLevel{0.1, 0.25, 0.4, 0.55, 0.7, 0.85};

double hl(double v) { return 0.5 * std::log2(1.0 / v); }

std::vector<double> gaussian_block(size_t n, uint64_t seed) { return gen_gaussian_iid(n, 1, seed).x[0]; }

}  // namespace

TEST(LayerRates, SixLevelVectorW0) {
  const LayerRates lr = layer_rates(kSixLevel, 2, 0);
  ASSERT_EQ(lr.tilde.size(), 3u);
  EXPECT_NEAR(lr.tilde[0], 0.5 * std::log2(0.25 / 0.1), 1e-12);
  EXPECT_NEAR(lr.tilde[1], 0.5 * std::log2(0.4 / 0.25), 1e-12);
  EXPECT_NEAR(lr.tilde[2], 0.5 * std::log2(1 / 0.4), 1e-12);
  for (size_t j = 0; j < 3; ++j) EXPECT_NEAR(lr.cum[j], hl(kSixLevel[j]), 1e-12);
}

TEST(LayerRates, CumulativeMatchesTargets) {
  for (size_t B = 0; B <= 3; ++B)
    for (size_t W = 0; W + B <= 5; ++W) {
      const LayerRates lr = layer_rates(kSixLevel, B, W);
      double acc = 0.0;
      for (size_t j = B + 1; j-- > 0;) {
        acc += lr.tilde[j];
        EXPECT_GE(lr.tilde[j], -1e-12);
        EXPECT_NEAR(lr.cum[j], acc, 1e-12);
        EXPECT_NEAR(acc, hl(j == 0 ? kSixLevel[0] : kSixLevel[W + j]), 1e-12);
      }
    }
}

TEST(LayerRates, SingleLayerAndFlatMiddle) {
  const LayerRates one = layer_rates({0.25}, 0, 0);
  ASSERT_EQ(one.tilde.size(), 1u);
  EXPECT_NEAR(one.tilde[0], 1.0, 1e-12);
  const LayerRates flat = layer_rates({0.1, 0.5, 0.5, 0.5}, 3, 0);
  EXPECT_NEAR(flat.tilde[1], 0.0, 1e-12);
  EXPECT_NEAR(flat.tilde[2], 0.0, 1e-12);
  EXPECT_NEAR(flat.tilde[3], 0.5, 1e-12);
}

TEST(LayerRates, NormalizationPadsAndTruncates) {
  EXPECT_EQ(normalize_distortions({0.2}, 1, 1), (std::vector<double>{0.2, 1.0, 1.0}));
  EXPECT_EQ(normalize_distortions(kSixLevel, 1, 1), (std::vector<double>{0.1, 0.25, 0.4}));
  EXPECT_THROW(layer_rates({0.5, 0.2}, 1, 0), std::invalid_argument);
  EXPECT_THROW(layer_rates({0.0}, 0, 0), std::invalid_argument);
}

TEST(Alpha, MinimalRoundUpInflation) {
  const LayerRates lr = layer_rates(kSixLevel, 2, 1);
  const AlphaChoice a = choose_alpha(lr);
  double exact = 0.0, sum = 0.0;
  for (size_t j = 0; j < a.bits.size(); ++j) {
    EXPECT_GE(double(a.bits[j]) + 1e-9, double(a.m) * lr.tilde[j]);
    exact += lr.tilde[j];
    sum += double(a.bits[j]);
  }
  EXPECT_NEAR(a.inflation, sum / double(a.m) - exact, 1e-12);
  for (size_t m = 1; m <= 64; ++m) {
    double s = 0.0;
    for (double r : lr.tilde) s += std::ceil(double(m) * r - 1e-9);
    EXPECT_GE(s / double(m) - exact, a.inflation - 1e-12) << m;
  }
}

TEST(Alpha, IntegralRatesNeedNoScaling) {
  const AlphaChoice a = choose_alpha(layer_rates({0.25}, 0, 0));
  EXPECT_EQ(a.m, 1u);
  EXPECT_EQ(a.bits, std::vector<size_t>{1});
  EXPECT_NEAR(a.inflation, 0.0, 1e-12);
}

TEST(SrCodec, ZeroRateReconstructsMean) {
  const SrCodec sr({0}, 100);
  const auto x = gaussian_block(100, 3);
  const SrPlan p = sr.calibrate(x);
  const LayerBundle b = sr.encode(x, p);
  for (double v : sr.decode(b, 0)) EXPECT_EQ(v, 0.0);
}

TEST(SrCodec, SingleLayerOneBit) {
  const size_t n = 100000;
  const SrCodec sr({n}, n);
  const SrPlan p = sr.calibrate(gaussian_block(n, 11));
  const auto x = gaussian_block(n, 12);
  const LayerBundle b = sr.encode(x, p);
  EXPECT_EQ(b.m[0].size(), n);
  EXPECT_LE(mse(x, sr.decode(b, 0)), kGapFactor * 0.25);
}

TEST(SrCodec, NestedReconstructionsRefine) {
  const size_t n = 4000;
  const LayerRates lr = layer_rates(kSixLevel, 2, 1);
  std::vector<size_t> budget;
  for (double r : lr.tilde) budget.push_back(size_t(std::ceil(r * double(n))));
  const SrCodec sr(budget, n);
  const SrPlan p = sr.calibrate(gaussian_block(n, 21));
  for (uint64_t seed = 30; seed < 33; ++seed) {
    const auto x = gaussian_block(n, seed);
    const LayerBundle b = sr.encode(x, p);
    for (size_t j = 0; j < 3; ++j) EXPECT_EQ(b.m[j].size(), budget[j]);
    const double e0 = mse(x, sr.decode(b, 0)), e1 = mse(x, sr.decode(b, 1)), e2 = mse(x, sr.decode(b, 2));
    EXPECT_LE(e0, e1);
    EXPECT_LE(e1, e2);
    EXPECT_LE(e2, 1.0);
  }
}

TEST(SrCodec, DeterministicEncoding) {
  const size_t n = 1000;
  const SrCodec sr({700, 300}, n);
  const auto x = gaussian_block(n, 5);
  const SrPlan p = sr.calibrate(x);
  const LayerBundle a = sr.encode(x, p), b = sr.encode(x, p);
  EXPECT_EQ(a.m[0], b.m[0]);
  EXPECT_EQ(a.m[1], b.m[1]);
}

TEST(Rearrange, SpecValidatesAndWidths) {
  const DiagonalSourceSpec s = gaussian_diag_spec({5, 2, 3}, 2, 1);
  EXPECT_EQ(s.N, (std::vector<size_t>{10, 10, 5, 3}));
  EXPECT_NO_THROW(s.validate());
}

TEST(Rearrange, RandomBundlesFormDiagonalSource) {
  Rng rng(8);
  for (size_t B = 0; B <= 2; ++B)
    for (size_t W = 0; W <= 2; ++W) {
      std::vector<size_t> bits;
      for (size_t j = 0; j <= B; ++j) bits.push_back(rng.below(4));
      const size_t copies = 3, T = 9;
      std::vector<LayerBundle> bundles(T);
      for (auto &b : bundles)
        for (size_t j = 0; j <= B; ++j) b.m.push_back(BitVector::random(bits[j] * copies, rng));
      const auto spec = gaussian_diag_spec(bits, B, W);
      const StreamTrace tr = layer_rearrange(bundles, bits, B, W, 0, copies);
      EXPECT_TRUE(validate_diagonal_trace(spec, tr));
      // Sub-symbol j of d_i is c_{i-j,0} for j <= W, c_{i-j, j-W} beyond.
      for (long i = 0; i < long(T); ++i)
        for (size_t c = 0; c < copies; ++c)
          for (size_t j = 0; j <= B + W; ++j) {
            const long t = i - long(j);
            const BitVector got = tr.sub(i, c, spec.offset(j), spec.N[j]);
            if (t < 0) {
              EXPECT_FALSE(got.any());
              continue;
            }
            BitVector want(spec.N[j]);
            size_t pos = 0;
            for (size_t l = (j <= W ? 0 : j - W); l <= B; ++l) {
              want.assign(pos, bundles[size_t(t)].m[l].slice(c * bits[l], bits[l]));
              pos += bits[l];
            }
            EXPECT_EQ(got, want);
          }
    }
}

TEST(Rearrange, SingleLayerIsIdentity) {
  Rng rng(2);
  std::vector<LayerBundle> bundles(4);
  for (auto &b : bundles) b.m.push_back(BitVector::random(12, rng));
  const StreamTrace tr = layer_rearrange(bundles, {4}, 0, 0, 0, 3);
  for (long i = 0; i < 4; ++i) EXPECT_EQ(tr.at(i), bundles[size_t(i)].m[0]);
}

TEST(Rearrange, ConstantBundleConstantTrace) {
  Rng rng(4);
  LayerBundle b;
  b.m = {BitVector::random(6, rng), BitVector::random(4, rng)};
  const StreamTrace tr = layer_rearrange(std::vector<LayerBundle>(8, b), {3, 2}, 1, 1, 0, 2);
  for (long i = 3; i < 8; ++i) EXPECT_EQ(tr.at(i), tr.at(2));
}

TEST(Rearrange, AvailableLayers) {
  for (size_t B = 0; B <= 3; ++B)
    for (size_t W = 0; W <= 3; ++W)
      for (long i = 0; i < 10; ++i) {
        const auto v = available_layers(i, B, W);
        const std::set<std::pair<long, size_t>> got(v.begin(), v.end());
        EXPECT_EQ(got, oracle::available_layers_oracle(i, B, W));
      }
}

TEST(Pipeline, NoErasureMeetsTargets) {
  GaussianConfig c;
  c.d = kSixLevel;
  c.B = 2;
  c.W = 3;
  c.n = 3000;
  c.T = 8;
  c.seed = 9;
  const GaussianReport r = gaussian_pipeline(c);
  EXPECT_TRUE(r.delivery_exact);
  EXPECT_EQ(r.failures, 0u);
  for (const auto s : r.status) EXPECT_EQ(s, SymbolStatus::Recovered);
  for (const auto &l : r.lags) EXPECT_TRUE(l.met) << l.time << " " << l.lag << " " << l.mse;
  EXPECT_NEAR(r.gaussian_rate, gaussian_rate(kSixLevel, 2, 3), 1e-12);
  EXPECT_GE(r.wire_rate, r.gaussian_rate);
}

TEST(Pipeline, EveryBurstPositionDeliversAvailableLayers) {
  GaussianConfig c;
  c.d = {0.1, 0.3, 0.5, 0.7};
  c.B = 2;
  c.W = 1;
  c.n = 300;
  c.T = 10;
  c.seed = 4;
  const SrPlan plan = calibrate_for(c);
  for (size_t len = 1; len <= 2; ++len)
    for (size_t j = 0; j + len + c.W < c.T; ++j) {
      c.burst_start = j;
      c.burst_len = len;
      const GaussianReport r = gaussian_pipeline(c, &plan);
      EXPECT_FALSE(r.pattern_violation);
      EXPECT_EQ(r.failures, 0u);
      for (size_t i = 0; i < c.T; ++i) {
        const bool window = i >= j && i < j + len + c.W;
        EXPECT_EQ(r.status[i], window ? SymbolStatus::Skipped : SymbolStatus::Recovered) << i;
        if (window) continue;
        const std::set<std::pair<long, size_t>> got(r.delivered[i].begin(), r.delivered[i].end());
        EXPECT_EQ(got, oracle::available_layers_oracle(long(i), c.B, c.W)) << i;
      }
    }
}

TEST(Pipeline, FirstTimeAfterWindowMeetsTargets) {
  GaussianConfig c;
  c.d = kSixLevel;
  c.B = 2;
  c.W = 3;
  c.n = 3000;
  c.T = 10;
  c.seed = 6;
  const SrPlan plan = calibrate_for(c);
  for (size_t j : {1, 3}) {
    c.burst_start = j;
    const GaussianReport r = gaussian_pipeline(c, &plan);
    EXPECT_TRUE(r.delivery_exact);
    size_t seen = 0;
    for (const auto &l : r.lags)
      if (l.time == j + c.B + c.W) {
        ++seen;
        EXPECT_TRUE(l.met) << j << " lag " << l.lag << " " << l.mse;
      }
    EXPECT_EQ(seen, 6u);
  }
}

TEST(Pipeline, AllOnesIsZeroRate) {
  GaussianConfig c;
  c.d = {1.0, 1.0};
  c.B = 1;
  c.W = 0;
  c.n = 2000;
  c.T = 4;
  const GaussianReport r = gaussian_pipeline(c);
  EXPECT_EQ(r.wire_rate, 0.0);
  for (const auto &l : r.lags) EXPECT_NEAR(l.mse, 1.0, 0.1);
}

TEST(Pipeline, SameSeedSameReport) {
  GaussianConfig c;
  c.d = {0.2, 0.5};
  c.B = 1;
  c.W = 0;
  c.n = 500;
  c.T = 5;
  c.burst_start = 1;
  const GaussianReport a = gaussian_pipeline(c), b = gaussian_pipeline(c);
  ASSERT_EQ(a.lags.size(), b.lags.size());
  for (size_t i = 0; i < a.lags.size(); ++i) EXPECT_EQ(a.lags[i].mse, b.lags[i].mse);
}
