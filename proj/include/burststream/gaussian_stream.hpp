#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "burststream/gf2.hpp"
#include "burststream/prospicient.hpp"
#include "burststream/sources.hpp"

namespace bst {

// Multiplicative distortion slack accepted for practical quantizers.
inline constexpr double kGapFactor = 1.4232895981466150;  // pi*e/6

// Pads with 1 when K < B+W, truncates when K > B+W.
std::vector<double> normalize_distortions(const std::vector<double> &d, size_t B, size_t W);

struct LayerRates {
  std::vector<double> tilde;  // tildeR_0..tildeR_B
  std::vector<double> cum;    // R_j = sum_{k>=j} tildeR_k
};

// d is normalized to K = B+W first.
LayerRates layer_rates(const std::vector<double> &d, size_t B, size_t W);

// Target of the lag-l reconstruction: d_0 up to lag W, d_l beyond.
double lag_target(const std::vector<double> &d, size_t W, size_t lag);

struct AlphaChoice {
  size_t m = 1;               // samples per copy (alpha = 1/m)
  std::vector<size_t> bits;   // p_j: bits of layer j per copy
  double inflation = 0.0;     // sum p_j/m - sum tildeR_j
};

AlphaChoice choose_alpha(const LayerRates &lr, size_t max_den = 64);

struct LayerBundle {
  std::vector<BitVector> m;  // m[j]: layer j, fixed budget
};

struct LayerPlan {
  enum class Mode { Empty, Scalar, Trellis };
  Mode mode = Mode::Empty;
  int offset = 0;  // grid offset in eighths of a step
  double kappa = 0.0;
  int ladder = 0;  // step = 2^(ladder/64)
};

struct SrPlan {
  std::vector<LayerPlan> layers;
};

// Successive-refinement quantizer for i.i.d. N(0,1) blocks. Layer B is the
// coarsest; layer j refines layers j+1..B. Each layer is an arithmetic-coded
// stream of exactly budget[j] bits.
class SrCodec {
 public:
  SrCodec(std::vector<size_t> budget, size_t n);

  size_t layers() const { return budget_.size(); }
  size_t n() const { return n_; }
  const std::vector<size_t> &budget() const { return budget_; }

  // Full search over quantizer modes on a representative block.
  SrPlan calibrate(const std::vector<double> &x) const;
  LayerBundle encode(const std::vector<double> &x, const SrPlan &plan) const;
  // Reconstruction from layers from..B.
  std::vector<double> decode(const LayerBundle &b, size_t from) const;

 private:
  std::vector<size_t> budget_;
  size_t n_;
};

double mse(const std::vector<double> &a, const std::vector<double> &b);

// Widths (P_0 x (W+1), P_1, ..., P_B) with P_k = sum_{l>=k} p_l; identity
// transitions inside the first W+1 blocks, projections dropping b_{k-1}.
DiagonalSourceSpec gaussian_diag_spec(const std::vector<size_t> &bits, size_t B, size_t W);

// c_{t,k} of one copy: (b_{t,k}; ...; b_{t,B}).
BitVector layer_codeword(const LayerBundle &b, const std::vector<size_t> &bits, size_t copy, size_t k);

// d_i for copies [c0, c0+nc); bundles[t] for t >= 0, zero before time 0.
StreamTrace layer_rearrange(const std::vector<LayerBundle> &bundles, const std::vector<size_t> &bits, size_t B,
                            size_t W, size_t c0, size_t nc);

// (source time, first layer) pairs of M_i, dropping negative times.
std::vector<std::pair<long, size_t>> available_layers(long i, size_t B, size_t W);

struct GaussianConfig {
  std::vector<double> d;
  size_t B = 1, W = 0;
  size_t n = 1000, T = 10;
  std::optional<size_t> burst_start;
  std::optional<size_t> burst_len;  // default B
  uint64_t seed = 1;
  size_t delta = 24;           // slack bits per segment packet
  size_t segment_bits = 512;   // target codeword bits of one transport segment
};

struct LagRecord {
  size_t time = 0, lag = 0;
  double mse = 0.0, target = 0.0;
  bool met = false;
};

struct GaussianReport {
  std::vector<double> d;  // normalized
  LayerRates rates;
  AlphaChoice alpha;
  size_t copies = 0, segments = 0;
  double gaussian_rate = 0.0;
  double wire_rate = 0.0;  // packet bits per time / n
  std::vector<SymbolStatus> status;
  std::vector<std::vector<std::pair<long, size_t>>> delivered;  // per time
  bool delivery_exact = true;
  bool pattern_violation = false;
  size_t failures = 0;
  std::vector<LagRecord> lags;
};

SrPlan calibrate_for(const GaussianConfig &cfg);
GaussianReport gaussian_pipeline(const GaussianConfig &cfg, const SrPlan *plan = nullptr);

}  // namespace bst
