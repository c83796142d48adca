#include "burststream/gaussian_stream.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "burststream/channel.hpp"
#include "burststream/rates.hpp"

namespace bst {

std::vector<double> normalize_distortions(const std::vector<double> &d, size_t B, size_t W) {
  validate_distortion(d);
  std::vector<double> out = d;
  out.resize(B + W + 1, 1.0);
  return out;
}

LayerRates layer_rates(const std::vector<double> &d_in, size_t B, size_t W) {
  const std::vector<double> d = normalize_distortions(d_in, B, W);
  auto h = [](double v) { return 0.5 * std::log2(1.0 / v); };
  // Cumulative rates first; the per-layer rates are their differences.
  LayerRates lr;
  lr.cum.resize(B + 1);
  lr.cum[0] = h(d[0]);
  for (size_t j = 1; j <= B; ++j) lr.cum[j] = h(d[W + j]);
  lr.tilde.resize(B + 1);
  for (size_t j = 0; j <= B; ++j) lr.tilde[j] = lr.cum[j] - (j < B ? lr.cum[j + 1] : 0.0);
  return lr;
}

double lag_target(const std::vector<double> &d, size_t W, size_t lag) {
  if (lag <= W) return d.at(0);
  return lag < d.size() ? d[lag] : 1.0;
}

AlphaChoice choose_alpha(const LayerRates &lr, size_t max_den) {
  double total = 0.0;
  for (double r : lr.tilde) total += r;
  AlphaChoice best;
  best.inflation = std::numeric_limits<double>::infinity();
  for (size_t m = 1; m <= max_den; ++m) {
    AlphaChoice c;
    c.m = m;
    double sum = 0.0;
    for (double r : lr.tilde) {
      const size_t p = size_t(std::ceil(double(m) * r - 1e-9));
      c.bits.push_back(p);
      sum += double(p);
    }
    c.inflation = sum / double(m) - total;
    if (c.inflation < best.inflation - 1e-12) best = c;
  }
  return best;
}

double mse(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("mse: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / double(a.size());
}

namespace {

constexpr double kClip = 9.0;
constexpr uint64_t kTot = uint64_t(1) << 24;
constexpr int kLadderMin = -640, kLadderMax = 383;
constexpr size_t kHeaderBits = 15;
constexpr int kNext[4][2] = {{0, 1}, {2, 3}, {0, 1}, {2, 3}};
constexpr int kSub[4][2] = {{0, 2}, {1, 3}, {2, 0}, {3, 1}};

double phi(double z) { return 0.3989422804014327 * std::exp(-0.5 * z * z); }

// Standard normal restricted to [lo, hi]. Upper-half intervals use the
// complementary tail for accuracy.
struct Trunc {
  double lo, hi, g0, z;
  bool upper;

  Trunc(double a, double b) : lo(a), hi(b), upper(a + b > 0.0) {
    g0 = g(lo);
    z = g(hi) - g0;
  }
  double g(double x) const {
    return upper ? -0.5 * std::erfc(x * 0.7071067811865476) : 0.5 * std::erfc(-x * 0.7071067811865476);
  }
  double F(double b) const {
    if (b <= lo) return 0.0;
    if (b >= hi) return 1.0;
    if (z < 1e-300) return (b - lo) / (hi - lo);
    return std::clamp((g(b) - g0) / z, 0.0, 1.0);
  }
  double mean() const {
    if (z < 1e-300) return 0.5 * (lo + hi);
    return std::clamp((phi(lo) - phi(hi)) / z, lo, hi);
  }
};

double trunc_mean(double lo, double hi) { return Trunc(lo, hi).mean(); }

struct Grid {
  double off, step, half;
  int md;
  double center(long k) const { return off + double(k) * step; }
};

long pmod(long a, long m) { return ((a % m) + m) % m; }

struct CellModel {
  const Trunc &tr;
  const Grid &g;
  long kmin, count;

  CellModel(const Trunc &t, const Grid &grid, int par) : tr(t), g(grid) {
    kmin = long(std::floor((t.lo - g.half - g.off) / g.step)) + 1;
    while (pmod(kmin, g.md) != par) ++kmin;
    long kmax = long(std::ceil((t.hi + g.half - g.off) / g.step)) - 1;
    while (pmod(kmax, g.md) != par) --kmax;
    count = (kmax - kmin) / g.md + 1;
    if (count <= 0 || uint64_t(count) * 4 > kTot) throw std::logic_error("cell model out of range");
  }
  uint64_t cum(long idx) const {
    if (idx <= 0) return 0;
    if (idx >= count) return kTot;
    const double b = g.center(kmin + g.md * (idx - 1)) + g.half;
    return uint64_t(idx) + uint64_t(std::floor(double(kTot - uint64_t(count)) * tr.F(b)));
  }
  bool contains(long k) const { return k >= kmin && k < kmin + g.md * count && pmod(k - kmin, g.md) == 0; }
  long index(long k) const { return (k - kmin) / g.md; }
  double bits(long k) const {
    const long i = index(k);
    return -std::log2(double(cum(i + 1) - cum(i)) / double(kTot));
  }
};

class ArithEncoder {
 public:
  void encode(uint64_t cl, uint64_t ch) {
    const uint64_t r = hi_ - lo_ + 1;
    hi_ = lo_ + r * ch / kTot - 1;
    lo_ = lo_ + r * cl / kTot;
    for (;;) {
      if (hi_ < kHalf) {
        put(0);
      } else if (lo_ >= kHalf) {
        put(1);
        lo_ -= kHalf;
        hi_ -= kHalf;
      } else if (lo_ >= kQ1 && hi_ < kQ3) {
        ++pending_;
        lo_ -= kQ1;
        hi_ -= kQ1;
      } else {
        break;
      }
      lo_ <<= 1;
      hi_ = (hi_ << 1) | 1;
    }
  }
  std::vector<uint8_t> finish() {
    ++pending_;
    put(lo_ < kQ1 ? 0 : 1);
    return std::move(bits_);
  }
  size_t size() const { return bits_.size() + pending_; }

  static constexpr uint64_t kHalf = 0x80000000ULL, kQ1 = 0x40000000ULL, kQ3 = 0xC0000000ULL;

 private:
  void put(uint8_t b) {
    bits_.push_back(b);
    for (; pending_; --pending_) bits_.push_back(b ^ 1);
  }
  uint64_t lo_ = 0, hi_ = 0xFFFFFFFFULL;
  size_t pending_ = 0;
  std::vector<uint8_t> bits_;
};

class ArithDecoder {
 public:
  ArithDecoder(const BitVector &v, size_t pos) : v_(v), pos_(pos) {
    for (int i = 0; i < 32; ++i) val_ = (val_ << 1) | next();
  }
  uint64_t target() const { return ((val_ - lo_ + 1) * kTot - 1) / (hi_ - lo_ + 1); }
  void consume(uint64_t cl, uint64_t ch) {
    const uint64_t r = hi_ - lo_ + 1;
    hi_ = lo_ + r * ch / kTot - 1;
    lo_ = lo_ + r * cl / kTot;
    for (;;) {
      if (hi_ < ArithEncoder::kHalf) {
      } else if (lo_ >= ArithEncoder::kHalf) {
        lo_ -= ArithEncoder::kHalf;
        hi_ -= ArithEncoder::kHalf;
        val_ -= ArithEncoder::kHalf;
      } else if (lo_ >= ArithEncoder::kQ1 && hi_ < ArithEncoder::kQ3) {
        lo_ -= ArithEncoder::kQ1;
        hi_ -= ArithEncoder::kQ1;
        val_ -= ArithEncoder::kQ1;
      } else {
        break;
      }
      lo_ <<= 1;
      hi_ = (hi_ << 1) | 1;
      val_ = (val_ << 1) | next();
    }
  }
  long decode(const CellModel &m) {
    const uint64_t t = target();
    long a = 0, b = m.count;  // cum(a) <= t < cum(b)
    while (b - a > 1) {
      const long mid = (a + b) / 2;
      if (m.cum(mid) <= t) a = mid;
      else b = mid;
    }
    consume(m.cum(a), m.cum(a + 1));
    return m.kmin + m.g.md * a;
  }

 private:
  uint64_t next() { return pos_ < v_.size() ? uint64_t(v_.get(pos_++)) : 0; }
  const BitVector &v_;
  size_t pos_;
  uint64_t lo_ = 0, hi_ = 0xFFFFFFFFULL, val_ = 0;
};

struct Iv {
  double lo, hi;
};

Grid make_grid(const LayerPlan &p, int ladder) {
  const double step = std::exp2(double(ladder) / 64.0);
  const bool tcq = p.mode == LayerPlan::Mode::Trellis;
  return {double(p.offset) / 8.0 * step, step, tcq ? step : 0.5 * step, tcq ? 2 : 1};
}

double clip(double x) { return std::clamp(x, -kClip + 1e-9, kClip - 1e-9); }

// Scalar layer: the cell of each sample, and its ideal code length.
std::vector<long> scalar_cells(const std::vector<double> &x, const std::vector<Iv> &iv, const Grid &g,
                               double *bits) {
  std::vector<long> ks(x.size());
  double total = 0.0;
  for (size_t t = 0; t < x.size(); ++t) {
    const Trunc tr(iv[t].lo, iv[t].hi);
    const CellModel m(tr, g, 0);
    long k = long(std::floor((clip(x[t]) - g.off) / g.step + 0.5));
    k = std::clamp(k, m.kmin, m.kmin + m.count - 1);
    ks[t] = k;
    total += m.bits(k);
  }
  if (bits) *bits = total;
  return ks;
}

// Trellis layer: Viterbi over the 4-state trellis with cost
// (x - recon)^2 + kappa*step^2*bits.
std::vector<long> trellis_cells(const std::vector<double> &x, const std::vector<Iv> &iv, const Grid &g,
                                double kappa, double *bits) {
  const size_t S = x.size();
  constexpr double INF = std::numeric_limits<double>::infinity();
  const double lam = kappa * g.step * g.step;
  std::array<double, 4> cost{0.0, INF, INF, INF};
  std::vector<std::array<int8_t, 4>> from(S);
  std::vector<std::array<long, 4>> lev(S);
  std::vector<std::array<double, 4>> len(S);
  for (size_t t = 0; t < S; ++t) {
    const Trunc tr(iv[t].lo, iv[t].hi);
    const CellModel ms[2] = {CellModel(tr, g, 0), CellModel(tr, g, 1)};
    const double xi = clip(x[t]);
    const long k0 = std::lround((xi - g.off) / g.step);
    std::array<double, 4> nw{INF, INF, INF, INF};
    for (int s = 0; s < 4; ++s) {
      if (cost[s] == INF) continue;
      const CellModel &m = ms[s & 1];
      for (int b = 0; b < 2; ++b) {
        const int sub = kSub[s][b], ns = kNext[s][b];
        double best = INF, bl = 0.0;
        long bk = 0;
        for (long k = k0 - 3; k <= k0 + 3; ++k) {
          if (pmod(k, 4) != sub || !m.contains(k)) continue;
          const double y = g.center(k);
          if (std::abs(xi - y) > 2.0 * g.step) continue;
          const double r = m.bits(k);
          const double e = xi - trunc_mean(std::max(iv[t].lo, y - g.half), std::min(iv[t].hi, y + g.half));
          const double c = e * e + lam * r;
          if (c < best) {
            best = c;
            bk = k;
            bl = r;
          }
        }
        if (best == INF) continue;
        if (cost[s] + best < nw[ns]) {
          nw[ns] = cost[s] + best;
          from[t][ns] = int8_t(s);
          lev[t][ns] = bk;
          len[t][ns] = bl;
        }
      }
    }
    cost = nw;
  }
  int s = int(std::min_element(cost.begin(), cost.end()) - cost.begin());
  if (cost[s] == INF) throw std::logic_error("trellis: no survivor");
  std::vector<long> ks(S);
  double total = 0.0;
  for (size_t t = S; t-- > 0;) {
    ks[t] = lev[t][s];
    total += len[t][s];
    s = from[t][s];
  }
  if (bits) *bits = total;
  return ks;
}

std::vector<long> layer_cells(const std::vector<double> &x, const std::vector<Iv> &iv, const LayerPlan &p,
                              const Grid &g, double *bits) {
  return p.mode == LayerPlan::Mode::Trellis ? trellis_cells(x, iv, g, p.kappa, bits) : scalar_cells(x, iv, g, bits);
}

// Arithmetic-codes the chosen cells and narrows the intervals.
std::vector<uint8_t> code_cells(const std::vector<long> &ks, std::vector<Iv> &iv, const LayerPlan &p, const Grid &g) {
  ArithEncoder enc;
  int s = 0;
  for (size_t t = 0; t < ks.size(); ++t) {
    const Trunc tr(iv[t].lo, iv[t].hi);
    const int par = p.mode == LayerPlan::Mode::Trellis ? (s & 1) : 0;
    const CellModel m(tr, g, par);
    const long i = m.index(ks[t]);
    enc.encode(m.cum(i), m.cum(i + 1));
    if (p.mode == LayerPlan::Mode::Trellis) s = kNext[s][kSub[s][0] == int(pmod(ks[t], 4)) ? 0 : 1];
    const double y = g.center(ks[t]);
    iv[t] = {std::max(iv[t].lo, y - g.half), std::min(iv[t].hi, y + g.half)};
  }
  return enc.finish();
}

void write_header(BitVector &v, const LayerPlan &p, int ladder) {
  v.xor_at(0, 2, Word(p.mode));
  v.xor_at(2, 10, Word(ladder - kLadderMin));
  v.xor_at(12, 3, Word(p.offset));
}

struct LayerResult {
  BitVector bits;
  std::vector<Iv> iv;
  int ladder = 0;
  bool empty = true;
};

// Finest step at or near the hint whose stream fits the budget.
LayerResult encode_layer(const std::vector<double> &x, const std::vector<Iv> &iv, const LayerPlan &p, int hint,
                         size_t budget) {
  LayerResult res;
  res.bits = BitVector(budget);
  res.iv = iv;
  if (p.mode == LayerPlan::Mode::Empty || budget <= kHeaderBits + 2) return res;
  const double room = double(budget - kHeaderBits) - 2.0;
  auto ideal_fits = [&](int k) {
    double b = 0.0;
    layer_cells(x, iv, p, make_grid(p, k), &b);
    return b <= room;
  };
  int k = std::clamp(hint, kLadderMin, kLadderMax);
  if (ideal_fits(k)) {
    while (k > kLadderMin && ideal_fits(k - 1)) --k;
  } else {
    while (k < kLadderMax && !ideal_fits(k)) ++k;
    if (!ideal_fits(k)) return res;
  }
  for (; k <= kLadderMax; ++k) {
    const Grid g = make_grid(p, k);
    std::vector<Iv> nv = iv;
    const std::vector<long> ks = layer_cells(x, iv, p, g, nullptr);
    const std::vector<uint8_t> out = code_cells(ks, nv, p, g);
    if (out.size() + kHeaderBits > budget) continue;
    write_header(res.bits, p, k);
    for (size_t i = 0; i < out.size(); ++i) res.bits.set(kHeaderBits + i, out[i]);
    res.iv = std::move(nv);
    res.ladder = k;
    res.empty = false;
    return res;
  }
  return res;
}

double recon_mse(const std::vector<double> &x, const std::vector<Iv> &iv) {
  double s = 0.0;
  for (size_t t = 0; t < x.size(); ++t) {
    const double e = x[t] - trunc_mean(iv[t].lo, iv[t].hi);
    s += e * e;
  }
  return s / double(x.size());
}

// Galloping search for the finest fitting step on the ideal code length.
int search_ladder(const std::vector<double> &x, const std::vector<Iv> &iv, const LayerPlan &p, double room) {
  auto fits = [&](int k) {
    double b = 0.0;
    layer_cells(x, iv, p, make_grid(p, k), &b);
    return b <= room;
  };
  int lo = kLadderMin;
  if (fits(lo)) return lo;
  while (lo + 32 <= kLadderMax && !fits(lo + 32)) lo += 32;
  int hi = std::min(lo + 32, kLadderMax);
  if (!fits(hi)) return kLadderMax + 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (fits(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace

SrCodec::SrCodec(std::vector<size_t> budget, size_t n) : budget_(std::move(budget)), n_(n) {
  if (budget_.empty()) throw std::invalid_argument("SrCodec needs at least one layer");
  if (n_ == 0) throw std::invalid_argument("SrCodec needs samples");
}

SrPlan SrCodec::calibrate(const std::vector<double> &x) const {
  if (x.size() != n_) throw std::invalid_argument("calibrate: block size");
  const size_t L = budget_.size();
  SrPlan plan;
  plan.layers.resize(L);
  std::vector<Iv> iv(n_, Iv{-kClip, kClip});
  for (size_t j = L; j-- > 0;) {
    if (budget_[j] <= kHeaderBits + 2) continue;
    const double room = double(budget_[j] - kHeaderBits) - 2.0;
    std::vector<LayerPlan> cands;
    for (int o : {0, 2, 4, 6}) cands.push_back({LayerPlan::Mode::Scalar, o, 0.0, 0});
    if (j == 0)
      for (double kap : {0.3, 0.5}) cands.push_back({LayerPlan::Mode::Trellis, 4, kap, 0});
    double best = std::numeric_limits<double>::infinity();
    std::vector<Iv> best_iv;
    for (LayerPlan c : cands) {
      const int k = search_ladder(x, iv, c, room);
      if (k > kLadderMax) continue;
      LayerResult r = encode_layer(x, iv, c, k, budget_[j]);
      if (r.empty) continue;
      c.ladder = r.ladder;
      const double e = recon_mse(x, r.iv);
      if (e < best) {
        best = e;
        plan.layers[j] = c;
        best_iv = std::move(r.iv);
      }
    }
    if (!best_iv.empty()) iv = std::move(best_iv);
  }
  return plan;
}

LayerBundle SrCodec::encode(const std::vector<double> &x, const SrPlan &plan) const {
  if (x.size() != n_) throw std::invalid_argument("encode: block size");
  if (plan.layers.size() != budget_.size()) throw std::invalid_argument("encode: plan layer count");
  LayerBundle b;
  b.m.resize(budget_.size());
  std::vector<Iv> iv(n_, Iv{-kClip, kClip});
  for (size_t j = budget_.size(); j-- > 0;) {
    LayerResult r = encode_layer(x, iv, plan.layers[j], plan.layers[j].ladder, budget_[j]);
    b.m[j] = std::move(r.bits);
    iv = std::move(r.iv);
  }
  return b;
}

std::vector<double> SrCodec::decode(const LayerBundle &b, size_t from) const {
  if (b.m.size() != budget_.size() || from >= budget_.size()) throw std::invalid_argument("decode: layer index");
  std::vector<Iv> iv(n_, Iv{-kClip, kClip});
  for (size_t j = budget_.size(); j-- > from;) {
    const BitVector &v = b.m[j];
    if (v.size() != budget_[j]) throw std::invalid_argument("decode: layer size");
    if (v.size() <= kHeaderBits) continue;
    LayerPlan p;
    const Word mode = v.bits(0, 2);
    if (mode == 0) continue;
    if (mode > 2) throw std::invalid_argument("decode: bad layer header");
    p.mode = mode == 1 ? LayerPlan::Mode::Scalar : LayerPlan::Mode::Trellis;
    const int ladder = int(v.bits(2, 10)) + kLadderMin;
    p.offset = int(v.bits(12, 3));
    const Grid g = make_grid(p, ladder);
    ArithDecoder dec(v, kHeaderBits);
    int s = 0;
    for (size_t t = 0; t < n_; ++t) {
      const Trunc tr(iv[t].lo, iv[t].hi);
      const int par = p.mode == LayerPlan::Mode::Trellis ? (s & 1) : 0;
      const long k = dec.decode(CellModel(tr, g, par));
      if (p.mode == LayerPlan::Mode::Trellis) s = kNext[s][kSub[s][0] == int(pmod(k, 4)) ? 0 : 1];
      const double y = g.center(k);
      iv[t] = {std::max(iv[t].lo, y - g.half), std::min(iv[t].hi, y + g.half)};
    }
  }
  std::vector<double> out(n_);
  for (size_t t = 0; t < n_; ++t) out[t] = trunc_mean(iv[t].lo, iv[t].hi);
  return out;
}

DiagonalSourceSpec gaussian_diag_spec(const std::vector<size_t> &bits, size_t B, size_t W) {
  if (bits.size() != B + 1) throw std::invalid_argument("layer bit count must be B+1");
  std::vector<size_t> P(B + 2, 0);
  for (size_t k = B + 1; k-- > 0;) P[k] = P[k + 1] + bits[k];
  DiagonalSourceSpec s;
  for (size_t m = 0; m <= W; ++m) s.N.push_back(P[0]);
  for (size_t k = 1; k <= B; ++k) s.N.push_back(P[k]);
  for (size_t j = 1; j <= B + W; ++j) {
    if (j <= W) {
      s.R.push_back(BitMatrix::identity(P[0]));
    } else {
      const size_t k = j - W;
      BitMatrix r(P[k], P[k - 1]);
      for (size_t a = 0; a < P[k]; ++a) r.set(a, bits[k - 1] + a, true);
      s.R.push_back(std::move(r));
    }
  }
  s.validate();
  return s;
}

BitVector layer_codeword(const LayerBundle &b, const std::vector<size_t> &bits, size_t copy, size_t k) {
  size_t w = 0;
  for (size_t l = k; l < bits.size(); ++l) w += bits[l];
  BitVector out(w);
  size_t pos = 0;
  for (size_t l = k; l < bits.size(); ++l) {
    out.assign(pos, b.m[l].slice(copy * bits[l], bits[l]));
    pos += bits[l];
  }
  return out;
}

StreamTrace layer_rearrange(const std::vector<LayerBundle> &bundles, const std::vector<size_t> &bits, size_t B,
                            size_t W, size_t c0, size_t nc) {
  const DiagonalSourceSpec spec = gaussian_diag_spec(bits, B, W);
  const size_t w = spec.width(), T = bundles.size();
  StreamTrace tr{T, nc, w, -1, 0, {}};
  tr.sym.assign(T + 1, BitVector(nc * w));
  for (long i = 0; i < long(T); ++i) {
    BitVector &s = tr.at(i);
    for (size_t c = 0; c < nc; ++c) {
      size_t off = c * w;
      for (size_t j = 0; j <= B + W; ++j) {
        const long t = i - long(j);
        const size_t k = j <= W ? 0 : j - W;
        if (t >= 0 && spec.N[j]) s.assign(off, layer_codeword(bundles[size_t(t)], bits, c0 + c, k));
        off += spec.N[j];
      }
    }
  }
  return tr;
}

std::vector<std::pair<long, size_t>> available_layers(long i, size_t B, size_t W) {
  std::vector<std::pair<long, size_t>> out;
  for (size_t m = 0; m <= W; ++m)
    if (i - long(m) >= 0) out.emplace_back(i - long(m), 0);
  for (size_t k = 1; k <= B; ++k)
    if (i - long(W + k) >= 0) out.emplace_back(i - long(W + k), k);
  return out;
}

namespace {

struct Setup {
  std::vector<double> d;
  LayerRates lr;
  AlphaChoice alpha;
  size_t copies = 0;
  std::vector<size_t> budget;
};

Setup setup(const GaussianConfig &cfg) {
  if (cfg.n == 0 || cfg.T == 0) throw std::invalid_argument("gaussian pipeline needs n, T > 0");
  Setup s;
  s.d = normalize_distortions(cfg.d, cfg.B, cfg.W);
  s.lr = layer_rates(cfg.d, cfg.B, cfg.W);
  s.alpha = choose_alpha(s.lr);
  s.copies = (cfg.n + s.alpha.m - 1) / s.alpha.m;
  for (size_t p : s.alpha.bits) s.budget.push_back(p * s.copies);
  return s;
}

}  // namespace

SrPlan calibrate_for(const GaussianConfig &cfg) {
  const Setup s = setup(cfg);
  const RealTrace cal = gen_gaussian_iid(cfg.n, 1, derive_seed(cfg.seed, 0x63616c));
  return SrCodec(s.budget, cfg.n).calibrate(cal.x[0]);
}

GaussianReport gaussian_pipeline(const GaussianConfig &cfg, const SrPlan *plan) {
  const Setup su = setup(cfg);
  const size_t B = cfg.B, W = cfg.W, T = cfg.T, n = cfg.n;
  const std::vector<size_t> &bits = su.alpha.bits;
  GaussianReport rep;
  rep.d = su.d;
  rep.rates = su.lr;
  rep.alpha = su.alpha;
  rep.copies = su.copies;
  rep.gaussian_rate = gaussian_rate(su.d, B, W);

  const SrCodec sr(su.budget, n);
  SrPlan own;
  if (!plan) {
    const RealTrace cal = gen_gaussian_iid(n, 1, derive_seed(cfg.seed, 0x63616c));
    own = sr.calibrate(cal.x[0]);
    plan = &own;
  }
  const RealTrace x = gen_gaussian_iid(n, T, derive_seed(cfg.seed, 1));
  std::vector<LayerBundle> bundles(T);
  for (size_t t = 0; t < T; ++t) bundles[t] = sr.encode(x.x[t], *plan);

  ErasurePattern pat{T, {}};
  if (cfg.burst_start) pat = single_burst(*cfg.burst_start, cfg.burst_len.value_or(B), T);

  const DiagonalSourceSpec spec = gaussian_diag_spec(bits, B, W);
  const size_t w = spec.width();
  // decoded[t][c]: recovered d_t of copy c
  std::vector<std::vector<BitVector>> decoded(T, std::vector<BitVector>(su.copies));
  rep.status.assign(T, SymbolStatus::Recovered);
  auto worse = [](SymbolStatus a, SymbolStatus b) { return int(a) > int(b) ? a : b; };
  if (w == 0) {
    for (const auto &[j, len] : pat.bursts())
      for (size_t t = j; t < std::min(T, j + len + W); ++t) rep.status[t] = SymbolStatus::Skipped;
    for (auto &row : decoded)
      for (auto &v : row) v = BitVector(0);
    rep.segments = 0;
  } else {
    const size_t cps = std::max<size_t>(1, (cfg.segment_bits + spec.N[0] / 2) / spec.N[0]);
    rep.segments = (su.copies + cps - 1) / cps;
    size_t wire = 0;
    std::vector<StreamDecodeResult> results(rep.segments);
    std::vector<size_t> Ls(rep.segments);
    // One codec per segment size, so the solver caches are shared.
    std::map<size_t, ProspicientCodec> codecs;
    for (size_t sg = 0; sg < rep.segments; ++sg) {
      const size_t nc = std::min(cps, su.copies - sg * cps);
      if (!codecs.count(nc))
        codecs.emplace(nc, ProspicientCodec(spec, B, W, make_bincode(spec, B, W, nc, cfg.delta, derive_seed(cfg.seed, 2, nc))));
    }
#pragma omp parallel for schedule(dynamic)
    for (long sg = 0; sg < long(rep.segments); ++sg) {
      const size_t c0 = size_t(sg) * cps, nc = std::min(cps, su.copies - c0);
      const StreamTrace tr = layer_rearrange(bundles, bits, B, W, c0, nc);
      const ProspicientCodec &codec = codecs.at(nc);
      const PacketStream ps = codec.encode(tr);
      results[size_t(sg)] = decode_stream(codec, tr.at(-1), apply_erasures(pat, ps.f));
      Ls[size_t(sg)] = codec.code().L;
    }
    for (size_t sg = 0; sg < rep.segments; ++sg) {
      const size_t c0 = sg * cps, nc = std::min(cps, su.copies - c0);
      wire += Ls[sg];
      const StreamDecodeResult &r = results[sg];
      rep.pattern_violation |= r.pattern_violation;
      rep.failures += r.failures;
      for (size_t t = 0; t < T; ++t) {
        rep.status[t] = sg == 0 ? r.out[t].status : worse(rep.status[t], r.out[t].status);
        if (r.out[t].status == SymbolStatus::Recovered)
          for (size_t c = 0; c < nc; ++c) decoded[t][c0 + c] = r.out[t].symbol.slice(c * w, w);
      }
    }
    rep.wire_rate = double(wire) / double(n);
  }

  // Reconstructor: finest layer set seen so far for every source time.
  std::vector<std::optional<std::pair<size_t, LayerBundle>>> best(T);
  std::map<std::pair<size_t, size_t>, std::vector<double>> cache;
  const size_t Korig = cfg.d.size() - 1;
  rep.delivered.resize(T);
  for (size_t i = 0; i < T; ++i) {
    if (rep.status[i] != SymbolStatus::Recovered) continue;
    size_t off = 0;
    for (size_t j = 0; j <= B + W; ++j) {
      const long t = long(i) - long(j);
      const size_t k = j <= W ? 0 : j - W;
      const size_t nj = spec.N[j];
      if (t >= 0) {
        bool ok = true;
        LayerBundle got;
        got.m.resize(B + 1);
        for (size_t l = k; l <= B; ++l) got.m[l] = BitVector(su.budget[l]);
        for (size_t c = 0; c < su.copies && ok; ++c) {
          const BitVector part = nj ? decoded[i][c].slice(off, nj) : BitVector(0);
          ok = part == layer_codeword(bundles[size_t(t)], bits, c, k);
          size_t pos = 0;
          for (size_t l = k; l <= B; ++l) {
            got.m[l].assign(c * bits[l], part.slice(pos, bits[l]));
            pos += bits[l];
          }
        }
        if (ok) {
          rep.delivered[i].emplace_back(t, k);
          auto &b = best[size_t(t)];
          if (!b || k < b->first) b = std::make_pair(k, std::move(got));
        }
      }
      off += nj;
    }
    if (rep.delivered[i] != available_layers(long(i), B, W)) rep.delivery_exact = false;

    for (size_t lag = 0; lag <= Korig && lag <= i; ++lag) {
      const size_t src = i - lag;
      std::vector<double> est(n, 0.0);
      if (best[src]) {
        const auto key = std::make_pair(src, best[src]->first);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, sr.decode(best[src]->second, best[src]->first)).first;
        est = it->second;
      }
      LagRecord rec;
      rec.time = i;
      rec.lag = lag;
      rec.mse = mse(x.x[src], est);
      rec.target = lag_target(cfg.d, W, lag);
      rec.met = rec.mse <= kGapFactor * rec.target;
      rep.lags.push_back(rec);
    }
  }
  return rep;
}

}  // namespace bst
