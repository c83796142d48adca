#include "burststream/prospicient.hpp"

#include <numeric>

#include "burststream/channel.hpp"
#include "burststream/rates.hpp"

namespace bst {

CodewordBlock rearrange(const BitVector &symbol, const DiagonalSourceSpec &spec, size_t B, size_t W) {
  if (spec.K() != B + W) throw std::invalid_argument("rearrange: spec not normalized to K = B+W");
  CodewordBlock cb;
  cb.c.push_back(symbol.slice(0, spec.N[0]));
  for (size_t k = 1; k <= B; ++k)
    cb.c.push_back(spec.prod(W + k, k) * symbol.slice(spec.offset(k), spec.N[k]));
  return cb;
}

BitMatrix BinCode::matrix(long t) const {
  if (identity) return BitMatrix::identity(L);
  Rng rng(derive_seed(seed, uint64_t(t), 0x68617368ULL));
  return BitMatrix::random(L, R0 * n, rng);
}

nlohmann::json BinCode::to_json() const {
  return {{"n", n}, {"R0", R0}, {"L", L}, {"seed", seed}, {"identity", identity}};
}

BinCode make_bincode(const DiagonalSourceSpec &spec, size_t B, size_t W, size_t n, size_t delta, uint64_t seed) {
  if (spec.K() != B + W) throw std::invalid_argument("bincode: spec not normalized to K = B+W");
  BinCode bc;
  bc.n = n;
  bc.seed = seed;
  bc.R0 = spec.N[0];
  for (size_t k = 1; k <= B; ++k) bc.R0 += spec.N[W + k];
  const Rational r = diagonal_rate_exact(spec.N, B, W);
  const long long num = r.num * (long long)n;
  const size_t target = size_t((num + r.den - 1) / r.den);
  bc.L = target + delta;
  if (bc.L < target) throw std::invalid_argument("bincode: rate below diagonal_rate");
  if (bc.L >= bc.R0 * n) {
    bc.L = bc.R0 * n;
    bc.identity = true;
  }
  return bc;
}

nlohmann::json PacketStream::to_json(const std::vector<bool> &erased) const {
  nlohmann::json recs = nlohmann::json::array();
  for (size_t t = 0; t < f.size(); ++t) {
    const bool e = t < erased.size() && erased[t];
    recs.push_back({{"t", t}, {"erased", e}, {"payload", e ? std::string() : f[t].to_hex()}});
  }
  return recs;
}

ProspicientCodec::ProspicientCodec(DiagonalSourceSpec spec, size_t B, size_t W, BinCode code)
    : spec_(std::move(spec)), B_(B), W_(W), code_(code) {
  spec_.validate();
  if (spec_.K() != B + W) throw std::invalid_argument("codec: spec not normalized to K = B+W");
  cw_.push_back(spec_.N[0]);
  for (size_t k = 1; k <= B; ++k) cw_.push_back(spec_.N[W + k]);
  size_t acc = 0;
  for (size_t w : cw_) {
    seg_off_.push_back(acc);
    acc += w * code_.n;
  }
  if (acc != code_.R0 * code_.n) throw std::invalid_argument("codec: bincode width mismatch");
  prod_.resize(spec_.K() + 1);
  for (size_t a = 0; a <= spec_.K(); ++a) {
    prod_[a].resize(a + 1);
    prod_[a][a] = BitMatrix::identity(spec_.N[a]);
    for (size_t b = a; b-- > 0;) prod_[a][b] = prod_[a][b + 1] * spec_.R[b];
  }
}

BitVector ProspicientCodec::gather(const BitVector &sym, size_t j) const {
  const size_t w = spec_.width(), nj = spec_.N[j], off = spec_.offset(j);
  BitVector out(code_.n * nj);
  for (size_t c = 0; c < code_.n; ++c) xor_range(out.data(), c * nj, sym.data(), c * w + off, nj);
  return out;
}

void ProspicientCodec::scatter(BitVector &sym, size_t j, const BitVector &part) const {
  const size_t w = spec_.width(), nj = spec_.N[j], off = spec_.offset(j);
  for (size_t c = 0; c < code_.n; ++c) {
    const BitVector cur = sym.slice(c * w + off, nj);
    xor_range(sym.data(), c * w + off, cur.data(), 0, nj);
    xor_range(sym.data(), c * w + off, part.data(), c * nj, nj);
  }
}

BitVector ProspicientCodec::codeword_vector(const BitVector &sym) const {
  const size_t w = spec_.width();
  BitVector v(codeword_bits());
  for (size_t k = 0; k <= B_; ++k) {
    const size_t src = k, nk = cw_[k];
    if (nk == 0) continue;
    const BitMatrix &M = prod_[k == 0 ? 0 : W_ + k][src];
    for (size_t c = 0; c < code_.n; ++c) {
      const BitVector s = sym.slice(c * w + spec_.offset(src), spec_.N[src]);
      const BitVector img = (k == 0) ? s : M * s;
      xor_range(v.data(), seg_off_[k] + c * nk, img.data(), 0, nk);
    }
  }
  return v;
}

BitVector ProspicientCodec::encode_symbol(const BitVector &sym, long t) const {
  return steady_system(t)->H * codeword_vector(sym);
}

std::shared_ptr<const ProspicientCodec::SteadySystem> ProspicientCodec::steady_system(long t) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->steady.find(t);
    if (it != cache_->steady.end()) return it->second;
  }
  auto sys = std::make_shared<SteadySystem>();
  sys->H = code_.matrix(t);
  sys->solver = FixedSolver(sys->H.block(0, 0, sys->H.rows(), code_.n * spec_.N[0]));
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->steady.emplace(t, std::move(sys)).first->second;
}

// Unknowns: innovations of times i-W..i, then the burst-time parts
// R_{W+k,k} s_{j+k-1,k}-sized blocks for k = 1..burst_len.
std::shared_ptr<const FixedSolver> ProspicientCodec::burst_system(long j, size_t Bp, long i) const {
  const auto key = std::make_tuple(j, Bp, i);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->burst.find(key);
    if (it != cache_->burst.end()) return it->second;
  }
  const size_t n = code_.n, L = code_.L, W = W_, B = B_, N0 = spec_.N[0];
  const long first = i - long(W);
  const size_t nu = n * N0;
  std::vector<size_t> coff(Bp + 2, 0);
  coff[1] = (W + 1) * nu;
  for (size_t k = 1; k <= Bp; ++k) coff[k + 1] = coff[k] + n * spec_.N[W + k];
  BitMatrix A((W + 1) * L, coff[Bp + 1]);
  auto add_unknown = [&](const BitMatrix &H, size_t rowoff, size_t seg, size_t cwk, size_t uoff, size_t wu,
                         const BitMatrix &Rm) {
    if (cwk == 0 || wu == 0) return;
    for (size_t c = 0; c < n; ++c) {
      const BitMatrix P = H.block(0, seg_off_[seg] + c * cwk, L, cwk) * Rm;
      for (size_t r = 0; r < L; ++r) xor_range(A.row(rowoff + r), uoff + c * wu, P.row(r), 0, wu);
    }
  };
  for (long tau = first; tau <= i; ++tau) {
    const size_t rowoff = size_t(tau - first) * L;
    const BitMatrix &H = steady_system(tau)->H;
    for (size_t r = 0; r < L; ++r) xor_range(A.row(rowoff + r), size_t(tau - first) * nu, H.row(r), 0, nu);
    for (size_t k = 1; k <= B; ++k) {
      const size_t cwk = cw_[k];
      if (cwk == 0) continue;
      const long src = tau - long(k);
      if (src >= first) {
        add_unknown(H, rowoff, k, cwk, size_t(src - first) * nu, N0, R(W + k, 0));
      } else if (src >= j) {
        const size_t kp = k - size_t(tau - first);
        add_unknown(H, rowoff, k, cwk, coff[kp], spec_.N[W + kp], R(W + k, W + kp));
      }
    }
  }
  auto sys = std::make_shared<const FixedSolver>(A);
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->burst.emplace(key, std::move(sys)).first->second;
}

PacketStream ProspicientCodec::encode(const StreamTrace &tr) const {
  if (tr.width != spec_.width() || tr.n != code_.n) throw std::invalid_argument("encode: trace shape");
  PacketStream ps;
  ps.L = code_.L;
  ps.f.resize(tr.T);
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < long(tr.T); ++t) ps.f[size_t(t)] = encode_symbol(tr.at(t), t);
  return ps;
}

ProspicientDecoder::ProspicientDecoder(const ProspicientCodec &codec, BitVector initial_symbol)
    : codec_(codec), last_(std::move(initial_symbol)) {
  if (last_.size() != codec.spec().width() * codec.code().n) throw std::invalid_argument("decoder: initial symbol width");
}

std::optional<BitVector> ProspicientDecoder::steady_solve(const BitVector &f, long t) const {
  const auto &sp = codec_.spec_;
  const size_t n = codec_.code_.n, w = sp.width(), K = sp.K();
  const auto sys = codec_.steady_system(t);
  // Symbol at t with innovation zeroed: deterministic part from s_{t-1}.
  BitVector sym(n * w);
  for (size_t c = 0; c < n; ++c)
    for (size_t j = 1; j <= K; ++j) {
      if (sp.N[j] == 0) continue;
      const BitVector s = sp.R[j - 1] * last_.slice(c * w + sp.offset(j - 1), sp.N[j - 1]);
      xor_range(sym.data(), c * w + sp.offset(j), s.data(), 0, sp.N[j]);
    }
  BitVector rhs = f;
  rhs ^= sys->H * codec_.codeword_vector(sym);
  auto u = sys->solver.solve(rhs);
  if (!u) return std::nullopt;
  for (size_t c = 0; c < n; ++c) xor_range(sym.data(), c * w, u->data(), c * sp.N[0], sp.N[0]);
  return sym;
}

std::optional<BitVector> ProspicientDecoder::burst_solve() const {
  const auto &sp = codec_.spec_;
  const size_t n = codec_.code_.n, w = sp.width(), W = codec_.W_, B = codec_.B_, L = codec_.code_.L;
  const size_t N0 = sp.N[0], Bp = burst_len_;
  const long j = burst_start_, i = t_ - 1, first = i - long(W);
  const size_t nu = n * N0;
  std::vector<size_t> coff(Bp + 2, 0);
  coff[1] = (W + 1) * nu;
  for (size_t k = 1; k <= Bp; ++k) coff[k + 1] = coff[k] + n * sp.N[W + k];
  BitVector rhs((W + 1) * L);
  for (long tau = first; tau <= i; ++tau) {
    const size_t rowoff = size_t(tau - first) * L;
    const auto sys = codec_.steady_system(tau);
    BitVector known(codec_.codeword_bits());
    for (size_t k = 1; k <= B; ++k) {
      const size_t cwk = codec_.cw_[k];
      const long src = tau - long(k);
      if (cwk == 0 || src >= j) continue;
      const size_t a = size_t(j - 1 - src);
      for (size_t c = 0; c < n; ++c) {
        const BitVector v = codec_.R(W + k, a) * last_.slice(c * w + sp.offset(a), sp.N[a]);
        xor_range(known.data(), codec_.seg_off_[k] + c * cwk, v.data(), 0, cwk);
      }
    }
    BitVector part = buffer_[size_t(tau - first)];
    part ^= sys->H * known;
    xor_range(rhs.data(), rowoff, part.data(), 0, L);
  }

  auto z = codec_.burst_system(j, Bp, i)->solve(rhs);
  if (!z) return std::nullopt;
  BitVector sym(n * w);
  for (size_t c = 0; c < n; ++c) {
    xor_range(sym.data(), c * w, z->data(), W * nu + c * N0, N0);
    for (size_t m = 1; m <= W; ++m) {
      const BitVector u = z->slice((W - m) * nu + c * N0, N0);
      const BitVector s = codec_.R(m, 0) * u;
      xor_range(sym.data(), c * w + sp.offset(m), s.data(), 0, sp.N[m]);
    }
    for (size_t k = 1; k <= B; ++k) {
      const size_t nk = sp.N[W + k];
      if (nk == 0) continue;
      if (k <= Bp) {
        xor_range(sym.data(), c * w + sp.offset(W + k), z->data(), coff[k] + c * nk, nk);
      } else {
        const size_t a = k - Bp - 1;
        const BitVector s = codec_.R(W + k, a) * last_.slice(c * w + sp.offset(a), sp.N[a]);
        xor_range(sym.data(), c * w + sp.offset(W + k), s.data(), 0, nk);
      }
    }
  }
  return sym;
}

DecodeOutput ProspicientDecoder::step(const std::optional<BitVector> &packet) {
  const long t = t_++;
  DecodeOutput out;
  switch (mode_) {
    case Mode::Lost:
      out.status = SymbolStatus::Lost;
      return out;
    case Mode::Steady:
      if (packet) {
        auto s = steady_solve(*packet, t);
        if (!s) {
          mode_ = Mode::Lost;
          out.status = SymbolStatus::DecodeFailure;
          return out;
        }
        last_ = *s;
        last_t_ = t;
        out.status = SymbolStatus::Recovered;
        out.symbol = std::move(*s);
        return out;
      }
      mode_ = Mode::Burst;
      burst_start_ = t;
      burst_len_ = 0;
      [[fallthrough]];
    case Mode::Burst:
      if (!packet) {
        if (++burst_len_ > codec_.B_) throw PatternViolation("burst longer than B");
        return out;
      }
      buffer_.clear();
      mode_ = Mode::Buffering;
      [[fallthrough]];
    case Mode::Buffering: {
      if (!packet) throw PatternViolation("erasure inside recovery window");
      buffer_.push_back(*packet);
      if (buffer_.size() < codec_.W_ + 1) return out;
      auto s = burst_solve();
      buffer_.clear();
      if (!s) {
        mode_ = Mode::Lost;
        out.status = SymbolStatus::DecodeFailure;
        return out;
      }
      last_ = *s;
      last_t_ = t;
      mode_ = Mode::Steady;
      out.status = SymbolStatus::Recovered;
      out.symbol = std::move(*s);
      return out;
    }
  }
  return out;
}

StreamDecodeResult decode_stream(const ProspicientCodec &codec, const BitVector &initial,
                                 const std::vector<std::optional<BitVector>> &packets) {
  StreamDecodeResult res;
  ProspicientDecoder dec(codec, initial);
  for (const auto &p : packets) {
    if (res.pattern_violation) {
      res.out.push_back({SymbolStatus::Lost, {}});
      continue;
    }
    try {
      res.out.push_back(dec.step(p));
      if (res.out.back().status == SymbolStatus::DecodeFailure) ++res.failures;
    } catch (const PatternViolation &) {
      res.pattern_violation = true;
      res.out.push_back({SymbolStatus::Lost, {}});
    }
  }
  return res;
}

}  // namespace bst
