#include "burststream/sw_binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "burststream/channel.hpp"

namespace bst {

namespace {

size_t bits_for(size_t alphabet) {
  size_t q = 0;
  while ((size_t(1) << q) < alphabet) ++q;
  return q;
}

uint32_t draw(const std::vector<double> &p, Rng &rng) {
  double u = rng.uniform(), acc = 0;
  for (size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return uint32_t(k);
  }
  return uint32_t(p.size() - 1);
}

std::vector<std::vector<double>> log_table(const RealMatrix &P) {
  std::vector<std::vector<double>> l(P.size(), std::vector<double>(P.size()));
  for (size_t a = 0; a < P.size(); ++a)
    for (size_t b = 0; b < P.size(); ++b)
      l[a][b] = P[a][b] > 0 ? std::log2(P[a][b]) : -std::numeric_limits<double>::infinity();
  return l;
}

}  // namespace

SwHash::SwHash(size_t n, size_t alphabet, double rate, uint64_t seed, long t)
    : n_(n), alphabet_(alphabet), q_(bits_for(alphabet)) {
  if (alphabet < 2) throw std::invalid_argument("sw hash: alphabet must be >= 2");
  if (rate < 0) throw std::invalid_argument("sw hash: negative rate");
  m_ = size_t(std::floor(double(n) * rate + 1e-9));
  const size_t b = n * q_;
  const double log_count = double(n) * std::log2(double(alphabet));
  if (rate >= std::log2(double(alphabet)) - 1e-12) m_ = std::max(m_, size_t(std::ceil(log_count - 1e-9)));
  if (m_ >= b) {
    kind_ = Kind::Identity;
    m_ = b;
  } else if (double(m_) >= log_count - 1e-9) {
    kind_ = Kind::Index;
  } else {
    kind_ = Kind::Linear;
    Rng rng(derive_seed(seed, uint64_t(t), 0x7377ULL));
    H_ = BitMatrix::random_full_row_rank(m_, b, rng);
  }
  if (m_ > 62) throw std::invalid_argument("sw hash: more than 62 index bits");
}

BitVector SwHash::pack(const Sequence &x) const {
  if (x.size() != n_) throw std::invalid_argument("sw hash: block length");
  BitVector v(n_ * q_);
  for (size_t c = 0; c < n_; ++c) {
    if (x[c] >= alphabet_) throw std::invalid_argument("sw hash: symbol outside alphabet");
    for (size_t k = 0; k < q_; ++k) v.set(c * q_ + k, x[c] >> k & 1);
  }
  return v;
}

uint64_t SwHash::bin(const Sequence &x) const {
  if (kind_ == Kind::Index) {
    if (x.size() != n_) throw std::invalid_argument("sw hash: block length");
    uint64_t v = 0;
    for (size_t c = 0; c < n_; ++c) v = v * alphabet_ + x[c];
    return v;
  }
  const BitVector v = kind_ == Kind::Identity ? pack(x) : H_ * pack(x);
  uint64_t out = 0;
  for (size_t k = 0; k < v.size(); ++k) out |= uint64_t(v.get(k)) << k;
  return out;
}

size_t SwHash::log2_members() const { return kind_ == Kind::Linear ? n_ * q_ - m_ : 0; }

std::vector<Sequence> SwHash::members(uint64_t bin) const {
  std::vector<Sequence> out;
  auto unpack = [&](const BitVector &v) -> std::optional<Sequence> {
    Sequence x(n_);
    for (size_t c = 0; c < n_; ++c) {
      uint32_t s = 0;
      for (size_t k = 0; k < q_; ++k) s |= uint32_t(v.get(c * q_ + k)) << k;
      if (s >= alphabet_) return std::nullopt;
      x[c] = s;
    }
    return x;
  };
  if (kind_ == Kind::Index) {
    Sequence x(n_);
    for (size_t c = n_; c-- > 0;) {
      x[c] = uint32_t(bin % alphabet_);
      bin /= alphabet_;
    }
    if (bin == 0) out.push_back(x);
    return out;
  }
  if (kind_ == Kind::Identity) {
    BitVector v(n_ * q_);
    for (size_t k = 0; k < v.size(); ++k) v.set(k, bin >> k & 1);
    if (auto x = unpack(v)) out.push_back(*x);
    return out;
  }
  BitMatrix rhs(m_, 1);
  for (size_t k = 0; k < m_; ++k) rhs.set(k, 0, bin >> k & 1);
  const auto part = solve(H_, rhs);
  if (!part) return out;
  BitVector x0(n_ * q_);
  for (size_t k = 0; k < x0.size(); ++k) x0.set(k, part->get(k, 0));
  const BitMatrix ns = nullspace(H_);
  const size_t d = ns.rows();
  for (uint64_t mask = 0; mask < (uint64_t(1) << d); ++mask) {
    BitVector v = x0;
    for (size_t k = 0; k < d; ++k)
      if (mask >> k & 1) xor_range(v.data(), 0, ns.row(k), 0, v.size());
    if (auto x = unpack(v)) out.push_back(std::move(*x));
  }
  std::sort(out.begin(), out.end());
  return out;
}

uint64_t hash_bin(const Sequence &x, size_t alphabet, double rate, uint64_t seed) {
  return SwHash(x.size(), alphabet, rate, seed, 0).bin(x);
}

MlResult ml_decode(const FiniteMarkovChain &chain, const std::vector<uint64_t> &bins,
                   const std::vector<SwHash> &hashes, const Sequence &side, size_t gap) {
  if (bins.size() != hashes.size() || bins.empty()) throw std::invalid_argument("ml_decode: window shape");
  size_t budget = 0;
  for (const auto &h : hashes) budget += h.log2_members();
  if (budget > kEnumerationBudgetLog2) throw std::length_error("ml_decode: enumeration budget exceeded");
  const size_t w = bins.size(), n = side.size();
  std::vector<std::vector<Sequence>> cand(w);
  for (size_t k = 0; k < w; ++k) {
    cand[k] = hashes[k].members(bins[k]);
    if (cand[k].empty()) throw ImpossibleBin("bin has no valid member");
  }
  const auto first = log_table(k_step(chain, gap));
  const auto step = log_table(chain.P());
  const double ninf = -std::numeric_limits<double>::infinity();

  MlResult best;
  best.loglik = ninf;
  bool found = false;
  std::vector<size_t> pick(w);
  // Log-probabilities are <= 0, so a partial score below the best bounds
  // every completion.
  auto tol = [](double v) { return 1e-9 * std::max(1.0, std::abs(v)); };
  auto dfs = [&](auto &&self, size_t k, double score) -> void {
    if (k == w) {
      if (!found || score > best.loglik + tol(best.loglik)) {
        found = true;
        best.loglik = score;
        best.tie = false;
        best.x.clear();
        for (size_t i = 0; i < w; ++i) best.x.push_back(cand[i][pick[i]]);
      } else if (std::abs(score - best.loglik) <= tol(best.loglik)) {
        best.tie = true;
      }
      return;
    }
    const Sequence &prev = k == 0 ? side : cand[k - 1][pick[k - 1]];
    const auto &tab = k == 0 ? first : step;
    for (size_t i = 0; i < cand[k].size(); ++i) {
      double s = score;
      const Sequence &x = cand[k][i];
      for (size_t c = 0; c < n && s > ninf; ++c) s += tab[prev[c]][x[c]];
      if (s == ninf) continue;
      if (found && s < best.loglik - tol(best.loglik)) continue;
      pick[k] = i;
      self(self, k + 1, s);
    }
  };
  dfs(dfs, 0, 0.0);
  if (!found) throw ImpossibleBin("no tuple consistent with bins and side information");
  return best;
}

SwStreamDecoder::SwStreamDecoder(const FiniteMarkovChain &chain, SwCode code, size_t B, size_t W, size_t T,
                                 Sequence initial)
    : chain_(chain), code_(code), B_(B), W_(W), T_(T), last_(std::move(initial)) {
  if (W > 0 && T > 0) throw std::invalid_argument("sw decoder: delay requires W = 0");
}

std::vector<SwOutput> SwStreamDecoder::step(const std::optional<uint64_t> &bin) {
  const long t = t_++;
  std::vector<SwOutput> out;
  if (!bin) {
    if (!in_burst_) {
      if (!buffer_.empty()) throw PatternViolation("erasure inside recovery window");
      in_burst_ = true;
      burst_start_ = t;
      burst_len_ = 0;
    }
    if (++burst_len_ > B_) throw PatternViolation("burst longer than B");
    return out;
  }
  if (!in_burst_ && buffer_.empty()) {
    const MlResult r = ml_decode(chain_, {*bin}, {code_.at(t)}, last_, size_t(t - last_t_));
    last_ = r.x[0];
    last_t_ = t;
    out.push_back({t, last_, r.tie});
    return out;
  }
  in_burst_ = false;
  buffer_.push_back(*bin);
  const size_t window = std::max(W_, T_) + 1;
  if (buffer_.size() < window) return out;
  const long first = t - long(window) + 1;
  std::vector<SwHash> hashes;
  for (long tau = first; tau <= t; ++tau) hashes.push_back(code_.at(tau));
  const MlResult r = ml_decode(chain_, buffer_, hashes, last_, size_t(first - last_t_));
  buffer_.clear();
  for (size_t k = 0; k < window; ++k)
    if (first + long(k) >= burst_start_ + long(burst_len_ + W_)) out.push_back({first + long(k), r.x[k], r.tie});
  last_ = r.x.back();
  last_t_ = t;
  return out;
}

std::vector<Sequence> sample_paths(const FiniteMarkovChain &chain, size_t n, size_t len, Rng &rng) {
  std::vector<Sequence> s(len, Sequence(n));
  for (size_t c = 0; c < n; ++c)
    for (size_t t = 0; t < len; ++t) s[t][c] = t == 0 ? draw(chain.pi(), rng) : draw(chain.P()[s[t - 1][c]], rng);
  return s;
}

SwExperimentResult streaming_sw_experiment(const FiniteMarkovChain &chain, size_t B, size_t W,
                                           std::optional<size_t> T, double rate, size_t n, size_t trials,
                                           uint64_t seed) {
  const SwCode code{n, chain.alphabet(), rate, seed};
  const size_t per = code.at(0).log2_members();
  const size_t window = std::max(W, T.value_or(0)) + 1;
  if (per * window > kEnumerationBudgetLog2) throw std::length_error("sw experiment: enumeration budget exceeded");
  const size_t positions = 16;
  SwExperimentResult res;
  if (T) res.delayed = SwModeStats{};
  std::vector<SwExperimentResult> part(trials);
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < long(trials); ++k) {
    Rng rng(derive_seed(seed, uint64_t(k), 0x74726961ULL));
    const long j = 2 + long(size_t(k) % positions);
    const auto s = sample_paths(chain, n, size_t(j) + B + window + 1, rng);
    SwExperimentResult &r = part[size_t(k)];
    auto run = [&](SwModeStats &st, long from, size_t w, size_t gap) {
      std::vector<uint64_t> bins;
      std::vector<SwHash> hs;
      for (long tau = from; tau < from + long(w); ++tau) {
        hs.push_back(code.at(tau));
        bins.push_back(hs.back().bin(s[size_t(tau)]));
      }
      const MlResult m = ml_decode(chain, bins, hs, s[size_t(from) - gap], gap);
      ++st.trials;
      st.ties += m.tie;
      for (size_t i = 0; i < w; ++i)
        if (m.x[i] != s[size_t(from) + i]) {
          ++st.errors;
          break;
        }
    };
    run(r.steady, j - 1, 1, 1);
    run(r.post_burst, j + long(B), W + 1, B + 1);
    if (T) {
      r.delayed = SwModeStats{};
      run(*r.delayed, j + long(B), *T + 1, B + 1);
    }
  }
  for (const auto &p : part) {
    auto add = [](SwModeStats &a, const SwModeStats &b) {
      a.trials += b.trials;
      a.errors += b.errors;
      a.ties += b.ties;
    };
    add(res.steady, p.steady);
    add(res.post_burst, p.post_burst);
    if (T) add(*res.delayed, *p.delayed);
  }
  return res;
}

PeriodicHarnessResult sw_periodic_harness(const FiniteMarkovChain &chain, size_t B, size_t T, double rate,
                                          size_t n, size_t periods, uint64_t seed) {
  const size_t p = B + T + 1, horizon = p * periods;
  Rng rng(seed);
  const auto s = sample_paths(chain, n, horizon + 1, rng);  // s[0] is time -1
  const SwCode code{n, chain.alphabet(), rate, seed};
  const ErasurePattern pat = periodic(p, B, horizon);
  SwStreamDecoder dec(chain, code, B, 0, T, s[0]);
  PeriodicHarnessResult res;
  std::vector<bool> done(horizon, false);
  for (size_t t = 0; t < horizon; ++t) {
    std::optional<uint64_t> bin;
    if (!pat.is_erased(t)) {
      ++res.required;
      bin = code.at(long(t)).bin(s[t + 1]);
    }
    for (const auto &o : dec.step(bin)) {
      const size_t ot = size_t(o.t);
      if (o.x != s[ot + 1]) ++res.wrong;
      else if (t > ot + T) ++res.late;
      else if (!done[ot]) ++res.on_time;
      done[ot] = true;
    }
  }
  return res;
}

}  // namespace bst
