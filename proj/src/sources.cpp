#include "burststream/sources.hpp"

#include <numeric>
#include <stdexcept>

namespace bst {

size_t DiagonalSourceSpec::width() const { return std::accumulate(N.begin(), N.end(), size_t(0)); }

size_t DiagonalSourceSpec::offset(size_t j) const {
  return std::accumulate(N.begin(), N.begin() + long(j), size_t(0));
}

void DiagonalSourceSpec::validate() const {
  if (N.empty()) throw std::invalid_argument("diagonal spec needs N_0");
  if (R.size() != K()) throw std::invalid_argument("diagonal spec needs K transition matrices");
  for (size_t j = 1; j <= K(); ++j) {
    const BitMatrix &r = R[j - 1];
    if (r.rows() != N[j] || r.cols() != N[j - 1]) throw std::invalid_argument("R_{j,j-1} shape");
    if (rank(r) != N[j]) throw std::invalid_argument("R_{j,j-1} not full row rank");
  }
}

BitMatrix DiagonalSourceSpec::prod(size_t k, size_t l) const {
  if (l > k) throw std::invalid_argument("prod needs l <= k");
  BitMatrix m = BitMatrix::identity(N[l]);
  for (size_t j = l + 1; j <= k; ++j) m = R[j - 1] * m;
  return m;
}

DiagonalSourceSpec DiagonalSourceSpec::random(const std::vector<size_t> &N, Rng &rng) {
  DiagonalSourceSpec s;
  s.N = N;
  for (size_t j = 1; j < N.size(); ++j) s.R.push_back(BitMatrix::random_full_row_rank(N[j], N[j - 1], rng));
  s.validate();
  return s;
}

nlohmann::json DiagonalSourceSpec::to_json() const {
  nlohmann::json j;
  j["N"] = N;
  j["R"] = nlohmann::json::array();
  for (const auto &r : R) j["R"].push_back(bst::to_json(r));
  return j;
}

DiagonalSourceSpec DiagonalSourceSpec::from_json(const nlohmann::json &j) {
  DiagonalSourceSpec s;
  s.N = j.at("N").get<std::vector<size_t>>();
  for (const auto &r : j.at("R")) s.R.push_back(matrix_from_json(r));
  s.validate();
  return s;
}

void SemiDetSpec::validate() const {
  if (A.rows() != Nd || A.cols() != N0) throw std::invalid_argument("A must be N_d x N_0");
  if (B.rows() != Nd || B.cols() != Nd) throw std::invalid_argument("B must be N_d x N_d");
}

SemiDetSpec SemiDetSpec::random(size_t N0, size_t Nd, Rng &rng) {
  return {N0, Nd, BitMatrix::random(Nd, N0, rng), BitMatrix::random(Nd, Nd, rng)};
}

nlohmann::json SemiDetSpec::to_json() const {
  return {{"N0", N0}, {"Nd", Nd}, {"A", bst::to_json(A)}, {"B", bst::to_json(B)}};
}

SemiDetSpec SemiDetSpec::from_json(const nlohmann::json &j) {
  SemiDetSpec s{j.at("N0").get<size_t>(), j.at("Nd").get<size_t>(), matrix_from_json(j.at("A")),
                matrix_from_json(j.at("B"))};
  s.validate();
  return s;
}

StreamTrace gen_diagonal(const DiagonalSourceSpec &spec, size_t n, size_t T, uint64_t seed) {
  spec.validate();
  const size_t K = spec.K(), w = spec.width();
  StreamTrace tr{T, n, w, -long(K) - 1, seed, {}};
  const long u_min = tr.t_min - long(K);
  Rng rng(seed);
  std::vector<BitVector> u;  // innovations, u[t - u_min] holds n*N_0 bits
  for (long t = u_min; t < long(T); ++t) u.push_back(BitVector::random(n * spec.N[0], rng));
  std::vector<BitMatrix> R0(K + 1);
  for (size_t j = 0; j <= K; ++j) R0[j] = spec.prod(j, 0);
  for (long t = tr.t_min; t < long(T); ++t) {
    BitVector s(n * w);
    for (size_t c = 0; c < n; ++c)
      for (size_t j = 0; j <= K; ++j) {
        const BitVector inn = u[size_t(t - long(j) - u_min)].slice(c * spec.N[0], spec.N[0]);
        const BitVector sub = (j == 0) ? inn : R0[j] * inn;
        xor_range(s.data(), c * w + spec.offset(j), sub.data(), 0, spec.N[j]);
      }
    tr.sym.push_back(std::move(s));
  }
  return tr;
}

StreamTrace gen_semidet(const SemiDetSpec &spec, size_t n, size_t T, uint64_t seed) {
  spec.validate();
  const size_t w = spec.width();
  StreamTrace tr{T, n, w, -1, seed, {}};
  Rng rng(seed);
  const BitMatrix F = spec.F();
  tr.sym.push_back(BitVector::random(n * w, rng));
  for (long t = 0; t < long(T); ++t) {
    BitVector s = BitVector::random(n * w, rng);
    const BitVector &prev = tr.sym.back();
    for (size_t c = 0; c < n; ++c) {
      const BitVector d = F * prev.slice(c * w, w);
      for (size_t b = 0; b < spec.Nd; ++b) s.set(c * w + spec.N0 + b, d.get(b));
    }
    tr.sym.push_back(std::move(s));
  }
  return tr;
}

bool validate_diagonal_trace(const DiagonalSourceSpec &spec, const StreamTrace &tr) {
  if (tr.width != spec.width()) return false;
  for (long t = tr.t_min + 1; t < long(tr.T); ++t)
    for (size_t c = 0; c < tr.n; ++c)
      for (size_t j = 1; j <= spec.K(); ++j) {
        const BitVector prev = tr.sub(t - 1, c, spec.offset(j - 1), spec.N[j - 1]);
        if (!(spec.R[j - 1] * prev == tr.sub(t, c, spec.offset(j), spec.N[j]))) return false;
      }
  return true;
}

bool validate_semidet_trace(const SemiDetSpec &spec, const StreamTrace &tr) {
  if (tr.width != spec.width()) return false;
  const BitMatrix F = spec.F();
  for (long t = tr.t_min + 1; t < long(tr.T); ++t)
    for (size_t c = 0; c < tr.n; ++c)
      if (!(F * tr.copy(t - 1, c) == tr.sub(t, c, spec.N0, spec.Nd))) return false;
  return true;
}

NormalizedSpec normalize_K(const DiagonalSourceSpec &spec, size_t B, size_t W) {
  spec.validate();
  const size_t target = B + W;
  NormalizedSpec ns{spec, spec};
  DiagonalSourceSpec &s = ns.spec;
  while (s.K() < target) {
    s.R.emplace_back(0, s.N.back());
    s.N.push_back(0);
  }
  if (s.K() > target) {
    s.N.resize(target + 1);
    s.R.resize(target);
  }
  return ns;
}

StreamTrace truncate_trace(const NormalizedSpec &ns, const StreamTrace &tr) {
  StreamTrace out{tr.T, tr.n, ns.spec.width(), tr.t_min, tr.seed, {}};
  const size_t keep = std::min(ns.spec.width(), ns.original.width());
  for (const auto &s : tr.sym) {
    BitVector v(tr.n * out.width);
    for (size_t c = 0; c < tr.n; ++c) xor_range(v.data(), c * out.width, s.data(), c * tr.width, keep);
    out.sym.push_back(std::move(v));
  }
  return out;
}

BitVector complete_tail(const NormalizedSpec &ns, const BitVector &normalized_i, const BitVector &full_prev,
                        size_t m) {
  const DiagonalSourceSpec &o = ns.original;
  const size_t Kp = ns.spec.K();
  BitVector full(o.width());
  const size_t keep = std::min(ns.spec.width(), o.width());
  xor_range(full.data(), 0, normalized_i.data(), 0, keep);
  for (size_t j = Kp + 1; j <= o.K(); ++j) {
    if (m > j) throw std::logic_error("complete_tail: history too old");
    const BitVector src = full_prev.slice(o.offset(j - m), o.N[j - m]);
    const BitVector sub = o.prod(j, j - m) * src;
    xor_range(full.data(), o.offset(j), sub.data(), 0, o.N[j]);
  }
  return full;
}

BinaryMarkovTrace gen_binary_markov(double eps, size_t n, size_t T, uint64_t seed) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("flip probability out of range");
  BinaryMarkovTrace tr;
  tr.T = T;
  tr.n = n;
  Rng rng(seed);
  tr.initial.resize(n);
  for (auto &v : tr.initial) v = rng.bit();
  std::vector<uint32_t> prev = tr.initial;
  for (size_t t = 0; t < T; ++t) {
    for (auto &v : prev) v ^= (rng.uniform() < eps) ? 1u : 0u;
    tr.x.push_back(prev);
  }
  return tr;
}

RealTrace gen_gaussian_iid(size_t n, size_t T, uint64_t seed) {
  RealTrace tr;
  tr.T = T;
  tr.n = n;
  Rng rng(seed);
  tr.x.assign(T, std::vector<double>(n));
  for (auto &row : tr.x)
    for (auto &v : row) v = rng.normal();
  return tr;
}

size_t semidet_cond_entropy_rank(const SemiDetSpec &spec, size_t k) {
  if (k == 0) return 0;
  // Deterministic part at time k: sum_{m=1}^{k-1} B^{k-1-m} A u_m.
  BitMatrix kry(spec.Nd, 0);
  BitMatrix term = spec.A;
  for (size_t m = 1; m < k; ++m) {
    kry = BitMatrix::hstack(kry, term);
    term = spec.B * term;
  }
  return spec.N0 + rank(kry);
}

Rational semidet_r_minus_exact(const SemiDetSpec &spec, size_t B, size_t W) {
  const size_t p = B + W + 1;
  const long long num = (long long)(spec.N0 * (W + 1)) + (long long)semidet_cond_entropy_rank(spec, p) -
                        (long long)semidet_cond_entropy_rank(spec, p - B);
  return {num, (long long)(W + 1)};
}

}  // namespace bst
