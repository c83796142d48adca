#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "burststream/gf2.hpp"
#include "burststream/rates.hpp"

namespace bst {

struct DiagonalSourceSpec {
  std::vector<size_t> N;     // N_0..N_K
  std::vector<BitMatrix> R;  // R[j-1] = R_{j,j-1}, N_j x N_{j-1}

  size_t K() const { return N.size() - 1; }
  size_t width() const;
  size_t offset(size_t j) const;
  void validate() const;
  // R_{k,l} = R_{k,k-1} ... R_{l+1,l}; R_{k,k} = I
  BitMatrix prod(size_t k, size_t l) const;

  static DiagonalSourceSpec random(const std::vector<size_t> &N, Rng &rng);
  nlohmann::json to_json() const;
  static DiagonalSourceSpec from_json(const nlohmann::json &j);
};

struct SemiDetSpec {
  size_t N0 = 0, Nd = 0;
  BitMatrix A;  // Nd x N0
  BitMatrix B;  // Nd x Nd

  size_t width() const { return N0 + Nd; }
  void validate() const;
  // s_{i,d} = F * (s_{i-1,0}; s_{i-1,d}),  F = [A B]
  BitMatrix F() const { return BitMatrix::hstack(A, B); }

  static SemiDetSpec random(size_t N0, size_t Nd, Rng &rng);
  nlohmann::json to_json() const;
  static SemiDetSpec from_json(const nlohmann::json &j);
};

// Time-indexed structured symbols. Every time holds n copies of `width`
// bits, copy-major: copy c occupies [c*width, (c+1)*width).
struct StreamTrace {
  size_t T = 0;
  size_t n = 0;
  size_t width = 0;
  long t_min = 0;  // earliest stored (tail) time, <= -1
  uint64_t seed = 0;
  std::vector<BitVector> sym;

  const BitVector &at(long t) const { return sym.at(size_t(t - t_min)); }
  BitVector &at(long t) { return sym.at(size_t(t - t_min)); }
  BitVector copy(long t, size_t c) const { return at(t).slice(c * width, width); }
  BitVector sub(long t, size_t c, size_t off, size_t len) const { return at(t).slice(c * width + off, len); }
};

StreamTrace gen_diagonal(const DiagonalSourceSpec &spec, size_t n, size_t T, uint64_t seed);
StreamTrace gen_semidet(const SemiDetSpec &spec, size_t n, size_t T, uint64_t seed);

// Checks s_{i,j} == R_{j,j-1} s_{i-1,j-1} at every stored time and copy.
bool validate_diagonal_trace(const DiagonalSourceSpec &spec, const StreamTrace &tr);
bool validate_semidet_trace(const SemiDetSpec &spec, const StreamTrace &tr);

struct NormalizedSpec {
  DiagonalSourceSpec spec;      // K = B + W
  DiagonalSourceSpec original;  // as given
  bool truncated() const { return original.K() > spec.K(); }
};

NormalizedSpec normalize_K(const DiagonalSourceSpec &spec, size_t B, size_t W);

// Restrict an original-K trace to the normalized sub-symbols.
StreamTrace truncate_trace(const NormalizedSpec &ns, const StreamTrace &tr);

// Rebuild the full original-K symbol (one copy) at time i from its
// normalized part and the full original symbol known at time i - m.
BitVector complete_tail(const NormalizedSpec &ns, const BitVector &normalized_i,
                        const BitVector &full_prev, size_t m);

// Finite-alphabet and real-valued traces.
struct SymbolTrace {
  size_t T = 0, n = 0;
  std::vector<std::vector<uint32_t>> x;  // x[t][copy]
};
struct RealTrace {
  size_t T = 0, n = 0;
  std::vector<std::vector<double>> x;  // x[t][sample]
};

// Initial symbol of each copy is uniform; x is stored from t = 0 with the
// state at t = -1 in `initial`.
struct BinaryMarkovTrace : SymbolTrace {
  std::vector<uint32_t> initial;
};
BinaryMarkovTrace gen_binary_markov(double eps, size_t n, size_t T, uint64_t seed);
RealTrace gen_gaussian_iid(size_t n, size_t T, uint64_t seed);

// Linear sources driven by uniform innovations: entropies are ranks.
// H(s_k | s_0) for the semi-deterministic source equals the rank of the
// map from innovations u_0..u_{k-1} to s_k (taking s_0 = 0).
size_t semidet_cond_entropy_rank(const SemiDetSpec &spec, size_t k);
// r_minus numerator over (W+1): N0 (W+1) + rank(G_p) - rank(G_{p-B}) with
// p = B+W+1.
Rational semidet_r_minus_exact(const SemiDetSpec &spec, size_t B, size_t W);

}  // namespace bst
