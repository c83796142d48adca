#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "burststream/gf2.hpp"
#include "burststream/markov.hpp"

namespace bst {

using Sequence = std::vector<uint32_t>;

struct ImpossibleBin : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bin hash over n-symbol blocks. m = floor(n * rate) index bits.
//   Identity: m covers the bit representation, bin = packed bits.
//   Index:    |X|^n <= 2^m, bin = base-|X| integer of the block.
//   Linear:   bin = H x over the packed bits, H full row rank.
class SwHash {
 public:
  enum class Kind { Identity, Index, Linear };

  SwHash(size_t n, size_t alphabet, double rate, uint64_t seed, long t);

  size_t n() const { return n_; }
  size_t alphabet() const { return alphabet_; }
  size_t bits() const { return m_; }
  Kind kind() const { return kind_; }

  uint64_t bin(const Sequence &x) const;
  // Lexicographically sorted members of a bin; empty when none is valid.
  std::vector<Sequence> members(uint64_t bin) const;
  // log2 of the member-count bound used for budget checks.
  size_t log2_members() const;

 private:
  BitVector pack(const Sequence &x) const;
  size_t n_, alphabet_, q_, m_;
  Kind kind_;
  BitMatrix H_;
};

uint64_t hash_bin(const Sequence &x, size_t alphabet, double rate, uint64_t seed);

constexpr size_t kEnumerationBudgetLog2 = 26;

struct MlResult {
  std::vector<Sequence> x;
  double loglik = 0;
  bool tie = false;
};

// Most likely (x_1..x_w) with x_k in bin k, given side information s at
// distance `gap` before x_1. Ties resolve to the lexicographically first.
MlResult ml_decode(const FiniteMarkovChain &chain, const std::vector<uint64_t> &bins,
                   const std::vector<SwHash> &hashes, const Sequence &side, size_t gap);

struct SwCode {
  size_t n = 0, alphabet = 0;
  double rate = 0;
  uint64_t seed = 0;
  SwHash at(long t) const { return SwHash(n, alphabet, rate, seed, t); }
};

struct SwOutput {
  long t = 0;
  Sequence x;
  bool tie = false;
};

// Streaming binning decoder: instantaneous steady decoding, joint decoding
// of the window after a burst. With W > 0 the first W post-burst symbols
// are not emitted; with delay T they are emitted at the window end.
class SwStreamDecoder {
 public:
  SwStreamDecoder(const FiniteMarkovChain &chain, SwCode code, size_t B, size_t W, size_t T, Sequence initial);
  std::vector<SwOutput> step(const std::optional<uint64_t> &bin);

 private:
  const FiniteMarkovChain &chain_;
  SwCode code_;
  size_t B_, W_, T_;
  Sequence last_;
  long last_t_ = -1, t_ = 0, burst_start_ = 0;
  size_t burst_len_ = 0;
  bool in_burst_ = false;
  std::vector<uint64_t> buffer_;
};

struct SwModeStats {
  size_t trials = 0, errors = 0, ties = 0;
  double error_rate() const { return trials ? double(errors) / double(trials) : 0.0; }
};

struct SwExperimentResult {
  SwModeStats steady, post_burst;
  std::optional<SwModeStats> delayed;
};

// Monte-Carlo over `trials` bursts at cycling positions. Each mode is
// decoded from correct side information: steady from s_{t-1}, post-burst
// and delayed from s_{j-1}. Block error = any symbol of the window wrong.
SwExperimentResult streaming_sw_experiment(const FiniteMarkovChain &chain, size_t B, size_t W,
                                           std::optional<size_t> T, double rate, size_t n, size_t trials,
                                           uint64_t seed);

struct PeriodicHarnessResult {
  size_t required = 0, on_time = 0, wrong = 0, late = 0;
  bool exact() const { return on_time == required && wrong == 0 && late == 0; }
};

// Periodic erasures with period B+T+1 through the streaming decoder; every
// received symbol must be recovered correctly within T steps.
PeriodicHarnessResult sw_periodic_harness(const FiniteMarkovChain &chain, size_t B, size_t T, double rate,
                                          size_t n, size_t periods, uint64_t seed);

// Stationary-start sample path of n independent copies, times 0..len-1.
std::vector<Sequence> sample_paths(const FiniteMarkovChain &chain, size_t n, size_t len, Rng &rng);

}  // namespace bst
