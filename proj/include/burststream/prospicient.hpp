#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "burststream/gf2.hpp"
#include "burststream/sources.hpp"

namespace bst {

struct CodewordBlock {
  std::vector<BitVector> c;  // c_{i,0..B}
};

// c_{i,0} = s_{i,0}; c_{i,k} = R_{W+k,k} s_{i,k}. Single copy.
CodewordBlock rearrange(const BitVector &symbol, const DiagonalSourceSpec &spec, size_t B, size_t W);

struct BinCode {
  size_t n = 0;       // spatial copies
  size_t R0 = 0;      // codeword bits per copy
  size_t L = 0;       // packet bits
  uint64_t seed = 0;
  bool identity = false;

  BitMatrix matrix(long t) const;
  nlohmann::json to_json() const;
};

// L = ceil(n * diagonal_rate) + delta; binning disabled when L >= n * R0.
BinCode make_bincode(const DiagonalSourceSpec &spec, size_t B, size_t W, size_t n, size_t delta, uint64_t seed);

struct PacketStream {
  size_t L = 0;
  std::vector<BitVector> f;  // f[t], t = 0..T-1
  nlohmann::json to_json(const std::vector<bool> &erased) const;
};

// Codeword vector layout: segment-major, then copy, then bit.
class ProspicientCodec {
 public:
  ProspicientCodec(DiagonalSourceSpec spec, size_t B, size_t W, BinCode code);

  const DiagonalSourceSpec &spec() const { return spec_; }
  const BinCode &code() const { return code_; }
  size_t B() const { return B_; }
  size_t W() const { return W_; }
  size_t codeword_bits() const { return code_.R0 * code_.n; }
  const std::vector<size_t> &segment_widths() const { return cw_; }

  BitVector codeword_vector(const BitVector &symbol_all_copies) const;
  BitVector encode_symbol(const BitVector &symbol_all_copies, long t) const;
  PacketStream encode(const StreamTrace &tr) const;

  // R_{a,b} from the cached table.
  const BitMatrix &R(size_t a, size_t b) const { return prod_[a][b]; }

  // Data-independent decoding systems, built once per codec and shared by
  // every stream decoded with it.
  struct SteadySystem {
    BitMatrix H;
    FixedSolver solver;  // innovation columns of H
  };
  std::shared_ptr<const SteadySystem> steady_system(long t) const;
  std::shared_ptr<const FixedSolver> burst_system(long j, size_t burst_len, long i) const;

  // Sub-symbol j of all copies, copy-major, and its inverse.
  BitVector gather(const BitVector &sym, size_t j) const;
  void scatter(BitVector &sym, size_t j, const BitVector &part) const;

 private:
  DiagonalSourceSpec spec_;
  size_t B_, W_;
  BinCode code_;
  std::vector<size_t> cw_, seg_off_;
  std::vector<std::vector<BitMatrix>> prod_;
  struct Cache {
    std::mutex mu;
    std::map<long, std::shared_ptr<const SteadySystem>> steady;
    std::map<std::tuple<long, size_t, long>, std::shared_ptr<const FixedSolver>> burst;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
  friend class ProspicientDecoder;
};

enum class SymbolStatus { Recovered, Skipped, DecodeFailure, Lost };

struct DecodeOutput {
  SymbolStatus status = SymbolStatus::Skipped;
  BitVector symbol;
};

class ProspicientDecoder {
 public:
  enum class Mode { Steady, Burst, Buffering, Lost };

  ProspicientDecoder(const ProspicientCodec &codec, BitVector initial_symbol);

  // Feed the packet for the next time index (nullopt = erasure).
  DecodeOutput step(const std::optional<BitVector> &packet);

  Mode mode() const { return mode_; }
  long time() const { return t_; }

 private:
  std::optional<BitVector> steady_solve(const BitVector &f, long t) const;
  std::optional<BitVector> burst_solve() const;

  const ProspicientCodec &codec_;
  Mode mode_ = Mode::Steady;
  long t_ = 0;
  BitVector last_;  // full symbol at last_t_
  long last_t_ = -1;
  long burst_start_ = 0;
  size_t burst_len_ = 0;
  std::vector<BitVector> buffer_;
};

struct StreamDecodeResult {
  std::vector<DecodeOutput> out;
  bool pattern_violation = false;
  size_t failures = 0;
};

// Runs the decoder over a whole stream; PatternViolation is reported in the
// result instead of thrown.
StreamDecodeResult decode_stream(const ProspicientCodec &codec, const BitVector &initial,
                                 const std::vector<std::optional<BitVector>> &packets);

}  // namespace bst
