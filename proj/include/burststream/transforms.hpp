#pragma once

#include <cstddef>
#include <vector>

#include "burststream/gf2.hpp"
#include "burststream/sources.hpp"

namespace bst {

// Linear source with innovation block 0 and deterministic blocks 1..K:
// s_{i,1..K} = F * s_{i-1}. R_{j,k} is the (j,k) block of F.
struct UpperTriSpec {
  std::vector<size_t> N;
  BitMatrix F;  // (N_1+...+N_K) x (N_0+...+N_K)

  size_t K() const { return N.size() - 1; }
  size_t width() const;
  size_t offset(size_t j) const;
  BitMatrix block(size_t j, size_t k) const;  // j >= 1
  void validate() const;
  bool is_block_diagonal() const;
  nlohmann::json to_json() const;
};

UpperTriSpec as_upper_tri(const SemiDetSpec &spec);
UpperTriSpec as_upper_tri(const DiagonalSourceSpec &spec);

// Invertible transform from original symbols x to transformed symbols.
// out_i = top rows of M x_i, XOR Tmain * e_i where the offset sequence e_i
// is driven by a dropped autonomous component z (empty when nothing was
// dropped): e_{-1} = 0, e_i = [0; G e_{i-1} + H z_{i-1}], z_i = Rz z_{i-1}.
struct TransformMap {
  BitMatrix M;
  BitMatrix Minv;
  size_t out_width = 0;
  size_t n0 = 0;
  BitMatrix G, H, Rz, Tmain;
  std::vector<BitMatrix> steps;  // per-step conjugation matrices, for inspection

  size_t width() const { return M.rows(); }
  size_t dropped() const { return M.rows() - out_width; }
  bool memoryless() const { return dropped() == 0; }
  nlohmann::json to_json() const;
};

TransformMap identity_map(size_t width, size_t n0);
TransformMap compose(const TransformMap &second, const TransformMap &first);

struct Case1Result {
  TransformMap map;
  DiagonalSourceSpec spec;
  BitMatrix X;
};
Case1Result case1_transform(const SemiDetSpec &spec);

struct LfResult {
  TransformMap map;
  UpperTriSpec tri;
};
LfResult lf_transform(const SemiDetSpec &spec);

struct LbResult {
  TransformMap map;
  DiagonalSourceSpec spec;
};
LbResult lb_transform(const UpperTriSpec &tri);

struct PipelineResult {
  TransformMap map;
  UpperTriSpec tri;
  DiagonalSourceSpec spec;
};
PipelineResult semidet_to_diagonal(const SemiDetSpec &spec);

struct MappedTrace {
  StreamTrace trace;                // from t = -1
  std::vector<BitVector> z_init;    // dropped component at t = -1, per copy
};
MappedTrace apply_map(const TransformMap &map, const StreamTrace &tr);
StreamTrace invert_map(const TransformMap &map, const MappedTrace &mt);

// Per-copy helpers used by streaming decoders.
BitVector map_symbol(const TransformMap &map, const BitVector &x, const BitVector &offset);
BitVector unmap_symbol(const TransformMap &map, const BitVector &y, const BitVector &offset,
                       const BitVector &z);
// Offsets Tmain*e_t and dropped components z_t for t = -1..T-1.
void offset_sequence(const TransformMap &map, const BitVector &z_init, size_t T,
                     std::vector<BitVector> &offsets, std::vector<BitVector> &zs);

}  // namespace bst
