#pragma once

#include <cstddef>
#include <cstdint>

#include "burststream/channel.hpp"
#include "burststream/prospicient.hpp"
#include "burststream/sources.hpp"
#include "burststream/transforms.hpp"

namespace bst {

// Outcome of streaming one source trace through a prospicient codec.
// Required times are those outside every burst's window [j, j+len+W-1].
struct DetTrialResult {
  size_t required = 0;
  size_t recovered = 0;   // required and bit-exact
  size_t mismatches = 0;  // required, reported recovered, but wrong
  size_t failures = 0;    // DecodeFailure events
  bool pattern_violation = false;

  bool failed() const { return failures > 0; }
  bool exact() const { return !pattern_violation && failures == 0 && mismatches == 0 && recovered == required; }
};

// The codec must be built on ns.spec; full original symbols are rebuilt
// from the normalized ones before comparison.
DetTrialResult run_diagonal_trial(const ProspicientCodec &codec, const NormalizedSpec &ns, size_t T,
                                  const ErasurePattern &pat, uint64_t source_seed);

// Semi-deterministic source mapped by `map` into the diagonal source
// ns.original, streamed, and mapped back.
DetTrialResult run_semidet_trial(const ProspicientCodec &codec, const NormalizedSpec &ns, const TransformMap &map,
                                 const SemiDetSpec &spec, size_t T, const ErasurePattern &pat,
                                 uint64_t source_seed);

}  // namespace bst
