#include "burststream/experiments.hpp"

#include <functional>

namespace bst {

namespace {

std::vector<bool> window_mask(const ErasurePattern &pat, size_t W, size_t T) {
  std::vector<bool> w(T, false);
  for (const auto &[j, len] : pat.bursts())
    for (size_t t = j; t < std::min(T, j + len + W); ++t) w[t] = true;
  return w;
}

// Streams the normalized trace and rebuilds full original-domain symbols;
// `check(t, c, full)` compares one copy.
DetTrialResult stream_and_check(const ProspicientCodec &codec, const NormalizedSpec &ns, const StreamTrace &orig,
                                const ErasurePattern &pat,
                                const std::function<bool(long, size_t, const BitVector &)> &check) {
  const size_t T = orig.T, n = orig.n, wo = ns.original.width(), wn = ns.spec.width();
  const StreamTrace norm = truncate_trace(ns, orig);
  const PacketStream ps = codec.encode(norm);
  const StreamDecodeResult r = decode_stream(codec, norm.at(-1), apply_erasures(pat, ps.f));
  const std::vector<bool> window = window_mask(pat, codec.W(), T);
  DetTrialResult res;
  res.pattern_violation = r.pattern_violation;
  res.failures = r.failures;
  BitVector prev = orig.at(-1);
  long tp = -1;
  for (size_t t = 0; t < T; ++t) {
    const DecodeOutput &o = r.out[t];
    BitVector full;
    if (o.status == SymbolStatus::Recovered) {
      full = BitVector(n * wo);
      for (size_t c = 0; c < n; ++c) {
        const BitVector part = o.symbol.slice(c * wn, wn);
        const BitVector f = ns.truncated() ? complete_tail(ns, part, prev.slice(c * wo, wo), size_t(long(t) - tp))
                                           : part.slice(0, wo);
        full.assign(c * wo, f);
      }
      prev = full;
      tp = long(t);
    }
    if (window[t]) continue;
    ++res.required;
    if (o.status != SymbolStatus::Recovered) continue;
    bool ok = true;
    for (size_t c = 0; c < n && ok; ++c) ok = check(long(t), c, full.slice(c * wo, wo));
    if (ok) ++res.recovered;
    else ++res.mismatches;
  }
  return res;
}

}  // namespace

DetTrialResult run_diagonal_trial(const ProspicientCodec &codec, const NormalizedSpec &ns, size_t T,
                                  const ErasurePattern &pat, uint64_t source_seed) {
  const StreamTrace orig = gen_diagonal(ns.original, codec.code().n, T, source_seed);
  return stream_and_check(codec, ns, orig, pat,
                          [&](long t, size_t c, const BitVector &y) { return y == orig.copy(t, c); });
}

DetTrialResult run_semidet_trial(const ProspicientCodec &codec, const NormalizedSpec &ns, const TransformMap &map,
                                 const SemiDetSpec &spec, size_t T, const ErasurePattern &pat,
                                 uint64_t source_seed) {
  const size_t n = codec.code().n;
  const StreamTrace x = gen_semidet(spec, n, T, source_seed);
  const MappedTrace mt = apply_map(map, x);
  // The decoder holds x_{-1}, hence the dropped component and all offsets.
  std::vector<std::vector<BitVector>> offs(n), zs(n);
  for (size_t c = 0; c < n; ++c) offset_sequence(map, mt.z_init[c], T, offs[c], zs[c]);
  return stream_and_check(codec, ns, mt.trace, pat, [&](long t, size_t c, const BitVector &y) {
    const size_t k = size_t(t + 1);
    return unmap_symbol(map, y, offs[c][k], zs[c][k]) == x.copy(t, c);
  });
}

}  // namespace bst
