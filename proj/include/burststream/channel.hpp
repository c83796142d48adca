#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"

namespace bst {

struct PatternViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ErasurePattern {
  size_t T = 0;
  std::set<size_t> erased;

  bool is_erased(size_t t) const { return erased.count(t) != 0; }
  nlohmann::json to_json() const;
  static ErasurePattern from_json(const nlohmann::json &j);

  // Maximal runs of consecutive erasures as (start, length).
  std::vector<std::pair<size_t, size_t>> bursts() const;
};

ErasurePattern single_burst(size_t j, size_t len, size_t T);
ErasurePattern periodic(size_t p, size_t B, size_t T);
ErasurePattern multi_burst(const std::vector<std::pair<size_t, size_t>> &bursts, size_t guard, size_t T);

// Erased payloads are replaced by an explicit absent marker.
template <class P>
std::vector<std::optional<P>> apply_erasures(const ErasurePattern &pat, const std::vector<P> &stream) {
  std::vector<std::optional<P>> out;
  out.reserve(stream.size());
  for (size_t t = 0; t < stream.size(); ++t)
    out.push_back(pat.is_erased(t) ? std::nullopt : std::optional<P>(stream[t]));
  return out;
}

}  // namespace bst
