#include "burststream/channel.hpp"

#include <algorithm>

namespace bst {

nlohmann::json ErasurePattern::to_json() const {
  return {{"T", T}, {"erased", std::vector<size_t>(erased.begin(), erased.end())}};
}

ErasurePattern ErasurePattern::from_json(const nlohmann::json &j) {
  ErasurePattern p;
  p.T = j.at("T").get<size_t>();
  for (size_t t : j.at("erased").get<std::vector<size_t>>()) {
    if (t >= p.T) throw std::out_of_range("erasure index outside horizon");
    p.erased.insert(t);
  }
  return p;
}

std::vector<std::pair<size_t, size_t>> ErasurePattern::bursts() const {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t t : erased) {
    if (!out.empty() && out.back().first + out.back().second == t) ++out.back().second;
    else out.emplace_back(t, 1);
  }
  return out;
}

ErasurePattern single_burst(size_t j, size_t len, size_t T) {
  if (j + len > T) throw std::out_of_range("burst exceeds horizon");
  ErasurePattern p{T, {}};
  for (size_t t = j; t < j + len; ++t) p.erased.insert(t);
  return p;
}

ErasurePattern periodic(size_t p, size_t B, size_t T) {
  if (B >= p) throw std::out_of_range("periodic pattern needs B < p");
  ErasurePattern pat{T, {}};
  for (size_t k = 0; k * p + B <= T; ++k)
    for (size_t t = k * p; t < k * p + B; ++t) pat.erased.insert(t);
  return pat;
}

ErasurePattern multi_burst(const std::vector<std::pair<size_t, size_t>> &bursts, size_t guard, size_t T) {
  ErasurePattern pat{T, {}};
  auto sorted = bursts;
  std::sort(sorted.begin(), sorted.end());
  for (size_t k = 0; k < sorted.size(); ++k) {
    const auto [j, len] = sorted[k];
    if (j + len > T) throw std::out_of_range("burst exceeds horizon");
    if (k > 0) {
      const size_t prev_end = sorted[k - 1].first + sorted[k - 1].second;
      if (j < prev_end || j - prev_end < guard) throw PatternViolation("guard interval violated");
    }
    for (size_t t = j; t < j + len; ++t) pat.erased.insert(t);
  }
  return pat;
}

}  // namespace bst
