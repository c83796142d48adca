#pragma once

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "burststream/markov.hpp"
#include "burststream/rng.hpp"

namespace oracle {

// Row entries are gamma-like draws floored at 1e-3, then normalized.
inline bst::FiniteMarkovChain random_chain(size_t k, bst::Rng &rng) {
  bst::RealMatrix P(k, std::vector<double>(k));
  for (auto &row : P) {
    double s = 0.0;
    for (auto &v : row) {
      v = std::max(1e-3, -std::log(std::max(1e-300, rng.uniform())));
      s += v;
    }
    for (auto &v : row) v /= s;
    double t = 0.0;
    for (size_t j = 0; j + 1 < k; ++j) t += row[j];
    row[k - 1] = 1.0 - t;
  }
  return bst::FiniteMarkovChain(P);
}

// Exhaustive path enumeration of s_0..s_m under the stationary chain.
struct PathJoint {
  size_t k, m;
  std::vector<std::vector<int>> paths;
  std::vector<double> prob;

  PathJoint(const bst::FiniteMarkovChain &c, size_t m_) : k(c.alphabet()), m(m_) {
    std::vector<int> p(m + 1, 0);
    for (;;) {
      double pr = c.pi()[p[0]];
      for (size_t t = 1; t <= m; ++t) pr *= c.P()[p[t - 1]][p[t]];
      paths.push_back(p);
      prob.push_back(pr);
      size_t t = 0;
      while (t <= m && ++p[t] == int(k)) p[t++] = 0;
      if (t > m) break;
    }
  }

  double H(const std::vector<size_t> &idx) const {
    std::map<std::vector<int>, double> marg;
    for (size_t a = 0; a < paths.size(); ++a) {
      std::vector<int> key;
      for (size_t i : idx) key.push_back(paths[a][i]);
      marg[key] += prob[a];
    }
    double h = 0.0;
    for (auto &[key, v] : marg)
      if (v > 0) h -= v * std::log2(v);
    return h;
  }

  double Hcond(std::vector<size_t> x, const std::vector<size_t> &y) const {
    x.insert(x.end(), y.begin(), y.end());
    return H(x) - H(y);
  }

  // I(X;Y|Z)
  double I(const std::vector<size_t> &x, const std::vector<size_t> &y, const std::vector<size_t> &z) const {
    std::vector<size_t> xz = x, yz = y, xyz = x;
    xz.insert(xz.end(), z.begin(), z.end());
    yz.insert(yz.end(), z.begin(), z.end());
    xyz.insert(xyz.end(), y.begin(), y.end());
    xyz.insert(xyz.end(), z.begin(), z.end());
    return H(xz) + H(yz) - H(xyz) - H(z);
  }
};

inline double hb(double p) {
  double h = 0.0;
  if (p > 0) h -= p * std::log2(p);
  if (p < 1) h -= (1 - p) * std::log2(1 - p);
  return h;
}

// M_i listed entry by entry: full index sets for the W+1 newest times, then
// the burst-aged partial sets.
inline std::set<std::pair<long, size_t>> available_layers_oracle(long i, size_t B, size_t W) {
  std::set<std::pair<long, size_t>> s;
  for (long t = i - long(W); t <= i; ++t)
    if (t >= 0) s.insert({t, 0});
  for (size_t k = 1; k <= B; ++k) {
    const long t = i - long(W) - long(k);
    if (t >= 0) s.insert({t, k});
  }
  return s;
}

}  // namespace oracle
