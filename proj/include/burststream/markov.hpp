#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace bst {

using RealMatrix = std::vector<std::vector<double>>;

class FiniteMarkovChain {
 public:
  explicit FiniteMarkovChain(RealMatrix P);

  static FiniteMarkovChain binary_symmetric(double eps);
  static FiniteMarkovChain from_json(const nlohmann::json &j);

  size_t alphabet() const { return P_.size(); }
  const RealMatrix &P() const { return P_; }
  const std::vector<double> &pi() const { return pi_; }

 private:
  RealMatrix P_;
  std::vector<double> pi_;
};

double entropy_bits(const std::vector<double> &p);
double binary_entropy(double p);
RealMatrix mat_mul(const RealMatrix &a, const RealMatrix &b);

RealMatrix k_step(const FiniteMarkovChain &chain, size_t k);

// H(s_k | s_0)
double cond_entropy_gap(const FiniteMarkovChain &chain, size_t k);

// I(s_B ; s_{B+gap} | s_0) from the explicit three-variable joint
double cond_mutual_info(const FiniteMarkovChain &chain, size_t B, size_t gap);

// H(s_{B+1}, ..., s_{B+W+1} | s_0)
double block_cond_entropy(const FiniteMarkovChain &chain, size_t B, size_t W);

bool is_symmetric(const FiniteMarkovChain &chain);

// Stationary distribution by direct linear solve, used to cross-check the
// power iteration.
std::vector<double> stationary_direct(const RealMatrix &P);

}  // namespace bst
