#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "burststream/markov.hpp"

namespace bst {

struct RateQuery {
  size_t B = 0;
  size_t W = 0;
  std::optional<size_t> T;
  size_t p() const { return B + W + 1; }
};

struct RateReport {
  double r_plus = 0.0;
  double r_minus = 0.0;
  std::vector<std::pair<std::string, double>> components;
};

double r_plus(const FiniteMarkovChain &chain, const RateQuery &q);
double r_plus_block(const FiniteMarkovChain &chain, const RateQuery &q);
double r_minus(const FiniteMarkovChain &chain, const RateQuery &q);
RateReport rate_report(const FiniteMarkovChain &chain, const RateQuery &q);
double r_symmetric_memoryless(const FiniteMarkovChain &chain, const RateQuery &q);
double r_delay(const FiniteMarkovChain &chain, size_t B, size_t T);
// (1/(T+1)) H(s_{B+1}, ..., s_{B+T+1} | s_0) by joint enumeration
double r_delay_joint(const FiniteMarkovChain &chain, size_t B, size_t T);

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return double(num) / double(den); }
  bool operator==(const Rational &o) const { return num * o.den == o.num * den; }
};

double diagonal_rate(const std::vector<size_t> &N, size_t B, size_t W);
Rational diagonal_rate_exact(const std::vector<size_t> &N, size_t B, size_t W);

void validate_distortion(const std::vector<double> &d);
double gaussian_rate(const std::vector<double> &d, size_t B, size_t W);

struct BaselineRates {
  double r_si = 0.0;
  double r_wz = 0.0;
  double r_fec = 0.0;
};
BaselineRates baseline_rates(const std::vector<double> &d, size_t B, size_t W);

}  // namespace bst
