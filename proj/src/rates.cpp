#include "burststream/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bst {

namespace {
double half_log_inv(double d) { return 0.5 * std::log2(1.0 / d); }
}  // namespace

double r_plus(const FiniteMarkovChain &chain, const RateQuery &q) {
  return cond_entropy_gap(chain, 1) + cond_mutual_info(chain, q.B, 1) / double(q.W + 1);
}

double r_plus_block(const FiniteMarkovChain &chain, const RateQuery &q) {
  return block_cond_entropy(chain, q.B, q.W) / double(q.W + 1);
}

double r_minus(const FiniteMarkovChain &chain, const RateQuery &q) {
  return cond_entropy_gap(chain, 1) + cond_mutual_info(chain, q.B, q.W + 1) / double(q.W + 1);
}

RateReport rate_report(const FiniteMarkovChain &chain, const RateQuery &q) {
  RateReport r;
  const double h1 = cond_entropy_gap(chain, 1);
  const double ip = cond_mutual_info(chain, q.B, 1), im = cond_mutual_info(chain, q.B, q.W + 1);
  r.r_plus = h1 + ip / double(q.W + 1);
  r.r_minus = h1 + im / double(q.W + 1);
  r.components = {{"H(s1|s0)", h1},
                  {"I(sB;sB+1|s0)/(W+1)", ip / double(q.W + 1)},
                  {"I(sB;sB+W+1|s0)/(W+1)", im / double(q.W + 1)}};
  return r;
}

double r_symmetric_memoryless(const FiniteMarkovChain &chain, const RateQuery &q) {
  if (!is_symmetric(chain)) throw std::domain_error("chain is not symmetric");
  return block_cond_entropy(chain, q.B, q.W) / double(q.W + 1);
}

double r_delay(const FiniteMarkovChain &chain, size_t B, size_t T) {
  const double t = double(T);
  return (cond_entropy_gap(chain, B + 1) + t * cond_entropy_gap(chain, 1)) / (t + 1.0);
}

double r_delay_joint(const FiniteMarkovChain &chain, size_t B, size_t T) {
  const size_t k = chain.alphabet();
  const RealMatrix PB1 = k_step(chain, B + 1);
  const auto &P = chain.P();
  double total = 0.0;
  for (size_t a = 0; a < k; ++a) {
    if (chain.pi()[a] <= 0.0) continue;
    // Distribution over (s_{B+1}, ..., s_{B+T+1}) given s_0 = a, enumerated
    // as a flat vector indexed by the sequence in base k.
    std::vector<double> dist(PB1[a]);
    for (size_t step = 0; step < T; ++step) {
      std::vector<double> nx(dist.size() * k, 0.0);
      for (size_t idx = 0; idx < dist.size(); ++idx) {
        if (dist[idx] <= 0.0) continue;
        const size_t last = idx % k;
        for (size_t c = 0; c < k; ++c) nx[idx * k + c] = dist[idx] * P[last][c];
      }
      dist.swap(nx);
    }
    total += chain.pi()[a] * entropy_bits(dist);
  }
  return total / double(T + 1);
}

Rational diagonal_rate_exact(const std::vector<size_t> &N, size_t B, size_t W) {
  if (N.empty()) throw std::invalid_argument("empty width list");
  const size_t K = N.size() - 1;
  const size_t top = (W >= K) ? 0 : std::min(K - W, B);
  long long num = (long long)N[0] * (long long)(W + 1);
  for (size_t k = 1; k <= top; ++k) num += (long long)N[W + k];
  return {num, (long long)(W + 1)};
}

double diagonal_rate(const std::vector<size_t> &N, size_t B, size_t W) {
  return diagonal_rate_exact(N, B, W).value();
}

void validate_distortion(const std::vector<double> &d) {
  if (d.empty()) throw std::invalid_argument("empty distortion vector");
  for (size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0 && d[i] <= 1.0)) throw std::invalid_argument("distortion outside (0,1]");
    if (i && d[i] < d[i - 1]) throw std::invalid_argument("distortion vector not nondecreasing");
  }
}

double gaussian_rate(const std::vector<double> &d, size_t B, size_t W) {
  validate_distortion(d);
  const size_t K = d.size() - 1;
  const size_t top = (W >= K) ? 0 : std::min(K - W, B);
  double s = 0.0;
  for (size_t k = 1; k <= top; ++k) s += half_log_inv(d[W + k]);
  return half_log_inv(d[0]) + s / double(W + 1);
}

BaselineRates baseline_rates(const std::vector<double> &d, size_t B, size_t W) {
  validate_distortion(d);
  BaselineRates r;
  for (size_t k = 0; k < d.size(); ++k) r.r_si += half_log_inv(d[k]);
  for (size_t k = 0; k <= std::min(B, d.size() - 1); ++k) r.r_wz += half_log_inv(d[k]);
  r.r_fec = double(B + W + 1) / double(W + 1) * half_log_inv(d[0]);
  return r;
}

}  // namespace bst
