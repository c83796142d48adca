#include "burststream/markov.hpp"

#include <cmath>
#include <stdexcept>

namespace bst {

namespace {

constexpr double kRowTol = 1e-12;

std::vector<double> stationary_power(const RealMatrix &P) {
  const size_t k = P.size();
  std::vector<double> pi(k, 1.0 / double(k)), nx(k);
  // Lazy chain (I+P)/2 shares pi and is aperiodic.
  for (int it = 0; it < 200000; ++it) {
    std::fill(nx.begin(), nx.end(), 0.0);
    for (size_t a = 0; a < k; ++a)
      for (size_t b = 0; b < k; ++b) nx[b] += pi[a] * P[a][b];
    double res = 0.0, s = 0.0;
    for (size_t b = 0; b < k; ++b) {
      nx[b] = 0.5 * (nx[b] + pi[b]);
      s += nx[b];
    }
    for (size_t b = 0; b < k; ++b) {
      nx[b] /= s;
      res = std::max(res, std::fabs(nx[b] - pi[b]));
    }
    pi.swap(nx);
    if (res < 1e-15) break;
  }
  return pi;
}

double residual(const RealMatrix &P, const std::vector<double> &pi) {
  double r = 0.0;
  for (size_t b = 0; b < P.size(); ++b) {
    double v = 0.0;
    for (size_t a = 0; a < P.size(); ++a) v += pi[a] * P[a][b];
    r = std::max(r, std::fabs(v - pi[b]));
  }
  return r;
}

}  // namespace

std::vector<double> stationary_direct(const RealMatrix &P) {
  const size_t k = P.size();
  // Rows: (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  RealMatrix A(k, std::vector<double>(k + 1, 0.0));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
  for (size_t j = 0; j < k; ++j) A[k - 1][j] = 1.0;
  A[k - 1][k] = 1.0;
  for (size_t c = 0; c < k; ++c) {
    size_t p = c;
    for (size_t r = c + 1; r < k; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[p][c])) p = r;
    if (std::fabs(A[p][c]) < 1e-300) throw std::domain_error("stationary distribution not unique");
    std::swap(A[p], A[c]);
    for (size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (size_t j = c; j <= k; ++j) A[r][j] -= f * A[c][j];
    }
  }
  std::vector<double> pi(k);
  for (size_t i = 0; i < k; ++i) pi[i] = A[i][k] / A[i][i];
  return pi;
}

FiniteMarkovChain::FiniteMarkovChain(RealMatrix P) : P_(std::move(P)) {
  if (P_.empty()) throw std::invalid_argument("empty chain");
  for (const auto &row : P_) {
    if (row.size() != P_.size()) throw std::invalid_argument("transition matrix not square");
    double s = 0.0;
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("transition probability out of range");
      s += v;
    }
    if (std::fabs(s - 1.0) > kRowTol) throw std::invalid_argument("transition row does not sum to 1");
  }
  pi_ = stationary_power(P_);
  if (residual(P_, pi_) > 1e-13) pi_ = stationary_direct(P_);
  if (residual(P_, pi_) > 1e-12) throw std::domain_error("stationary distribution did not converge");
}

FiniteMarkovChain FiniteMarkovChain::binary_symmetric(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("flip probability out of range");
  return FiniteMarkovChain({{1.0 - eps, eps}, {eps, 1.0 - eps}});
}

FiniteMarkovChain FiniteMarkovChain::from_json(const nlohmann::json &j) {
  auto P = j.at("P").get<RealMatrix>();
  if (j.contains("alphabet") && j.at("alphabet").get<size_t>() != P.size())
    throw std::invalid_argument("alphabet does not match P");
  return FiniteMarkovChain(std::move(P));
}

double entropy_bits(const std::vector<double> &p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double binary_entropy(double p) { return entropy_bits({p, 1.0 - p}); }

RealMatrix mat_mul(const RealMatrix &a, const RealMatrix &b) {
  const size_t n = a.size(), m = b[0].size(), k = b.size();
  RealMatrix c(n, std::vector<double>(m, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l)
      for (size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
  return c;
}

RealMatrix k_step(const FiniteMarkovChain &chain, size_t k) {
  const size_t n = chain.alphabet();
  RealMatrix r(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) r[i][i] = 1.0;
  RealMatrix base = chain.P();
  while (k) {
    if (k & 1) r = mat_mul(r, base);
    k >>= 1;
    if (k) base = mat_mul(base, base);
  }
  return r;
}

double cond_entropy_gap(const FiniteMarkovChain &chain, size_t k) {
  const RealMatrix Pk = k_step(chain, k);
  double h = 0.0;
  for (size_t a = 0; a < chain.alphabet(); ++a) h += chain.pi()[a] * entropy_bits(Pk[a]);
  return h;
}

double cond_mutual_info(const FiniteMarkovChain &chain, size_t B, size_t gap) {
  const size_t n = chain.alphabet();
  const RealMatrix PB = k_step(chain, B), PG = k_step(chain, gap);
  const auto &pi = chain.pi();
  double I = 0.0;
  for (size_t a = 0; a < n; ++a) {
    if (pi[a] <= 0.0) continue;
    std::vector<double> pac(n, 0.0);
    for (size_t b = 0; b < n; ++b)
      for (size_t c = 0; c < n; ++c) pac[c] += PB[a][b] * PG[b][c];
    for (size_t b = 0; b < n; ++b)
      for (size_t c = 0; c < n; ++c) {
        const double pbc = PB[a][b] * PG[b][c];  // p(b,c | a)
        if (pbc <= 0.0) continue;
        I += pi[a] * pbc * std::log2(pbc / (PB[a][b] * pac[c]));
      }
  }
  return I < 0.0 ? 0.0 : I;
}

double block_cond_entropy(const FiniteMarkovChain &chain, size_t B, size_t W) {
  return cond_entropy_gap(chain, B + 1) + double(W) * cond_entropy_gap(chain, 1);
}

bool is_symmetric(const FiniteMarkovChain &chain) {
  const auto &P = chain.P();
  const auto &pi = chain.pi();
  for (size_t a = 0; a < P.size(); ++a)
    for (size_t b = 0; b < P.size(); ++b)
      if (std::fabs(pi[a] * P[a][b] - pi[b] * P[b][a]) > 1e-12) return false;
  return true;
}

}  // namespace bst
