#include "burststream/transforms.hpp"

#include <numeric>
#include <stdexcept>

namespace bst {

namespace {

// F' = T_d F T^{-1} for T block upper triangular over the full state.
BitMatrix conjugate(const BitMatrix &F, const BitMatrix &T, size_t n0) {
  const size_t n = T.rows();
  const BitMatrix Td = T.block(n0, n0, n - n0, n - n0);
  return Td * F * invert(T);
}

void finalize(TransformMap &m) { m.Minv = invert(m.M); }

BitMatrix block_diag(const BitMatrix &a, const BitMatrix &b) {
  BitMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), a.cols(), b);
  return m;
}

}  // namespace

size_t UpperTriSpec::width() const { return std::accumulate(N.begin(), N.end(), size_t(0)); }

size_t UpperTriSpec::offset(size_t j) const {
  return std::accumulate(N.begin(), N.begin() + long(j), size_t(0));
}

BitMatrix UpperTriSpec::block(size_t j, size_t k) const {
  if (j == 0) throw std::invalid_argument("block row 0 is the innovation");
  return F.block(offset(j) - N[0], offset(k), N[j], N[k]);
}

void UpperTriSpec::validate() const {
  if (F.rows() != width() - N[0] || F.cols() != width()) throw std::invalid_argument("upper-tri F shape");
  for (size_t j = 1; j <= K(); ++j) {
    for (size_t k = 0; k + 1 < j; ++k)
      if (!block(j, k).is_zero()) throw std::invalid_argument("upper-tri: nonzero strictly-lower block");
    const BitMatrix sub = block(j, j - 1);
    const size_t r = rank(sub);
    if (j < K() && r != N[j]) throw std::invalid_argument("upper-tri: sub-diagonal block not full row rank");
    if (j == K() && r != N[j] && r != 0) throw std::invalid_argument("upper-tri: last sub-diagonal block");
    if (j < K() && N[j] > N[j - 1]) throw std::invalid_argument("upper-tri: widths increase");
  }
}

bool UpperTriSpec::is_block_diagonal() const {
  for (size_t j = 1; j <= K(); ++j)
    for (size_t k = 0; k <= K(); ++k)
      if (k + 1 != j && !block(j, k).is_zero()) return false;
  return true;
}

nlohmann::json UpperTriSpec::to_json() const { return {{"N", N}, {"F", bst::to_json(F)}}; }

UpperTriSpec as_upper_tri(const SemiDetSpec &spec) {
  if (spec.Nd == 0) return {{spec.N0}, BitMatrix(0, spec.N0)};
  return {{spec.N0, spec.Nd}, spec.F()};
}

UpperTriSpec as_upper_tri(const DiagonalSourceSpec &spec) {
  UpperTriSpec t{spec.N, BitMatrix(spec.width() - spec.N[0], spec.width())};
  for (size_t j = 1; j <= spec.K(); ++j) t.F.set_block(t.offset(j) - spec.N[0], t.offset(j - 1), spec.R[j - 1]);
  return t;
}

nlohmann::json TransformMap::to_json() const {
  nlohmann::json j{{"M", bst::to_json(M)}, {"out_width", out_width}, {"memoryless", memoryless()}};
  if (!memoryless()) {
    j["dropped"] = {{"width", dropped()}, {"R_KK", bst::to_json(Rz)}, {"G", bst::to_json(G)},
                    {"H", bst::to_json(H)}, {"T_main", bst::to_json(Tmain)}};
  }
  j["steps"] = nlohmann::json::array();
  for (const auto &s : steps) j["steps"].push_back(bst::to_json(s));
  return j;
}

TransformMap identity_map(size_t width, size_t n0) {
  TransformMap m;
  m.M = BitMatrix::identity(width);
  m.out_width = width;
  m.n0 = n0;
  m.Tmain = m.M;
  finalize(m);
  return m;
}

TransformMap compose(const TransformMap &second, const TransformMap &first) {
  if (!first.memoryless()) throw std::invalid_argument("compose: first map must be memoryless");
  TransformMap m = second;
  m.M = second.M * first.M;
  m.steps = first.steps;
  m.steps.insert(m.steps.end(), second.steps.begin(), second.steps.end());
  finalize(m);
  return m;
}

Case1Result case1_transform(const SemiDetSpec &spec) {
  spec.validate();
  if (rank(spec.A) != spec.Nd) throw std::domain_error("A not full row rank: use lf/lb pipeline");
  auto X = solve(spec.A, spec.B);
  if (!X) throw std::logic_error("case1: A X = B inconsistent");
  const size_t n = spec.width();
  TransformMap m;
  m.M = BitMatrix::identity(n);
  m.M.set_block(0, spec.N0, *X);
  m.out_width = n;
  m.n0 = spec.N0;
  m.Tmain = BitMatrix::identity(n);
  m.steps.push_back(m.M);
  finalize(m);
  DiagonalSourceSpec d{{spec.N0, spec.Nd}, {spec.A}};
  if (spec.Nd == 0) d = DiagonalSourceSpec{{spec.N0}, {}};
  return {m, d, *X};
}

LfResult lf_transform(const SemiDetSpec &spec) {
  spec.validate();
  const size_t n = spec.width(), n0 = spec.N0;
  BitMatrix F = spec.F();
  BitMatrix total = BitMatrix::identity(n);
  std::vector<BitMatrix> steps;
  std::vector<size_t> N{n0};
  size_t prev_start = 0, prev_width = n0, res_start = n0, res_width = spec.Nd;
  for (size_t iter = 0;; ++iter) {
    if (iter > spec.Nd) throw std::logic_error("lf iteration cap exceeded");
    if (res_width == 0) break;
    const BitMatrix C = F.block(res_start - n0, prev_start, res_width, prev_width);
    const size_t rk = rank(C);
    if (rk == 0 || rk == res_width) {
      N.push_back(res_width);
      break;
    }
    const IndependentRows ir = independent_rows(C, rk);
    BitMatrix P(res_width, res_width);
    for (size_t k = 0; k < res_width; ++k) P.set(k, ir.perm[k], true);
    BitMatrix E = BitMatrix::identity(res_width);
    E.set_block(rk, 0, ir.V);
    BitMatrix T = BitMatrix::identity(n);
    T.set_block(res_start, res_start, E * P);
    F = conjugate(F, T, n0);
    total = T * total;
    steps.push_back(T);
    N.push_back(rk);
    prev_start = res_start;
    prev_width = rk;
    res_start += rk;
    res_width -= rk;
  }
  UpperTriSpec tri{N, F};
  tri.validate();
  TransformMap m;
  m.M = total;
  m.out_width = n;
  m.n0 = n0;
  m.Tmain = BitMatrix::identity(n);
  m.steps = steps;
  finalize(m);
  return {m, tri};
}

LbResult lb_transform(const UpperTriSpec &tri_in) {
  tri_in.validate();
  UpperTriSpec tri = tri_in;
  const size_t n = tri.width(), n0 = tri.N[0];
  TransformMap m;
  m.n0 = n0;
  size_t nz = 0;
  BitMatrix G = tri.F, H, Rz;
  if (tri.K() >= 1 && tri.block(tri.K(), tri.K() - 1).is_zero()) {
    // Step 0: the last block evolves autonomously; drop it and keep the
    // offset it induces on the remaining blocks.
    const size_t K = tri.K();
    nz = tri.N[K];
    const size_t top = n - nz;
    Rz = tri.block(K, K);
    H = tri.F.block(0, top, top - n0, nz);
    G = tri.F.block(0, 0, top - n0, top);
    tri.N.pop_back();
    tri.F = G;
  }
  const size_t top = n - nz;
  BitMatrix Tmain = BitMatrix::identity(top);
  for (size_t l = tri.K(); l-- > 0;) {
    const size_t tail_start = tri.offset(l + 1), tail_width = top - tail_start;
    if (tail_width == 0) continue;
    const BitMatrix R = tri.block(l + 1, l);
    const BitMatrix rhs = tri.F.block(tri.offset(l + 1) - n0, tail_start, tri.N[l + 1], tail_width);
    auto X = solve(R, rhs);
    if (!X) throw std::logic_error("lb: sub-diagonal system inconsistent");
    BitMatrix T = BitMatrix::identity(top);
    T.set_block(tri.offset(l), tail_start, *X);
    tri.F = conjugate(tri.F, T, n0);
    Tmain = T * Tmain;
    m.steps.push_back(T);
  }
  if (!tri.is_block_diagonal()) throw std::logic_error("lb: result not block diagonal");
  DiagonalSourceSpec d;
  d.N = tri.N;
  for (size_t j = 1; j <= tri.K(); ++j) d.R.push_back(tri.block(j, j - 1));
  d.validate();
  m.out_width = top;
  m.Tmain = Tmain;
  m.M = nz ? block_diag(Tmain, BitMatrix::identity(nz)) : Tmain;
  if (nz) {
    m.G = G.block(0, 0, top - n0, top);
    m.H = H;
    m.Rz = Rz;
  }
  finalize(m);
  return {m, d};
}

PipelineResult semidet_to_diagonal(const SemiDetSpec &spec) {
  LfResult lf = lf_transform(spec);
  LbResult lb = lb_transform(lf.tri);
  return {compose(lb.map, lf.map), lf.tri, lb.spec};
}

void offset_sequence(const TransformMap &map, const BitVector &z_init, size_t T, std::vector<BitVector> &offsets,
                     std::vector<BitVector> &zs) {
  const size_t top = map.out_width;
  offsets.assign(T + 1, BitVector(top));
  zs.assign(T + 1, BitVector(map.dropped()));
  zs[0] = z_init;
  if (map.memoryless()) return;
  BitVector e(top);
  for (size_t t = 1; t <= T; ++t) {
    BitVector d = map.G * e;
    d ^= map.H * zs[t - 1];
    BitVector ne(top);
    ne.assign(map.n0, d);
    e = ne;
    offsets[t] = map.Tmain * e;
    zs[t] = map.Rz * zs[t - 1];
  }
}

BitVector map_symbol(const TransformMap &map, const BitVector &x, const BitVector &offset) {
  BitVector y = (map.M * x).slice(0, map.out_width);
  y ^= offset;
  return y;
}

BitVector unmap_symbol(const TransformMap &map, const BitVector &y, const BitVector &offset, const BitVector &z) {
  BitVector full(map.width());
  BitVector top = y;
  top ^= offset;
  full.assign(0, top);
  full.assign(map.out_width, z);
  return map.Minv * full;
}

MappedTrace apply_map(const TransformMap &map, const StreamTrace &tr) {
  if (tr.width != map.width()) throw std::invalid_argument("apply_map: width mismatch");
  if (tr.t_min > -1) throw std::invalid_argument("apply_map: trace lacks time -1");
  MappedTrace out;
  out.trace = StreamTrace{tr.T, tr.n, map.out_width, -1, tr.seed, {}};
  std::vector<std::vector<BitVector>> offs(tr.n);
  for (size_t c = 0; c < tr.n; ++c) {
    const BitVector full = map.M * tr.copy(-1, c);
    out.z_init.push_back(full.slice(map.out_width, map.dropped()));
    std::vector<BitVector> zs;
    offset_sequence(map, out.z_init.back(), tr.T, offs[c], zs);
  }
  for (long t = -1; t < long(tr.T); ++t) {
    BitVector s(tr.n * map.out_width);
    for (size_t c = 0; c < tr.n; ++c) {
      const BitVector y = map_symbol(map, tr.copy(t, c), offs[c][size_t(t + 1)]);
      xor_range(s.data(), c * map.out_width, y.data(), 0, map.out_width);
    }
    out.trace.sym.push_back(std::move(s));
  }
  return out;
}

StreamTrace invert_map(const TransformMap &map, const MappedTrace &mt) {
  const StreamTrace &tr = mt.trace;
  if (tr.width != map.out_width) throw std::invalid_argument("invert_map: width mismatch");
  StreamTrace out{tr.T, tr.n, map.width(), -1, tr.seed, {}};
  std::vector<std::vector<BitVector>> offs(tr.n), zs(tr.n);
  for (size_t c = 0; c < tr.n; ++c) offset_sequence(map, mt.z_init[c], tr.T, offs[c], zs[c]);
  for (long t = -1; t < long(tr.T); ++t) {
    BitVector s(tr.n * map.width());
    for (size_t c = 0; c < tr.n; ++c) {
      const size_t k = size_t(t + 1);
      const BitVector x = unmap_symbol(map, tr.copy(t, c), offs[c][k], zs[c][k]);
      xor_range(s.data(), c * map.width(), x.data(), 0, map.width());
    }
    out.sym.push_back(std::move(s));
  }
  return out;
}

}  // namespace bst
