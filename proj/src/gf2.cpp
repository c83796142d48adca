#include "burststream/gf2.hpp"

#include <algorithm>
#include <bit>

namespace bst {

namespace {

constexpr size_t kParallelWords = 1 << 14;

// Gauss(-Jordan) elimination over the first `pivot_cols` columns of a packed
// row-major array. Returns pivot columns; pivot k sits in row k afterwards.
std::vector<size_t> eliminate(Word *d, size_t rows, size_t stride, size_t pivot_cols,
                              bool jordan) {
  std::vector<size_t> pivots;
  size_t r = 0;
  const bool par = rows * stride >= kParallelWords;
  for (size_t c = 0; c < pivot_cols && r < rows; ++c) {
    const size_t cw = c >> 6;
    const Word mask = Word(1) << (c & 63);
    size_t p = r;
    while (p < rows && !(d[p * stride + cw] & mask)) ++p;
    if (p == rows) continue;
    if (p != r) std::swap_ranges(d + p * stride, d + (p + 1) * stride, d + r * stride);
    const Word *prow = d + r * stride;
    const long begin = jordan ? 0 : long(r + 1);
#pragma omp parallel for schedule(static) if (par)
    for (long i = begin; i < long(rows); ++i) {
      if (size_t(i) == r) continue;
      Word *row = d + size_t(i) * stride;
      if (row[cw] & mask)
        for (size_t w = cw; w < stride; ++w) row[w] ^= prow[w];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

BitVector BitVector::random(size_t len, Rng &rng) {
  BitVector v(len);
  for (auto &w : v.w_) w = rng.next();
  if (len & 63) v.w_.back() &= (Word(1) << (len & 63)) - 1;
  return v;
}

BitVector BitVector::from_string(const std::string &s) {
  BitVector v(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("bit string");
    v.set(i, s[i] == '1');
  }
  return v;
}

BitVector BitVector::slice(size_t pos, size_t len) const {
  BitVector out(len);
  xor_range(out.data(), 0, data(), pos, len);
  return out;
}

void BitVector::assign(size_t pos, const BitVector &src) {
  for (size_t i = 0; i < src.size(); ++i) set(pos + i, src.get(i));
}

BitVector &BitVector::operator^=(const BitVector &o) {
  if (o.len_ != len_) throw std::invalid_argument("length mismatch");
  for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
  return *this;
}

bool BitVector::any() const {
  for (Word w : w_)
    if (w) return true;
  return false;
}

size_t BitVector::popcount() const {
  size_t n = 0;
  for (Word w : w_) n += std::popcount(w);
  return n;
}

std::string BitVector::to_string() const {
  std::string s(len_, '0');
  for (size_t i = 0; i < len_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

std::string BitVector::to_hex() const {
  static const char *hx = "0123456789abcdef";
  std::string s;
  for (size_t i = 0; i < len_; i += 4) s.push_back(hx[bits(i, std::min<size_t>(4, len_ - i))]);
  return s;
}

BitVector BitVector::from_hex(const std::string &s, size_t len) {
  BitVector v(len);
  for (size_t k = 0; k < s.size() && 4 * k < len; ++k) {
    const char c = s[k];
    Word x = (c >= 'a') ? Word(c - 'a' + 10) : (c >= 'A') ? Word(c - 'A' + 10) : Word(c - '0');
    v.xor_at(4 * k, std::min<size_t>(4, len - 4 * k), x);
  }
  return v;
}

BitMatrix BitMatrix::identity(size_t n) {
  BitMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::random(size_t r, size_t c, Rng &rng) {
  BitMatrix m(r, c);
  const Word tail = (c & 63) ? (Word(1) << (c & 63)) - 1 : ~Word(0);
  for (size_t i = 0; i < r; ++i) {
    Word *row = m.row(i);
    for (size_t w = 0; w < m.stride_; ++w) row[w] = rng.next();
    if (m.stride_) row[m.stride_ - 1] &= tail;
  }
  return m;
}

BitMatrix BitMatrix::random_full_row_rank(size_t r, size_t c, Rng &rng) {
  if (r > c) throw std::invalid_argument("full row rank needs rows <= cols");
  for (;;) {
    BitMatrix m = random(r, c, rng);
    if (rank(m) == r) return m;
  }
}

BitMatrix BitMatrix::random_invertible(size_t n, Rng &rng) { return random_full_row_rank(n, n, rng); }

BitMatrix BitMatrix::from_rows(const std::vector<std::string> &rows) {
  const size_t c = rows.empty() ? 0 : rows[0].size();
  BitMatrix m(rows.size(), c);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != c) throw std::invalid_argument("ragged matrix rows");
    for (size_t j = 0; j < c; ++j) {
      if (rows[i][j] != '0' && rows[i][j] != '1') throw std::invalid_argument("bit string");
      m.set(i, j, rows[i][j] == '1');
    }
  }
  return m;
}

void BitMatrix::xor_row(size_t dst, size_t src) {
  Word *a = row(dst);
  const Word *b = row(src);
  for (size_t w = 0; w < stride_; ++w) a[w] ^= b[w];
}

void BitMatrix::swap_rows(size_t a, size_t b) {
  if (a != b) std::swap_ranges(row(a), row(a) + stride_, row(b));
}

bool BitMatrix::row_is_zero(size_t r) const {
  const Word *a = row(r);
  for (size_t w = 0; w < stride_; ++w)
    if (a[w]) return false;
  return true;
}

bool BitMatrix::is_zero() const {
  for (Word w : d_)
    if (w) return false;
  return true;
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j)
      if (get(i, j)) t.set(j, i, true);
  return t;
}

BitMatrix BitMatrix::operator*(const BitMatrix &o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
  BitMatrix p(rows_, o.cols_);
  for (size_t i = 0; i < rows_; ++i) {
    Word *dst = p.row(i);
    for (size_t k = 0; k < cols_; ++k) {
      if (!get(i, k)) continue;
      const Word *src = o.row(k);
      for (size_t w = 0; w < p.stride_; ++w) dst[w] ^= src[w];
    }
  }
  return p;
}

BitVector BitMatrix::operator*(const BitVector &v) const {
  if (cols_ != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
  BitVector out(rows_);
  for (size_t i = 0; i < rows_; ++i) {
    const Word *a = row(i);
    Word acc = 0;
    for (size_t w = 0; w < stride_; ++w) acc ^= a[w] & v.data()[w];
    if (std::popcount(acc) & 1) out.set(i, true);
  }
  return out;
}

BitMatrix BitMatrix::operator+(const BitMatrix &o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum shape mismatch");
  BitMatrix s = *this;
  for (size_t i = 0; i < d_.size(); ++i) s.d_[i] ^= o.d_[i];
  return s;
}

BitMatrix BitMatrix::block(size_t r0, size_t c0, size_t nr, size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("block");
  BitMatrix b(nr, nc);
  for (size_t i = 0; i < nr; ++i) xor_range(b.row(i), 0, row(r0 + i), c0, nc);
  return b;
}

void BitMatrix::set_block(size_t r0, size_t c0, const BitMatrix &b) {
  if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw std::out_of_range("set_block");
  for (size_t i = 0; i < b.rows_; ++i)
    for (size_t j = 0; j < b.cols_; ++j) set(r0 + i, c0 + j, b.get(i, j));
}

BitMatrix BitMatrix::select_rows(const std::vector<size_t> &idx) const {
  BitMatrix s(idx.size(), cols_);
  for (size_t k = 0; k < idx.size(); ++k) std::copy(row(idx[k]), row(idx[k]) + stride_, s.row(k));
  return s;
}

BitMatrix BitMatrix::hstack(const BitMatrix &a, const BitMatrix &b) {
  if (a.rows_ != b.rows_) throw std::invalid_argument("hstack rows mismatch");
  BitMatrix m(a.rows_, a.cols_ + b.cols_);
  for (size_t i = 0; i < a.rows_; ++i) {
    xor_range(m.row(i), 0, a.row(i), 0, a.cols_);
    xor_range(m.row(i), a.cols_, b.row(i), 0, b.cols_);
  }
  return m;
}

BitMatrix BitMatrix::vstack(const BitMatrix &a, const BitMatrix &b) {
  if (a.cols_ != b.cols_) throw std::invalid_argument("vstack cols mismatch");
  BitMatrix m(a.rows_ + b.rows_, a.cols_);
  std::copy(a.d_.begin(), a.d_.end(), m.d_.begin());
  std::copy(b.d_.begin(), b.d_.end(), m.d_.begin() + a.d_.size());
  return m;
}

std::vector<std::string> BitMatrix::to_rows() const {
  std::vector<std::string> out(rows_, std::string(cols_, '0'));
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j)
      if (get(i, j)) out[i][j] = '1';
  return out;
}

size_t rank(const BitMatrix &m) {
  BitMatrix t = m;
  return eliminate(t.row(0), t.rows(), t.stride(), t.cols(), false).size();
}

RrefResult rref(const BitMatrix &m) {
  BitMatrix t = m;
  auto piv = eliminate(t.row(0), t.rows(), t.stride(), t.cols(), true);
  return {std::move(t), std::move(piv)};
}

BitMatrix nullspace(const BitMatrix &m) {
  const RrefResult r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (size_t p : r.pivots) is_pivot[p] = true;
  std::vector<size_t> free;
  for (size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free.push_back(c);
  BitMatrix basis(free.size(), m.cols());
  for (size_t k = 0; k < free.size(); ++k) {
    basis.set(k, free[k], true);
    for (size_t i = 0; i < r.pivots.size(); ++i)
      if (r.matrix.get(i, free[k])) basis.set(k, r.pivots[i], true);
  }
  return basis;
}

std::optional<BitMatrix> solve(const BitMatrix &a, const BitMatrix &b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve: row mismatch");
  BitMatrix aug = BitMatrix::hstack(a, b);
  auto piv = eliminate(aug.row(0), aug.rows(), aug.stride(), a.cols(), true);
  for (size_t r = piv.size(); r < aug.rows(); ++r)
    for (size_t j = 0; j < b.cols(); ++j)
      if (aug.get(r, a.cols() + j)) return std::nullopt;
  BitMatrix x(a.cols(), b.cols());
  for (size_t r = 0; r < piv.size(); ++r) xor_range(x.row(piv[r]), 0, aug.row(r), a.cols(), b.cols());
  return x;
}

BitMatrix invert(const BitMatrix &m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("singular");
  const size_t n = m.rows();
  BitMatrix aug = BitMatrix::hstack(m, BitMatrix::identity(n));
  auto piv = eliminate(aug.row(0), n, aug.stride(), n, true);
  if (piv.size() != n) throw std::domain_error("singular");
  return aug.block(0, n, n, n);
}

IndependentRows independent_rows(const BitMatrix &m, size_t target_rank) {
  if (rank(m) != target_rank) throw std::invalid_argument("independent_rows: rank mismatch");
  // Incremental echelon basis over chosen rows, keyed by leading column.
  std::vector<size_t> ind, dep;
  BitMatrix basis(target_rank, m.cols());
  std::vector<size_t> lead;
  for (size_t i = 0; i < m.rows(); ++i) {
    std::vector<Word> v(m.row(i), m.row(i) + m.stride());
    for (size_t k = 0; k < lead.size(); ++k)
      if ((v[lead[k] >> 6] >> (lead[k] & 63)) & 1)
        for (size_t w = 0; w < m.stride(); ++w) v[w] ^= basis.row(k)[w];
    size_t c = 0;
    while (c < m.cols() && !((v[c >> 6] >> (c & 63)) & 1)) ++c;
    if (c == m.cols()) {
      dep.push_back(i);
      continue;
    }
    std::copy(v.begin(), v.end(), basis.row(lead.size()));
    lead.push_back(c);
    ind.push_back(i);
  }
  IndependentRows out;
  out.perm = ind;
  out.perm.insert(out.perm.end(), dep.begin(), dep.end());
  if (dep.empty()) {
    out.V = BitMatrix(0, target_rank);
    return out;
  }
  const BitMatrix I = m.select_rows(ind), D = m.select_rows(dep);
  auto x = solve(I.transpose(), D.transpose());
  if (!x) throw std::logic_error("independent_rows: dependent row outside span");
  out.V = x->transpose();
  return out;
}

std::optional<BitVector> solve_unique(BitMatrix a, const BitVector &b) {
  const size_t n = a.cols(), rows = a.rows();
  if (b.size() != rows) throw std::invalid_argument("solve_unique: row mismatch");
  if (rows < n) return std::nullopt;
  const size_t stride = words_for(n + 1);
  std::vector<Word> aug(rows * stride, 0);
  for (size_t i = 0; i < rows; ++i) {
    std::copy(a.row(i), a.row(i) + a.stride(), aug.data() + i * stride);
    if (b.get(i)) aug[i * stride + (n >> 6)] |= Word(1) << (n & 63);
  }
  auto piv = eliminate(aug.data(), rows, stride, n, false);
  if (piv.size() < n) return std::nullopt;
  for (size_t r = n; r < rows; ++r)
    if ((aug[r * stride + (n >> 6)] >> (n & 63)) & 1) return std::nullopt;
  BitVector x(n);
  for (size_t r = n; r-- > 0;) {
    const Word *row = aug.data() + r * stride;
    Word acc = 0;
    const size_t w0 = (r + 1) >> 6;
    for (size_t w = w0; w < x.num_words(); ++w) {
      Word m = row[w];
      if (w == w0) m &= ~Word(0) << ((r + 1) & 63);
      acc ^= m & x.data()[w];
    }
    const bool rhs = (row[n >> 6] >> (n & 63)) & 1;
    x.set(r, rhs ^ bool(std::popcount(acc) & 1));
  }
  return x;
}

FixedSolver::FixedSolver(const BitMatrix &a) : E_(a.rows(), a.rows()), n_(a.cols()) {
  const size_t rows = a.rows(), n = a.cols();
  if (rows < n) return;
  const size_t stride = words_for(n + rows);
  std::vector<Word> aug(rows * stride, 0);
  for (size_t i = 0; i < rows; ++i) {
    Word *r = aug.data() + i * stride;
    std::copy(a.row(i), a.row(i) + a.stride(), r);
    r[(n + i) >> 6] |= Word(1) << ((n + i) & 63);
  }
  const auto piv = eliminate(aug.data(), rows, stride, n, true);
  unique_ = piv.size() == n;
  if (!unique_) return;
  for (size_t i = 0; i < rows; ++i) xor_range(E_.row(i), 0, aug.data() + i * stride, n, rows);
}

std::optional<BitVector> FixedSolver::solve(const BitVector &b) const {
  if (b.size() != E_.rows()) throw std::invalid_argument("FixedSolver: rhs length");
  if (!unique_) return std::nullopt;
  const BitVector y = E_ * b;
  for (size_t r = n_; r < y.size(); ++r)
    if (y.get(r)) return std::nullopt;
  return y.slice(0, n_);
}

namespace reference {

RrefResult rref(const BitMatrix &m) {
  BitMatrix t = m;
  std::vector<size_t> piv;
  size_t r = 0;
  for (size_t c = 0; c < t.cols() && r < t.rows(); ++c) {
    size_t p = r;
    while (p < t.rows() && !t.get(p, c)) ++p;
    if (p == t.rows()) continue;
    for (size_t j = 0; j < t.cols(); ++j) {
      const bool a = t.get(r, j), b = t.get(p, j);
      t.set(r, j, b);
      t.set(p, j, a);
    }
    for (size_t i = 0; i < t.rows(); ++i)
      if (i != r && t.get(i, c))
        for (size_t j = 0; j < t.cols(); ++j) t.set(i, j, t.get(i, j) ^ t.get(r, j));
    piv.push_back(c);
    ++r;
  }
  return {std::move(t), std::move(piv)};
}

size_t rank(const BitMatrix &m) { return reference::rref(m).pivots.size(); }

std::optional<BitVector> solve_unique(const BitMatrix &a, const BitVector &b) {
  BitMatrix aug(a.rows(), a.cols() + 1);
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < a.cols(); ++j) aug.set(i, j, a.get(i, j));
    aug.set(i, a.cols(), b.get(i));
  }
  auto rr = reference::rref(aug);
  if (rr.pivots.size() != a.cols() ||
      (!rr.pivots.empty() && rr.pivots.back() == a.cols()))
    return std::nullopt;
  for (size_t r = a.cols(); r < a.rows(); ++r)
    if (rr.matrix.get(r, a.cols())) return std::nullopt;
  BitVector x(a.cols());
  for (size_t r = 0; r < a.cols(); ++r) x.set(r, rr.matrix.get(r, a.cols()));
  return x;
}

}  // namespace reference

nlohmann::json to_json(const BitMatrix &m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.to_rows()}};
}

BitMatrix matrix_from_json(const nlohmann::json &j) {
  const size_t r = j.at("rows").get<size_t>(), c = j.at("cols").get<size_t>();
  auto rows = j.at("data").get<std::vector<std::string>>();
  if (rows.size() != r) throw std::invalid_argument("matrix json: row count");
  if (r == 0) return BitMatrix(0, c);
  BitMatrix m = BitMatrix::from_rows(rows);
  if (m.cols() != c) throw std::invalid_argument("matrix json: col count");
  return m;
}

}  // namespace bst
