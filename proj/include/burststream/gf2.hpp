#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "burststream/rng.hpp"

namespace bst {

using Word = uint64_t;

inline size_t words_for(size_t bits) { return (bits + 63) / 64; }

// Read `len` (<= 64) bits starting at bit `pos` of a packed word array.
inline Word load_bits(const Word *w, size_t pos, size_t len) {
  if (len == 0) return 0;
  const size_t i = pos >> 6, o = pos & 63;
  Word v = w[i] >> o;
  if (o && o + len > 64) v |= w[i + 1] << (64 - o);
  return len == 64 ? v : (v & ((Word(1) << len) - 1));
}

// XOR `len` (<= 64) low bits of `v` into the array at bit `pos`.
inline void xor_bits(Word *w, size_t pos, size_t len, Word v) {
  if (len == 0) return;
  if (len < 64) v &= (Word(1) << len) - 1;
  const size_t i = pos >> 6, o = pos & 63;
  w[i] ^= v << o;
  if (o && o + len > 64) w[i + 1] ^= v >> (64 - o);
}

// dst[dpos..dpos+len) ^= src[spos..spos+len)
inline void xor_range(Word *dst, size_t dpos, const Word *src, size_t spos, size_t len) {
  while (len >= 64) {
    xor_bits(dst, dpos, 64, load_bits(src, spos, 64));
    dpos += 64;
    spos += 64;
    len -= 64;
  }
  if (len) xor_bits(dst, dpos, len, load_bits(src, spos, len));
}

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(size_t len) : len_(len), w_(words_for(len), 0) {}

  static BitVector random(size_t len, Rng &rng);
  static BitVector from_string(const std::string &s);

  size_t size() const { return len_; }
  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i, bool v) {
    if (v) w_[i >> 6] |= Word(1) << (i & 63);
    else w_[i >> 6] &= ~(Word(1) << (i & 63));
  }
  void flip(size_t i) { w_[i >> 6] ^= Word(1) << (i & 63); }

  Word *data() { return w_.data(); }
  const Word *data() const { return w_.data(); }
  size_t num_words() const { return w_.size(); }

  Word bits(size_t pos, size_t len) const { return load_bits(w_.data(), pos, len); }
  void xor_at(size_t pos, size_t len, Word v) { xor_bits(w_.data(), pos, len, v); }

  BitVector slice(size_t pos, size_t len) const;
  void assign(size_t pos, const BitVector &src);

  BitVector &operator^=(const BitVector &o);
  bool operator==(const BitVector &o) const { return len_ == o.len_ && w_ == o.w_; }
  bool any() const;
  size_t popcount() const;
  std::string to_string() const;
  std::string to_hex() const;
  static BitVector from_hex(const std::string &s, size_t len);

 private:
  size_t len_ = 0;
  std::vector<Word> w_;
};

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), stride_(words_for(cols)), d_(rows * stride_, 0) {}

  static BitMatrix identity(size_t n);
  static BitMatrix zero(size_t r, size_t c) { return BitMatrix(r, c); }
  static BitMatrix random(size_t r, size_t c, Rng &rng);
  static BitMatrix random_full_row_rank(size_t r, size_t c, Rng &rng);
  static BitMatrix random_invertible(size_t n, Rng &rng);
  static BitMatrix from_rows(const std::vector<std::string> &rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t stride() const { return stride_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  bool get(size_t r, size_t c) const { return (d_[r * stride_ + (c >> 6)] >> (c & 63)) & 1; }
  void set(size_t r, size_t c, bool v) {
    Word &w = d_[r * stride_ + (c >> 6)];
    if (v) w |= Word(1) << (c & 63);
    else w &= ~(Word(1) << (c & 63));
  }
  void flip(size_t r, size_t c) { d_[r * stride_ + (c >> 6)] ^= Word(1) << (c & 63); }

  Word *row(size_t r) { return d_.data() + r * stride_; }
  const Word *row(size_t r) const { return d_.data() + r * stride_; }
  void xor_row(size_t dst, size_t src);
  void swap_rows(size_t a, size_t b);
  bool row_is_zero(size_t r) const;

  BitMatrix transpose() const;
  BitMatrix operator*(const BitMatrix &o) const;
  BitVector operator*(const BitVector &v) const;
  BitMatrix operator+(const BitMatrix &o) const;
  bool operator==(const BitMatrix &o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && d_ == o.d_;
  }
  bool is_zero() const;

  BitMatrix block(size_t r0, size_t c0, size_t nr, size_t nc) const;
  void set_block(size_t r0, size_t c0, const BitMatrix &b);
  BitMatrix select_rows(const std::vector<size_t> &idx) const;
  static BitMatrix hstack(const BitMatrix &a, const BitMatrix &b);
  static BitMatrix vstack(const BitMatrix &a, const BitMatrix &b);

  std::vector<std::string> to_rows() const;

 private:
  size_t rows_ = 0, cols_ = 0, stride_ = 0;
  std::vector<Word> d_;
};

struct RrefResult {
  BitMatrix matrix;
  std::vector<size_t> pivots;
};

size_t rank(const BitMatrix &m);
RrefResult rref(const BitMatrix &m);
std::optional<BitMatrix> solve(const BitMatrix &a, const BitMatrix &b);
BitMatrix invert(const BitMatrix &m);
// Rows form a basis of {x : m x = 0}.
BitMatrix nullspace(const BitMatrix &m);

struct IndependentRows {
  std::vector<size_t> perm;  // perm[k] = original row placed at position k
  BitMatrix V;               // dependent rows = V * independent rows
};
IndependentRows independent_rows(const BitMatrix &m, size_t target_rank);

// Solve A x = b requiring a unique solution. A is consumed as scratch.
// Returns nullopt when rank(A) < cols or the system is inconsistent.
std::optional<BitVector> solve_unique(BitMatrix a, const BitVector &b);

// Repeated solves of A x = b for one fixed A: stores E with E A in reduced
// form, so each solve is a single matrix-vector product.
class FixedSolver {
 public:
  FixedSolver() = default;
  explicit FixedSolver(const BitMatrix &a);
  bool unique() const { return unique_; }
  size_t rows() const { return E_.rows(); }
  size_t cols() const { return n_; }
  // nullopt when A lacks full column rank or b is inconsistent.
  std::optional<BitVector> solve(const BitVector &b) const;

 private:
  BitMatrix E_;
  size_t n_ = 0;
  bool unique_ = false;
};

// Bit-at-a-time reference elimination, kept as a test oracle for the
// word-parallel kernels.
namespace reference {
RrefResult rref(const BitMatrix &m);
size_t rank(const BitMatrix &m);
std::optional<BitVector> solve_unique(const BitMatrix &a, const BitVector &b);
}  // namespace reference

nlohmann::json to_json(const BitMatrix &m);
BitMatrix matrix_from_json(const nlohmann::json &j);

}  // namespace bst
