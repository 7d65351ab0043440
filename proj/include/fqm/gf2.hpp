#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fqm/error.hpp"
#include "fqm/rng.hpp"

// Linear algebra over GF(2). Vectors and matrix rows are bit-packed into
// 64-bit words; row operations are word-wise XOR. All unused tail bits are
// kept zero, which makes word-wise equality and popcount valid everywhere.

namespace fqm {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

inline constexpr std::size_t words_for_bits(std::size_t bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

// Mask selecting the live bits of the last word of a `bits`-wide row.
inline constexpr Word tail_mask(std::size_t bits) {
  const std::size_t rem = bits % kWordBits;
  return rem == 0 ? ~Word{0} : ((Word{1} << rem) - 1);
}

class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t size) : size_(size), words_(words_for_bits(size), 0) {}

  // Parses a string of '0'/'1'; index 0 is the leftmost character.
  static BitVec from_string(std::string_view s) {
    BitVec v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') {
        v.set(i, true);
      } else if (s[i] != '0') {
        throw ParseError("bit string: unexpected character '" + std::string(1, s[i]) + "'");
      }
    }
    return v;
  }

  static BitVec unit(std::size_t size, std::size_t index) {
    BitVec v(size);
    v.set(index, true);
    return v;
  }

  std::size_t size() const { return size_; }

  bool get(std::size_t i) const {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }

  void set(std::size_t i, bool value) {
    const Word bit = Word{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= bit;
    } else {
      words_[i / kWordBits] &= ~bit;
    }
  }

  void flip(std::size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }

  bool is_zero() const {
    for (Word w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  void xor_with(const BitVec& o) {
    check_same_size(o);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
  }

  // Inner product <*this, o> over GF(2).
  bool dot(const BitVec& o) const {
    check_same_size(o);
    Word acc = 0;
    for (std::size_t k = 0; k < words_.size(); ++k) acc ^= words_[k] & o.words_[k];
    return std::popcount(acc) & 1u;
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // Index of the lowest set bit, or size() when zero.
  std::size_t lowest_set_bit() const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k] != 0) return k * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[k]));
    }
    return size_;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if (get(i)) s[i] = '1';
    }
    return s;
  }

  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  friend bool operator==(const BitVec&, const BitVec&) = default;

 private:
  void check_same_size(const BitVec& o) const {
    if (size_ != o.size_) throw std::invalid_argument("BitVec: size mismatch");
  }

  std::size_t size_ = 0;
  std::vector<Word> words_;
};

inline BitVec operator^(BitVec a, const BitVec& b) {
  a.xor_with(b);
  return a;
}

// Uniform vector of the given width.
inline BitVec random_bits(std::size_t size, Rng& rng) {
  BitVec v(size);
  auto w = v.words();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = rng.next_u64();
  if (!w.empty()) w.back() &= tail_mask(size);
  return v;
}

// Row-major bit-packed matrix. Rows are contiguous runs of `stride()` words.
class GF2Matrix {
 public:
  GF2Matrix() = default;
  GF2Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(words_for_bits(cols)), w_(rows * stride_, 0) {}

  static GF2Matrix identity(std::size_t n) {
    GF2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  static GF2Matrix from_rows(const std::vector<BitVec>& rows, std::size_t cols) {
    GF2Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
    return m;
  }

  // Parses newline-separated rows of '0'/'1'. Empty input means a 0x0 matrix.
  static GF2Matrix from_text(std::string_view text) {
    std::vector<BitVec> rows;
    std::size_t cols = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      pos = eol + 1;
      if (line.empty()) continue;
      BitVec row = BitVec::from_string(line);
      if (!rows.empty() && row.size() != cols) {
        throw ParseError("matrix text: ragged row widths");
      }
      cols = row.size();
      rows.push_back(std::move(row));
    }
    return from_rows(rows, cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t stride() const { return stride_; }

  bool get(std::size_t r, std::size_t c) const {
    return (w_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1u;
  }

  void set(std::size_t r, std::size_t c, bool value) {
    const Word bit = Word{1} << (c % kWordBits);
    Word& w = w_[r * stride_ + c / kWordBits];
    if (value) {
      w |= bit;
    } else {
      w &= ~bit;
    }
  }

  BitVec row(std::size_t r) const {
    BitVec v(cols_);
    auto dst = v.words();
    for (std::size_t k = 0; k < stride_; ++k) dst[k] = w_[r * stride_ + k];
    return v;
  }

  void set_row(std::size_t r, const BitVec& v) {
    if (v.size() != cols_) throw std::invalid_argument("GF2Matrix: row width mismatch");
    auto src = v.words();
    for (std::size_t k = 0; k < stride_; ++k) w_[r * stride_ + k] = src[k];
  }

  bool row_is_zero(std::size_t r) const {
    for (std::size_t k = 0; k < stride_; ++k) {
      if (w_[r * stride_ + k] != 0) return false;
    }
    return true;
  }

  void xor_rows(std::size_t dst, std::size_t src) {
    for (std::size_t k = 0; k < stride_; ++k) w_[dst * stride_ + k] ^= w_[src * stride_ + k];
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t k = 0; k < stride_; ++k) std::swap(w_[a * stride_ + k], w_[b * stride_ + k]);
  }

  // y = M x (x as a column vector): y_i = <row_i, x>.
  BitVec mul_vec(const BitVec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("GF2Matrix: mul_vec width mismatch");
    BitVec y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      Word acc = 0;
      auto xs = x.words();
      for (std::size_t k = 0; k < stride_; ++k) acc ^= w_[r * stride_ + k] & xs[k];
      if (std::popcount(acc) & 1u) y.set(r, true);
    }
    return y;
  }

  // y = M^T x: the XOR of the rows selected by the set bits of x.
  BitVec mul_transposed_vec(const BitVec& x) const {
    if (x.size() != rows_) throw std::invalid_argument("GF2Matrix: mul_transposed_vec mismatch");
    BitVec y(cols_);
    auto ys = y.words();
    for (std::size_t r = 0; r < rows_; ++r) {
      if (!x.get(r)) continue;
      for (std::size_t k = 0; k < stride_; ++k) ys[k] ^= w_[r * stride_ + k];
    }
    return y;
  }

  GF2Matrix mul(const GF2Matrix& b) const {
    if (cols_ != b.rows_) throw std::invalid_argument("GF2Matrix: mul shape mismatch");
    GF2Matrix out(rows_, b.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        if (get(r, c)) {
          for (std::size_t k = 0; k < b.stride_; ++k) {
            out.w_[r * out.stride_ + k] ^= b.w_[c * b.stride_ + k];
          }
        }
      }
    }
    return out;
  }

  GF2Matrix transposed() const {
    GF2Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        if (get(r, c)) out.set(c, r, true);
      }
    }
    return out;
  }

  // Writes `other` into this matrix with its top-left corner at (r0, c0).
  void place(std::size_t r0, std::size_t c0, const GF2Matrix& other) {
    for (std::size_t r = 0; r < other.rows_; ++r) {
      for (std::size_t c = 0; c < other.cols_; ++c) {
        set(r0 + r, c0 + c, other.get(r, c));
      }
    }
  }

  std::string to_text() const {
    std::string out;
    for (std::size_t r = 0; r < rows_; ++r) {
      out += row(r).to_string();
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const GF2Matrix&, const GF2Matrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
  std::vector<Word> w_;
};

// Reduced row echelon form. Shape is preserved; zero rows sink to the bottom,
// every pivot is the only nonzero entry in its column. Idempotent, and the
// result is the canonical representative of the input's row space.
inline GF2Matrix rref(GF2Matrix m) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t pivot = r;
    while (pivot < m.rows() && !m.get(pivot, c)) ++pivot;
    if (pivot == m.rows()) continue;
    m.swap_rows(pivot, r);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i != r && m.get(i, c)) m.xor_rows(i, r);
    }
    ++r;
  }
  return m;
}

inline std::size_t rank(const GF2Matrix& m) {
  GF2Matrix r = rref(m);
  std::size_t n = 0;
  while (n < r.rows() && !r.row_is_zero(n)) ++n;
  return n;
}

// Inverse via Gauss-Jordan on [m | I]; nullopt when singular.
inline std::optional<GF2Matrix> inverse(const GF2Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = m.rows();
  GF2Matrix work(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) work.set(r, c, m.get(r, c));
    work.set(r, n + r, true);
  }
  std::size_t done = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = done;
    while (pivot < n && !work.get(pivot, c)) ++pivot;
    if (pivot == n) return std::nullopt;
    work.swap_rows(pivot, done);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != done && work.get(i, c)) work.xor_rows(i, done);
    }
    ++done;
  }
  GF2Matrix out(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) out.set(r, c, work.get(r, n + c));
  }
  return out;
}

// Rows spanning {x : m x = 0}, in canonical (RREF) form.
inline GF2Matrix nullspace_basis(const GF2Matrix& m) {
  const std::size_t n = m.cols();
  GF2Matrix r = rref(m);
  std::vector<std::size_t> pivot_col;
  std::vector<bool> is_pivot(n, false);
  for (std::size_t row = 0; row < r.rows() && !r.row_is_zero(row); ++row) {
    const std::size_t p = r.row(row).lowest_set_bit();
    pivot_col.push_back(p);
    is_pivot[p] = true;
  }
  std::vector<BitVec> out;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    BitVec v(n);
    v.set(f, true);
    for (std::size_t k = 0; k < pivot_col.size(); ++k) {
      if (r.get(k, f)) v.set(pivot_col[k], true);
    }
    out.push_back(std::move(v));
  }
  return rref(GF2Matrix::from_rows(out, n));
}

inline GF2Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<BitVec> r;
  r.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) r.push_back(random_bits(cols, rng));
  return GF2Matrix::from_rows(r, cols);
}

// Uniform over GL(n, 2) by rejection; acceptance rate is at least prod(1 - 2^-i) ~ 0.2887.
inline GF2Matrix sample_invertible(std::size_t n, Rng& rng) {
  for (;;) {
    GF2Matrix m = random_matrix(n, n, rng);
    if (rank(m) == n) return m;
  }
}

}  // namespace fqm
