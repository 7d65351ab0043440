#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fqm/gf2.hpp"

// Subspaces of Z_2^n with a canonical basis (RREF, zero rows dropped).
// Canonical form makes equality a word-wise comparison and coset
// representatives unique.

namespace fqm {

class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(std::size_t ambient_dim) {
    return Subspace(ambient_dim, GF2Matrix(0, ambient_dim));
  }

  static Subspace full(std::size_t ambient_dim) {
    return Subspace(ambient_dim, GF2Matrix::identity(ambient_dim));
  }

  // Row space of `rows`; canonicalized.
  static Subspace from_basis(const GF2Matrix& rows) {
    GF2Matrix r = rref(rows);
    std::size_t d = 0;
    while (d < r.rows() && !r.row_is_zero(d)) ++d;
    GF2Matrix basis(d, r.cols());
    for (std::size_t i = 0; i < d; ++i) basis.set_row(i, r.row(i));
    return Subspace(r.cols(), std::move(basis));
  }

  static Subspace span_of(std::size_t ambient_dim, const std::vector<BitVec>& vectors) {
    return from_basis(GF2Matrix::from_rows(vectors, ambient_dim));
  }

  static Subspace from_text(std::size_t ambient_dim, std::string_view text) {
    GF2Matrix m = GF2Matrix::from_text(text);
    if (m.rows() == 0) return zero(ambient_dim);
    if (m.cols() != ambient_dim) throw ParseError("subspace text: ambient dimension mismatch");
    return from_basis(m);
  }

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.rows(); }
  const GF2Matrix& basis() const { return basis_; }
  BitVec basis_row(std::size_t i) const { return basis_.row(i); }

  // Canonical representative of x + S: x with every pivot coordinate cleared.
  BitVec reduce(BitVec x) const {
    if (x.size() != ambient_) throw std::invalid_argument("Subspace: ambient mismatch");
    for (std::size_t r = 0; r < basis_.rows(); ++r) {
      const BitVec row = basis_.row(r);
      if (x.get(row.lowest_set_bit())) x.xor_with(row);
    }
    return x;
  }

  bool contains(const BitVec& x) const { return reduce(x).is_zero(); }

  std::string to_text() const { return basis_.to_text(); }

  friend bool operator==(const Subspace&, const Subspace&) = default;

 private:
  Subspace(std::size_t ambient, GF2Matrix basis) : ambient_(ambient), basis_(std::move(basis)) {}

  std::size_t ambient_ = 0;
  GF2Matrix basis_;  // RREF, exactly dim() rows
};

// Orthogonal complement under the standard inner product: the nullspace of
// the basis matrix. Note GF(2) admits self-orthogonal vectors, so s and
// complement(s) may intersect nontrivially.
inline Subspace complement(const Subspace& s) {
  if (s.dim() == 0) return Subspace::full(s.ambient_dim());
  return Subspace::from_basis(nullspace_basis(s.basis()));
}

inline Subspace sum(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("sum: ambient mismatch");
  GF2Matrix stacked(a.dim() + b.dim(), a.ambient_dim());
  for (std::size_t r = 0; r < a.dim(); ++r) stacked.set_row(r, a.basis_row(r));
  for (std::size_t r = 0; r < b.dim(); ++r) stacked.set_row(a.dim() + r, b.basis_row(r));
  return Subspace::from_basis(stacked);
}

// a ∩ b = (a^perp + b^perp)^perp.
inline Subspace intersect(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("intersect: ambient mismatch");
  return complement(sum(complement(a), complement(b)));
}

inline bool is_subspace_of(const Subspace& inner, const Subspace& outer) {
  for (std::size_t r = 0; r < inner.dim(); ++r) {
    if (!outer.contains(inner.basis_row(r))) return false;
  }
  return true;
}

// Incremental independence tracker: one reduced row per pivot position.
// insert() returns whether the vector enlarged the span.
class GaussBasis {
 public:
  explicit GaussBasis(std::size_t ambient_dim) : rows_(ambient_dim) {}

  BitVec residual(BitVec x) const {
    while (!x.is_zero()) {
      const BitVec& row = rows_[x.lowest_set_bit()];
      if (row.size() == 0) break;  // empty slot: pivot not covered
      x.xor_with(row);
    }
    return x;
  }

  bool contains(const BitVec& x) const { return residual(x).is_zero(); }

  bool insert(const BitVec& x) {
    BitVec r = residual(x);
    if (r.is_zero()) return false;
    rows_[r.lowest_set_bit()] = std::move(r);
    ++dim_;
    return true;
  }

  std::size_t dim() const { return dim_; }

 private:
  std::vector<BitVec> rows_;  // rows_[p] empty or has lowest set bit p
  std::size_t dim_ = 0;
};

// Basis vectors of `super` that extend a basis of `sub` to one of `super`.
// Requires sub <= super; returns dim(super) - dim(sub) vectors.
inline std::vector<BitVec> extend_basis(const Subspace& sub, const Subspace& super) {
  GaussBasis tracker(sub.ambient_dim());
  for (std::size_t r = 0; r < sub.dim(); ++r) tracker.insert(sub.basis_row(r));
  std::vector<BitVec> out;
  for (std::size_t r = 0; r < super.dim(); ++r) {
    BitVec candidate = super.basis_row(r);
    if (tracker.insert(candidate)) out.push_back(std::move(candidate));
  }
  if (sub.dim() + out.size() != super.dim()) {
    throw std::invalid_argument("extend_basis: sub is not contained in super");
  }
  return out;
}

// Uniform d-dimensional subspace of Z_2^n: uniform d x n matrices rejected
// until full rank (every subspace has the same number of ordered bases).
inline Subspace sample_subspace(std::size_t n, std::size_t d, Rng& rng) {
  if (d > n) throw std::invalid_argument("sample_subspace: d exceeds ambient dimension");
  for (;;) {
    GF2Matrix m = random_matrix(d, n, rng);
    if (rank(m) == d) return Subspace::from_basis(m);
  }
}

// Uniform element of s: a uniform combination of basis rows.
inline BitVec sample_vector_in(const Subspace& s, Rng& rng) {
  BitVec x(s.ambient_dim());
  const BitVec coeffs = random_bits(s.dim(), rng);
  for (std::size_t r = 0; r < s.dim(); ++r) {
    if (coeffs.get(r)) x.xor_with(s.basis_row(r));
  }
  return x;
}

// True iff m is invertible and m^T maps a into a and a^perp into a^perp
// (equivalently: m itself does too).
inline bool is_space_automorphism(const Subspace& a, const GF2Matrix& m) {
  const std::size_t n = a.ambient_dim();
  if (m.rows() != n || m.cols() != n) return false;
  if (rank(m) != n) return false;
  const Subspace p = complement(a);
  for (std::size_t r = 0; r < a.dim(); ++r) {
    if (!a.contains(m.mul_transposed_vec(a.basis_row(r)))) return false;
  }
  for (std::size_t r = 0; r < p.dim(); ++r) {
    if (!p.contains(m.mul_transposed_vec(p.basis_row(r)))) return false;
  }
  return true;
}

// Uniform sample from {M : M invertible, M^T(a) = a, M^T(a^perp) = a^perp}.
//
// Because GF(2) admits self-orthogonal vectors, D = a ∩ a^perp can be
// nontrivial and [basis(a) | basis(a^perp)] need not span Z_2^n. The change
// of basis therefore uses the chain D | a-rest | a^perp-rest | completion E.
// A linear map fixes a and a^perp setwise iff, in these coordinates, it is
// block upper triangular with invertible diagonal blocks:
//
//     [ C_DD  C_D1  C_D2  C_DE ]   (D is forced into D; the a-rest column may
//     [  0    C_11   0    C_1E ]    fall anywhere in a = D + a-rest, and so
//     [  0     0    C_22  C_2E ]    on; E is unconstrained.)
//     [  0     0     0    C_EE ]
//
// Sampling each diagonal block uniformly from GL and each free block
// uniformly gives the uniform distribution on that stabilizer group. When
// D = 0 this is exactly blockdiag(C_11, C_22) on [basis(a) | basis(a^perp)].
inline GF2Matrix sample_automorphism(const Subspace& a, Rng& rng) {
  const std::size_t n = a.ambient_dim();
  const Subspace p = complement(a);
  const Subspace d = intersect(a, p);
  const std::size_t k = d.dim();
  const std::size_t da = a.dim() - k;
  const std::size_t dp = p.dim() - k;

  std::vector<BitVec> chain;
  for (std::size_t r = 0; r < d.dim(); ++r) chain.push_back(d.basis_row(r));
  for (BitVec& v : extend_basis(d, a)) chain.push_back(std::move(v));
  for (BitVec& v : extend_basis(d, p)) chain.push_back(std::move(v));
  for (BitVec& v : extend_basis(sum(a, p), Subspace::full(n))) chain.push_back(std::move(v));

  const GF2Matrix u = GF2Matrix::from_rows(chain, n).transposed();  // columns = chain

  const std::size_t off_d = 0, off_1 = k, off_2 = k + da, off_e = k + da + dp;
  GF2Matrix c(n, n);
  c.place(off_d, off_d, sample_invertible(k, rng));
  c.place(off_1, off_1, sample_invertible(da, rng));
  c.place(off_2, off_2, sample_invertible(dp, rng));
  c.place(off_e, off_e, sample_invertible(k, rng));
  c.place(off_d, off_1, random_matrix(k, da, rng));
  c.place(off_d, off_2, random_matrix(k, dp, rng));
  c.place(off_d, off_e, random_matrix(k, k, rng));
  c.place(off_1, off_e, random_matrix(da, k, rng));
  c.place(off_2, off_e, random_matrix(dp, k, rng));

  const GF2Matrix t = u.mul(c).mul(*inverse(u));
  return t.transposed();
}

}  // namespace fqm
