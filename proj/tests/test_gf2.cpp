#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fqm/gf2.hpp"
#include "fqm/subspace.hpp"
#include "oracles.hpp"

using namespace fqm;
namespace ft = fqm::testing;

TEST_CASE("BitVec basics", "[gf2]") {
  BitVec v = BitVec::from_string("01011");
  REQUIRE(v.size() == 5);
  REQUIRE_FALSE(v.get(0));
  REQUIRE(v.get(1));
  REQUIRE(v.get(4));
  REQUIRE(v.to_string() == "01011");
  REQUIRE(v.popcount() == 3);
  REQUIRE(v.lowest_set_bit() == 1);

  v.flip(0);
  REQUIRE(v.to_string() == "11011");
  REQUIRE(BitVec(4).is_zero());
  REQUIRE(BitVec(4).lowest_set_bit() == 4);
  REQUIRE_THROWS_AS(BitVec::from_string("01x"), ParseError);
}

TEST_CASE("BitVec xor and dot", "[gf2]") {
  const BitVec a = BitVec::from_string("1100");
  const BitVec b = BitVec::from_string("0110");
  REQUIRE((a ^ b).to_string() == "1010");
  REQUIRE(a.dot(b) == true);   // overlap {1}
  REQUIRE(a.dot(a) == false);  // even weight is self-orthogonal over GF(2)
  REQUIRE_THROWS_AS(a.dot(BitVec(3)), std::invalid_argument);

  // Bilinearity: <x + y, z> = <x, z> + <y, z>.
  Rng rng(101);
  for (int it = 0; it < 200; ++it) {
    const BitVec x = random_bits(70, rng), y = random_bits(70, rng), z = random_bits(70, rng);
    REQUIRE((x ^ y).dot(z) == (x.dot(z) != y.dot(z)));
  }
}

TEST_CASE("BitVec words above the tail stay zero", "[gf2]") {
  Rng rng(7);
  for (int it = 0; it < 50; ++it) {
    const std::size_t n = 1 + rng.uniform_index(130);
    BitVec v = random_bits(n, rng);
    BitVec w = random_bits(n, rng);
    v.xor_with(w);
    BitVec copy(n);
    for (std::size_t i = 0; i < n; ++i) copy.set(i, v.get(i));
    REQUIRE(v == copy);  // equality is word-wise; any stray tail bit would break it
  }
}

TEST_CASE("matrix text round trip", "[gf2]") {
  const std::string text = "101\n010\n111\n";
  const GF2Matrix m = GF2Matrix::from_text(text);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 3);
  REQUIRE(m.to_text() == text);
  REQUIRE(GF2Matrix::from_text(m.to_text()) == m);
  REQUIRE(GF2Matrix::from_text("").rows() == 0);
  REQUIRE_THROWS_AS(GF2Matrix::from_text("10\n1"), ParseError);
  REQUIRE_THROWS_AS(GF2Matrix::from_text("10\n1a"), ParseError);
}

TEST_CASE("matrix multiply and transpose", "[gf2]") {
  Rng rng(42);
  for (int it = 0; it < 30; ++it) {
    const GF2Matrix a = random_matrix(5, 9, rng);
    const GF2Matrix b = random_matrix(9, 7, rng);
    REQUIRE(a.mul(b).transposed() == b.transposed().mul(a.transposed()));

    const BitVec x = random_bits(5, rng);
    REQUIRE(a.mul_transposed_vec(x) == a.transposed().mul_vec(x));
  }
  const GF2Matrix id = GF2Matrix::identity(6);
  const GF2Matrix m = random_matrix(6, 6, rng);
  REQUIRE(id.mul(m) == m);
  REQUIRE(m.mul(id) == m);
}

TEST_CASE("rref examples", "[gf2]") {
  REQUIRE(rref(GF2Matrix::identity(4)) == GF2Matrix::identity(4));
  REQUIRE(rref(GF2Matrix::from_text("11\n11\n")) == GF2Matrix::from_text("11\n00\n"));
}

TEST_CASE("rref preserves the row space and is idempotent", "[gf2]") {
  Rng rng(2024);
  for (int it = 0; it < 100; ++it) {
    const GF2Matrix m = random_matrix(6, 6, rng);
    const GF2Matrix r = rref(m);
    REQUIRE(r.rows() == m.rows());
    REQUIRE(r.cols() == m.cols());
    REQUIRE(rref(r) == r);

    std::vector<BitVec> m_rows, r_rows;
    for (std::size_t i = 0; i < 6; ++i) {
      m_rows.push_back(m.row(i));
      r_rows.push_back(r.row(i));
    }
    REQUIRE(ft::enumerate_span(m_rows, 6) == ft::enumerate_span(r_rows, 6));
  }
}

TEST_CASE("inverse", "[gf2]") {
  REQUIRE(inverse(GF2Matrix::from_text("11\n11\n")) == std::nullopt);
  REQUIRE(*inverse(GF2Matrix::identity(5)) == GF2Matrix::identity(5));
  Rng rng(9);
  for (int it = 0; it < 25; ++it) {
    const GF2Matrix m = sample_invertible(6, rng);
    const GF2Matrix mi = *inverse(m);
    REQUIRE(m.mul(mi) == GF2Matrix::identity(6));
    REQUIRE(mi.mul(m) == GF2Matrix::identity(6));
  }
}

TEST_CASE("nullspace basis", "[gf2]") {
  Rng rng(77);
  for (int it = 0; it < 40; ++it) {
    const std::size_t n = 2 + rng.uniform_index(7);
    const GF2Matrix m = random_matrix(1 + rng.uniform_index(n), n, rng);
    const GF2Matrix ns = nullspace_basis(m);
    REQUIRE(ns.rows() == n - rank(m));
    for (std::size_t r = 0; r < ns.rows(); ++r) {
      REQUIRE(m.mul_vec(ns.row(r)).is_zero());
    }
    REQUIRE(rank(ns) == ns.rows());
  }
}

TEST_CASE("subspace canonical form", "[gf2]") {
  const std::size_t n = 6;
  Rng rng(31337);
  for (int it = 0; it < 50; ++it) {
    const Subspace s = sample_subspace(n, 3, rng);
    // Re-present the same space through random generating sets.
    std::vector<BitVec> gens;
    for (int g = 0; g < 8; ++g) gens.push_back(sample_vector_in(s, rng));
    const Subspace t = Subspace::span_of(n, gens);
    if (t.dim() == s.dim()) {
      REQUIRE(t == s);
      REQUIRE(t.basis() == s.basis());  // bit-identical canonical basis
    } else {
      REQUIRE(is_subspace_of(t, s));
    }
  }
  REQUIRE(Subspace::zero(4).dim() == 0);
  REQUIRE(Subspace::full(4).dim() == 4);
  REQUIRE(Subspace::from_text(4, Subspace::full(4).to_text()) == Subspace::full(4));
}

TEST_CASE("membership agrees with exhaustive enumeration", "[gf2]") {
  Rng rng(555);
  for (std::size_t n = 2; n <= 10; n += 2) {
    const Subspace s = sample_subspace(n, n / 2, rng);
    const auto elements = ft::enumerate_subspace(s);
    REQUIRE(elements.size() == (std::size_t{1} << s.dim()));
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
      const BitVec x = ft::vec_from_index(idx, n);
      REQUIRE(s.contains(x) == (elements.count(x.to_string()) > 0));
    }
  }
  // The zero vector and every basis row are members.
  const Subspace s = sample_subspace(12, 5, rng);
  REQUIRE(s.contains(BitVec(12)));
  for (std::size_t r = 0; r < s.dim(); ++r) REQUIRE(s.contains(s.basis_row(r)));
}

TEST_CASE("coset reduce gives one representative per coset", "[gf2]") {
  Rng rng(4242);
  const std::size_t n = 8;
  const Subspace s = sample_subspace(n, 3, rng);
  for (int it = 0; it < 100; ++it) {
    const BitVec x = random_bits(n, rng);
    const BitVec r = s.reduce(x);
    REQUIRE(s.reduce(r) == r);                       // idempotent
    REQUIRE(s.contains(x ^ r));                      // same coset
    REQUIRE(s.reduce(x ^ sample_vector_in(s, rng)) == r);  // coset-invariant
  }
}

TEST_CASE("complement examples", "[gf2]") {
  const Subspace e0 = Subspace::from_text(2, "10\n");
  REQUIRE(complement(e0) == Subspace::from_text(2, "01\n"));
  REQUIRE(complement(Subspace::full(3)) == Subspace::zero(3));
  REQUIRE(complement(Subspace::zero(3)) == Subspace::full(3));
  // (1,1) is self-orthogonal: its span is its own complement.
  const Subspace diag = Subspace::from_text(2, "11\n");
  REQUIRE(complement(diag) == diag);
}

TEST_CASE("complement properties", "[gf2]") {
  Rng rng(606);
  for (int it = 0; it < 60; ++it) {
    const std::size_t n = 2 + rng.uniform_index(7);
    const Subspace s = sample_subspace(n, rng.uniform_index(n + 1), rng);
    const Subspace c = complement(s);
    REQUIRE(s.dim() + c.dim() == n);
    REQUIRE(complement(c) == s);
    if (n <= 8) {
      REQUIRE(ft::enumerate_subspace(c) == ft::brute_complement(s));
    }
  }
}

TEST_CASE("sum and intersect", "[gf2]") {
  Rng rng(808);
  for (int it = 0; it < 60; ++it) {
    const std::size_t n = 2 + rng.uniform_index(6);
    const Subspace a = sample_subspace(n, rng.uniform_index(n + 1), rng);
    const Subspace b = sample_subspace(n, rng.uniform_index(n + 1), rng);
    const Subspace u = sum(a, b);
    const Subspace i = intersect(a, b);
    REQUIRE(a.dim() + b.dim() == u.dim() + i.dim());
    REQUIRE(is_subspace_of(i, a));
    REQUIRE(is_subspace_of(i, b));
    REQUIRE(is_subspace_of(a, u));
    REQUIRE(complement(u) == intersect(complement(a), complement(b)));
    REQUIRE(ft::enumerate_subspace(i) ==
            ft::set_intersection(ft::enumerate_subspace(a), ft::enumerate_subspace(b)));
    REQUIRE(ft::enumerate_subspace(u).count((a.dim() ? a.basis_row(0) : BitVec(n)).to_string()) ==
            1);
  }
  const Subspace s = sample_subspace(6, 3, rng);
  REQUIRE(sum(s, Subspace::zero(6)) == s);
  REQUIRE(intersect(s, Subspace::full(6)) == s);
}

TEST_CASE("extend_basis and GaussBasis", "[gf2]") {
  Rng rng(909);
  for (int it = 0; it < 40; ++it) {
    const std::size_t n = 3 + rng.uniform_index(6);
    const Subspace super = sample_subspace(n, 1 + rng.uniform_index(n), rng);
    // A random subspace of super.
    std::vector<BitVec> gens;
    const std::size_t g = rng.uniform_index(super.dim() + 1);
    for (std::size_t k = 0; k < g; ++k) gens.push_back(sample_vector_in(super, rng));
    const Subspace sub = Subspace::span_of(n, gens);

    const std::vector<BitVec> extra = extend_basis(sub, super);
    REQUIRE(extra.size() == super.dim() - sub.dim());
    std::vector<BitVec> all;
    for (std::size_t r = 0; r < sub.dim(); ++r) all.push_back(sub.basis_row(r));
    for (const BitVec& v : extra) all.push_back(v);
    REQUIRE(Subspace::span_of(n, all) == super);

    GaussBasis gb(n);
    std::size_t inserted = 0;
    for (const BitVec& v : all) inserted += gb.insert(v) ? 1 : 0;
    REQUIRE(inserted == super.dim());
    REQUIRE(gb.dim() == super.dim());
    REQUIRE(gb.contains(sample_vector_in(super, rng)));
  }
  REQUIRE_THROWS_AS(extend_basis(Subspace::from_text(3, "110\n"), Subspace::from_text(3, "001\n")),
                    std::invalid_argument);
}

TEST_CASE("sample_subspace dimensions and degenerate cases", "[gf2]") {
  Rng rng(1212);
  REQUIRE(sample_subspace(5, 0, rng) == Subspace::zero(5));
  REQUIRE(sample_subspace(5, 5, rng) == Subspace::full(5));
  for (int it = 0; it < 50; ++it) {
    const std::size_t n = 1 + rng.uniform_index(12);
    const std::size_t d = rng.uniform_index(n + 1);
    REQUIRE(sample_subspace(n, d, rng).dim() == d);
  }
  REQUIRE_THROWS_AS(sample_subspace(3, 4, rng), std::invalid_argument);
}

TEST_CASE("sample_subspace is uniform over the 2-dim subspaces of Z_2^4", "[gf2]") {
  // Reference count by brute force: spans of all independent pairs.
  std::set<std::string> all;
  for (std::uint64_t i = 1; i < 16; ++i) {
    for (std::uint64_t j = 1; j < 16; ++j) {
      if (i == j) continue;
      const Subspace s =
          Subspace::span_of(4, {ft::vec_from_index(i, 4), ft::vec_from_index(j, 4)});
      if (s.dim() == 2) all.insert(s.to_text());
    }
  }
  REQUIRE(all.size() == 35);  // Gaussian binomial [4 choose 2]_2

  std::map<std::string, int> counts;
  Rng rng(20260817);
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) counts[sample_subspace(4, 2, rng).to_text()]++;
  REQUIRE(counts.size() == 35);
  const double expect = trials / 35.0;
  const double sigma = std::sqrt(trials * (1.0 / 35) * (34.0 / 35));
  for (const auto& [key, c] : counts) {
    REQUIRE(std::abs(c - expect) <= 4.0 * sigma);  // 35 cells, so allow 4 sigma each
  }
}

TEST_CASE("sample_vector_in", "[gf2]") {
  Rng rng(1414);
  const Subspace s = sample_subspace(9, 4, rng);
  for (int it = 0; it < 200; ++it) REQUIRE(s.contains(sample_vector_in(s, rng)));
  REQUIRE(sample_vector_in(Subspace::zero(9), rng).is_zero());

  // Uniform over the 8 elements of a 3-dim space.
  const Subspace t = sample_subspace(5, 3, rng);
  std::map<std::string, int> counts;
  const int trials = 8000;
  for (int i = 0; i < trials; ++i) counts[sample_vector_in(t, rng).to_string()]++;
  REQUIRE(counts.size() == 8);
  const double sigma = std::sqrt(trials * (1.0 / 8) * (7.0 / 8));
  for (const auto& [key, c] : counts) REQUIRE(std::abs(c - trials / 8.0) <= 4.0 * sigma);
}

TEST_CASE("sample_invertible", "[gf2]") {
  Rng rng(1616);
  REQUIRE(sample_invertible(1, rng) == GF2Matrix::identity(1));
  for (int it = 0; it < 30; ++it) {
    const GF2Matrix m = sample_invertible(7, rng);
    REQUIRE(rank(m) == 7);
    REQUIRE(m.mul(*inverse(m)) == GF2Matrix::identity(7));
  }

  // GL(2,2) has exactly 6 elements; sampling hits each uniformly.
  std::set<std::string> gl2;
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    GF2Matrix m(2, 2);
    for (int b = 0; b < 4; ++b) {
      if ((bits >> b) & 1u) m.set(b / 2, b % 2, true);
    }
    if (rank(m) == 2) gl2.insert(m.to_text());
  }
  REQUIRE(gl2.size() == 6);

  std::map<std::string, int> counts;
  const int trials = 6000;
  for (int i = 0; i < trials; ++i) counts[sample_invertible(2, rng).to_text()]++;
  REQUIRE(counts.size() == 6);
  for (const auto& [key, c] : counts) {
    REQUIRE(gl2.count(key) == 1);
    REQUIRE(std::abs(c - 1000.0) <= 4.0 * std::sqrt(6000 * (1.0 / 6) * (5.0 / 6)));
  }
}

namespace {

// Brute-force stabilizer {M in GL(n,2) : M^T fixes a and a^perp setwise}.
std::set<std::string> brute_stabilizer(const Subspace& a) {
  const std::size_t n = a.ambient_dim();
  std::set<std::string> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (n * n)); ++bits) {
    GF2Matrix m(n, n);
    for (std::size_t b = 0; b < n * n; ++b) {
      if ((bits >> b) & 1u) m.set(b / n, b % n, true);
    }
    if (is_space_automorphism(a, m)) out.insert(m.to_text());
  }
  return out;
}

}  // namespace

TEST_CASE("sample_automorphism satisfies the defining conditions", "[gf2]") {
  Rng rng(1818);
  for (int it = 0; it < 60; ++it) {
    const std::size_t n = 2 + 2 * rng.uniform_index(5);  // 2..10
    const Subspace a = sample_subspace(n, n / 2, rng);
    REQUIRE(is_space_automorphism(a, GF2Matrix::identity(n)));
    const GF2Matrix m = sample_automorphism(a, rng);
    REQUIRE(is_space_automorphism(a, m));

    // M itself (not only M^T) preserves both spaces.
    const Subspace p = complement(a);
    for (std::size_t r = 0; r < a.dim(); ++r) REQUIRE(a.contains(m.mul_vec(a.basis_row(r))));
    for (std::size_t r = 0; r < p.dim(); ++r) REQUIRE(p.contains(m.mul_vec(p.basis_row(r))));

    // Closure under composition.
    const GF2Matrix m2 = sample_automorphism(a, rng);
    REQUIRE(is_space_automorphism(a, m.mul(m2)));
  }
}

TEST_CASE("sample_automorphism covers the full stabilizer uniformly", "[gf2]") {
  Rng rng(2020);

  SECTION("self-dual line in Z_2^2") {
    const Subspace diag = Subspace::from_text(2, "11\n");
    const auto expected = brute_stabilizer(diag);
    REQUIRE(expected.size() == 2);
    std::map<std::string, int> counts;
    for (int i = 0; i < 2000; ++i) counts[sample_automorphism(diag, rng).to_text()]++;
    std::set<std::string> seen;
    for (const auto& [key, c] : counts) {
      seen.insert(key);
      REQUIRE(std::abs(c - 1000.0) <= 4.0 * std::sqrt(2000 * 0.25));
    }
    REQUIRE(seen == expected);
  }

  SECTION("split case in Z_2^4") {
    const Subspace a = Subspace::from_text(4, "1000\n0100\n");
    REQUIRE(intersect(a, complement(a)).dim() == 0);
    const auto expected = brute_stabilizer(a);
    REQUIRE(expected.size() == 36);  // GL(2,2) x GL(2,2)
    std::map<std::string, int> counts;
    const int trials = 7200;
    for (int i = 0; i < trials; ++i) counts[sample_automorphism(a, rng).to_text()]++;
    std::set<std::string> seen;
    const double sigma = std::sqrt(trials * (1.0 / 36) * (35.0 / 36));
    for (const auto& [key, c] : counts) {
      seen.insert(key);
      REQUIRE(std::abs(c - trials / 36.0) <= 5.0 * sigma);
    }
    REQUIRE(seen == expected);
  }

  SECTION("self-dual plane in Z_2^4") {
    const Subspace a = Subspace::from_text(4, "1100\n0011\n");
    REQUIRE(complement(a) == a);  // fully degenerate chain: D = a, no split parts
    const auto expected = brute_stabilizer(a);
    REQUIRE(expected.size() == 576);  // |GL(2,2)|^2 * 2^4 coupling choices
    std::map<std::string, int> counts;
    const int trials = 40000;
    for (int i = 0; i < trials; ++i) counts[sample_automorphism(a, rng).to_text()]++;
    std::set<std::string> seen;
    const double sigma = std::sqrt(trials * (1.0 / 576) * (575.0 / 576));
    for (const auto& [key, c] : counts) {
      seen.insert(key);
      REQUIRE(std::abs(c - trials / 576.0) <= 5.5 * sigma);
    }
    REQUIRE(seen == expected);
  }
}
