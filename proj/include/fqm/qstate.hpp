#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fqm/prob.hpp"
#include "fqm/rng.hpp"
#include "fqm/subspace.hpp"

// Quantum states of the lab, in two interchangeable backends.
//
// Symbolic: coset states  (1/sqrt|S|) sum_{x in S} (-1)^{c.x} |x + a>,
// closed under the n-fold Hadamard and under computational-basis membership
// projections, with exact dyadic outcome probabilities at any dimension.
//
// Dense: explicit amplitude vectors for cross-checking the symbolic algebra
// and for states (rejection branches, entangled joints) that leave the coset
// family. Capped at a small qubit count.

namespace fqm {

inline constexpr std::size_t kDenseQubitCap = 14;

// (space, shift, character) kept canonical: shift is the unique coset
// representative of a + S, character the representative of c + S^perp.
// Two canonical triples are equal iff the states agree up to global phase.
class CosetState {
 public:
  static CosetState make(Subspace space, const BitVec& shift, const BitVec& character) {
    if (space.ambient_dim() == 0) throw std::invalid_argument("CosetState: empty ambient space");
    if (shift.size() != space.ambient_dim() || character.size() != space.ambient_dim()) {
      throw std::invalid_argument("CosetState: ambient dimension mismatch");
    }
    CosetState cs;
    cs.shift_ = space.reduce(shift);
    cs.character_ = complement(space).reduce(character);
    cs.space_ = std::move(space);
    return cs;
  }

  // |A>: the uniform superposition over a subspace.
  static CosetState subspace_state(Subspace space) {
    const std::size_t n = space.ambient_dim();
    return make(std::move(space), BitVec(n), BitVec(n));
  }

  const Subspace& space() const { return space_; }
  const BitVec& shift() const { return shift_; }
  const BitVec& character() const { return character_; }
  std::size_t ambient_dim() const { return space_.ambient_dim(); }

  // Fixture format: basis rows, then shift, then character, one bit string
  // per line. The last two lines are always shift and character.
  std::string to_text() const {
    return space_.to_text() + shift_.to_string() + "\n" + character_.to_string() + "\n";
  }

  static CosetState from_text(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      if (eol > pos) lines.emplace_back(text.substr(pos, eol - pos));
      pos = eol + 1;
    }
    if (lines.size() < 2) throw ParseError("coset state text: expected shift and character lines");
    const std::size_t n = lines.back().size();
    for (const auto& l : lines) {
      if (l.size() != n) throw ParseError("coset state text: ragged line widths");
    }
    std::vector<BitVec> rows;
    for (std::size_t i = 0; i + 2 < lines.size(); ++i) rows.push_back(BitVec::from_string(lines[i]));
    return make(Subspace::span_of(n, rows), BitVec::from_string(lines[lines.size() - 2]),
                BitVec::from_string(lines.back()));
  }

  friend bool operator==(const CosetState&, const CosetState&) = default;

 private:
  Subspace space_;
  BitVec shift_, character_;
};

// H^{x n} maps (S, a, c) to (S^perp, c, a) up to global phase; on canonical
// triples the swap is already canonical, so this is an exact involution.
inline CosetState hadamard_all(const CosetState& st) {
  return CosetState::make(complement(st.space()), st.character(), st.shift());
}

namespace detail {

// Coefficients expressing `target` in the span of `gens` (nullopt if outside).
// Augmented elimination: rows are [vector | coefficient tail].
inline std::optional<BitVec> express_in_span(const std::vector<BitVec>& gens,
                                             const BitVec& target) {
  const std::size_t n = target.size();
  const std::size_t g = gens.size();
  std::vector<BitVec> slot(n);  // by pivot position within the first n bits
  const auto reduce = [&](BitVec aug) {
    for (;;) {
      const std::size_t p = aug.lowest_set_bit();
      if (p >= n || slot[p].size() == 0) return aug;
      aug.xor_with(slot[p]);
    }
  };
  for (std::size_t i = 0; i < g; ++i) {
    BitVec aug(n + g);
    for (std::size_t b = 0; b < n; ++b) aug.set(b, gens[i].get(b));
    aug.set(n + i, true);
    aug = reduce(std::move(aug));
    const std::size_t p = aug.lowest_set_bit();
    if (p < n) slot[p] = std::move(aug);
  }
  BitVec aug(n + g);
  for (std::size_t b = 0; b < n; ++b) aug.set(b, target.get(b));
  aug = reduce(std::move(aug));
  if (aug.lowest_set_bit() < n) return std::nullopt;
  BitVec coeffs(g);
  for (std::size_t i = 0; i < g; ++i) coeffs.set(i, aug.get(n + i));
  return coeffs;
}

}  // namespace detail

struct SymbolicProjection {
  DyadicProb accept_probability;
  // Present iff the probability is nonzero. The rejected branch of a coset
  // state is not itself a coset state, so only its probability is reported.
  std::optional<CosetState> accepted_state;
};

// Projects onto span{|x> : x in t}. The support a + S meets t iff a in S + t;
// in that case the accept probability is |S ∩ t| / |S| and the accepted state
// is the coset state (S ∩ t, x0, c) for any x0 in (a + S) ∩ t.
inline SymbolicProjection project_membership(const CosetState& st, const Subspace& t) {
  if (t.ambient_dim() != st.ambient_dim()) {
    throw std::invalid_argument("project_membership: ambient dimension mismatch");
  }
  const Subspace& s = st.space();
  std::vector<BitVec> gens;
  for (std::size_t r = 0; r < s.dim(); ++r) gens.push_back(s.basis_row(r));
  for (std::size_t r = 0; r < t.dim(); ++r) gens.push_back(t.basis_row(r));
  const auto coeffs = detail::express_in_span(gens, st.shift());
  if (!coeffs) return {DyadicProb::zero(), std::nullopt};

  BitVec x0 = st.shift();
  for (std::size_t r = 0; r < s.dim(); ++r) {
    if (coeffs->get(r)) x0.xor_with(s.basis_row(r));  // x0 = shift + s-part lands in t
  }
  Subspace inter = intersect(s, t);
  const unsigned lost = static_cast<unsigned>(s.dim() - inter.dim());
  return {DyadicProb::pow2(lost), CosetState::make(std::move(inter), x0, st.character())};
}

class DenseState;
struct DenseProjection;
DenseProjection dense_project_membership_block(const DenseState& st, const Subspace& t,
                                               std::size_t offset);

class DenseState {
 public:
  DenseState(std::size_t qubits, std::vector<std::complex<double>> amplitudes,
             std::size_t cap = kDenseQubitCap)
      : qubits_(qubits), amp_(std::move(amplitudes)) {
    if (qubits == 0 || qubits > cap) {
      throw std::invalid_argument("DenseState: qubit count outside (0, cap]");
    }
    if (amp_.size() != (std::size_t{1} << qubits)) {
      throw std::invalid_argument("DenseState: amplitude count is not 2^qubits");
    }
  }

  static DenseState basis_state(std::size_t qubits, std::uint64_t index,
                                std::size_t cap = kDenseQubitCap) {
    std::vector<std::complex<double>> amp(std::size_t{1} << qubits, 0.0);
    amp.at(index) = 1.0;
    return DenseState(qubits, std::move(amp), cap);
  }

  // Coordinate i of a vector is bit i of the amplitude index.
  static DenseState from_coset(const CosetState& cs, std::size_t cap = kDenseQubitCap) {
    const std::size_t n = cs.ambient_dim();
    if (n > cap) throw std::invalid_argument("DenseState: coset state exceeds dense cap");
    const std::size_t d = cs.space().dim();
    std::vector<std::complex<double>> amp(std::size_t{1} << n, 0.0);
    const double a = 1.0 / std::sqrt(static_cast<double>(std::uint64_t{1} << d));

    std::vector<std::uint64_t> row_idx(d);
    std::vector<unsigned> row_sign(d);
    for (std::size_t r = 0; r < d; ++r) {
      const BitVec row = cs.space().basis_row(r);
      row_idx[r] = row.words().empty() ? 0 : row.words()[0];
      row_sign[r] = cs.character().dot(row) ? 1u : 0u;
    }
    std::uint64_t idx = cs.shift().words().empty() ? 0 : cs.shift().words()[0];
    unsigned sign = 0;
    const std::uint64_t count = std::uint64_t{1} << d;
    for (std::uint64_t g = 0;; ++g) {
      amp[idx] = sign ? -a : a;
      if (g + 1 == count) break;
      const unsigned b = static_cast<unsigned>(std::countr_zero(g + 1));  // Gray code step
      idx ^= row_idx[b];
      sign ^= row_sign[b];
    }
    return DenseState(n, std::move(amp), cap);
  }

  // Haar-random direction: iid complex Gaussian amplitudes, normalized.
  static DenseState random_state(std::size_t qubits, Rng& rng,
                                 std::size_t cap = kDenseQubitCap) {
    std::vector<std::complex<double>> amp(std::size_t{1} << qubits);
    double norm2 = 0.0;
    for (auto& a : amp) {
      a = {rng.normal(), rng.normal()};
      norm2 += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : amp) a *= inv;
    return DenseState(qubits, std::move(amp), cap);
  }

  std::size_t qubits() const { return qubits_; }
  std::span<const std::complex<double>> amplitudes() const& { return amp_; }
  std::span<const std::complex<double>> amplitudes() const&& = delete;  // no dangling views

  double norm() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

  friend bool operator==(const DenseState&, const DenseState&) = default;

  friend DenseState dense_hadamard_block(DenseState st, std::size_t offset, std::size_t width);
  friend DenseProjection dense_project_membership_block(const DenseState& st, const Subspace& t,
                                                        std::size_t offset);

 private:
  std::size_t qubits_;
  std::vector<std::complex<double>> amp_;
};

// |<a|b>|; insensitive to global phase.
inline double overlap(const DenseState& a, const DenseState& b) {
  if (a.qubits() != b.qubits()) throw std::invalid_argument("overlap: qubit count mismatch");
  std::complex<double> s = 0.0;
  auto aa = a.amplitudes();
  auto bb = b.amplitudes();
  for (std::size_t i = 0; i < aa.size(); ++i) s += std::conj(aa[i]) * bb[i];
  return std::abs(s);
}

// Walsh-Hadamard butterflies on qubits [offset, offset + width).
inline DenseState dense_hadamard_block(DenseState st, std::size_t offset, std::size_t width) {
  if (offset + width > st.qubits_) throw std::invalid_argument("dense_hadamard_block: range");
  auto& amp = st.amp_;
  const std::size_t size = amp.size();
  for (std::size_t q = offset; q < offset + width; ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < size; base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const std::complex<double> x = amp[i];
        const std::complex<double> y = amp[i + stride];
        amp[i] = (x + y) * 0.7071067811865475244008444;
        amp[i + stride] = (x - y) * 0.7071067811865475244008444;
      }
    }
  }
  return st;
}

inline DenseState dense_hadamard_all(DenseState st) {
  const std::size_t n = st.qubits();
  return dense_hadamard_block(std::move(st), 0, n);
}

struct DenseProjection {
  double accept_probability = 0.0;
  std::optional<DenseState> accepted_state;  // absent when the probability is 0
  std::optional<DenseState> rejected_state;  // absent when the probability is 1

  // Probabilities within kClamp of 0 or 1 are snapped exactly; the matching
  // branch is then a zero vector and is not materialized.
  static constexpr double kClamp = 1e-12;
};

// Projects the `width` qubits starting at `offset` onto membership in t,
// where width = t.ambient_dim(). Other qubits ride along (this is how one
// note of an entangled bundle is tested).
inline DenseProjection dense_project_membership_block(const DenseState& st, const Subspace& t,
                                                      std::size_t offset) {
  const std::size_t w = t.ambient_dim();
  if (w == 0 || offset + w > st.qubits_) {
    throw std::invalid_argument("dense_project_membership_block: range");
  }
  // Mark the members of t in the block's index space.
  std::vector<char> member(std::size_t{1} << w, 0);
  {
    const std::size_t d = t.dim();
    std::vector<std::uint64_t> row_idx(d);
    for (std::size_t r = 0; r < d; ++r) row_idx[r] = t.basis_row(r).words()[0];
    std::uint64_t idx = 0;
    const std::uint64_t count = std::uint64_t{1} << d;
    for (std::uint64_t g = 0;; ++g) {
      member[idx] = 1;
      if (g + 1 == count) break;
      idx ^= row_idx[std::countr_zero(g + 1)];
    }
  }
  const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
  const auto& amp = st.amp_;
  double p = 0.0;
  for (std::size_t i = 0; i < amp.size(); ++i) {
    if (member[(i >> offset) & mask]) p += std::norm(amp[i]);
  }
  if (p > 1.0 - DenseProjection::kClamp) p = 1.0;
  if (p < DenseProjection::kClamp) p = 0.0;

  DenseProjection out;
  out.accept_probability = p;
  if (p > 0.0) {
    std::vector<std::complex<double>> acc(amp.size(), 0.0);
    const double inv = 1.0 / std::sqrt(p);
    for (std::size_t i = 0; i < amp.size(); ++i) {
      if (member[(i >> offset) & mask]) acc[i] = amp[i] * inv;
    }
    out.accepted_state = DenseState(st.qubits_, std::move(acc), st.qubits_);
  }
  if (p < 1.0) {
    std::vector<std::complex<double>> rej(amp.size(), 0.0);
    const double inv = 1.0 / std::sqrt(1.0 - p);
    for (std::size_t i = 0; i < amp.size(); ++i) {
      if (!member[(i >> offset) & mask]) rej[i] = amp[i] * inv;
    }
    out.rejected_state = DenseState(st.qubits_, std::move(rej), st.qubits_);
  }
  return out;
}

inline DenseProjection dense_project_membership(const DenseState& st, const Subspace& t) {
  if (t.ambient_dim() != st.qubits()) {
    throw std::invalid_argument("dense_project_membership: ambient dimension mismatch");
  }
  return dense_project_membership_block(st, t, 0);
}

// Exact acceptance probability of the verification pipeline on the subspace
// state |B> under key spaces (V, W):
//   p = |B ∩ W^perp| / |B|  *  |(B ∩ W^perp)^perp ∩ V^perp| / |(B ∩ W^perp)^perp|.
inline DyadicProb acceptance_probability(const Subspace& b, const Subspace& v,
                                         const Subspace& w) {
  if (b.ambient_dim() != v.ambient_dim() || b.ambient_dim() != w.ambient_dim()) {
    throw std::invalid_argument("acceptance_probability: ambient dimension mismatch");
  }
  const Subspace b1 = intersect(b, complement(w));
  const DyadicProb p1 = DyadicProb::pow2(static_cast<unsigned>(b.dim() - b1.dim()));
  const Subspace b2 = complement(b1);
  const Subspace b3 = intersect(b2, complement(v));
  const DyadicProb p2 = DyadicProb::pow2(static_cast<unsigned>(b2.dim() - b3.dim()));
  return p1 * p2;
}

// A banknote's quantum register. Symbolic states that fail a projection have
// no coset-state description for the surviving branch; such notes are marked
// unusable and verify as rejected from then on.
struct QuantumNote {
  std::variant<CosetState, DenseState> state;
  bool usable = true;

  static QuantumNote coset(CosetState cs) { return {std::move(cs), true}; }
  static QuantumNote dense(DenseState st) { return {std::move(st), true}; }

  bool is_symbolic() const { return std::holds_alternative<CosetState>(state); }

  std::size_t ambient_dim() const {
    return is_symbolic() ? std::get<CosetState>(state).ambient_dim()
                         : std::get<DenseState>(state).qubits();
  }

  bool operator==(const QuantumNote&) const = default;
};

// Renders a symbolic note into amplitudes; dense notes pass through.
inline QuantumNote densify(QuantumNote note) {
  if (!note.is_symbolic()) return note;
  return {DenseState::from_coset(std::get<CosetState>(note.state)), note.usable};
}

struct QuantumVerdict {
  bool accepted = false;
  QuantumNote note;
};

namespace detail {

// Draws with the exact dyadic probability; consumes no randomness at 0 or 1.
inline bool bernoulli_dyadic(const DyadicProb& p, Rng& rng) {
  if (p.is_zero()) return false;
  if (p.is_one()) return true;
  return rng.bernoulli_pow2(p.neg_log2());
}

inline bool bernoulli_double(double p, Rng& rng) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return rng.uniform_double() < p;
}

}  // namespace detail

// Exact acceptance probability and post-acceptance state of the verification
// pipeline on a symbolic note, with no randomness involved. The accepted
// state is empty exactly when the probability is zero.
struct SymbolicVerification {
  DyadicProb accept_probability = DyadicProb::zero();
  std::optional<CosetState> accepted_state;
};

inline SymbolicVerification symbolic_acceptance(const CosetState& cs, const Subspace& v,
                                                const Subspace& w) {
  const SymbolicProjection s1 = project_membership(cs, complement(w));
  if (s1.accept_probability.is_zero()) return {};
  const CosetState mid = hadamard_all(*s1.accepted_state);
  const SymbolicProjection s2 = project_membership(mid, complement(v));
  if (s2.accept_probability.is_zero()) return {};
  return {s1.accept_probability * s2.accept_probability, hadamard_all(*s2.accepted_state)};
}

// The verification pipeline under key spaces (V, W): membership test against
// W^perp in the computational basis, then against V^perp in the Fourier
// basis, then back. Both backends; randomness is consumed only for outcomes
// strictly inside (0, 1), so honest verifications are deterministic.
inline QuantumVerdict quantum_verify(const Subspace& v, const Subspace& w, QuantumNote note,
                                     Rng& rng) {
  const Subspace w_perp = complement(w);
  const Subspace v_perp = complement(v);
  if (!note.usable) return {false, std::move(note)};

  if (note.is_symbolic()) {
    CosetState cs = std::get<CosetState>(std::move(note.state));
    const SymbolicProjection s1 = project_membership(cs, w_perp);
    if (!detail::bernoulli_dyadic(s1.accept_probability, rng)) {
      return {false, {std::move(cs), false}};
    }
    CosetState mid = hadamard_all(*s1.accepted_state);
    const SymbolicProjection s2 = project_membership(mid, v_perp);
    if (!detail::bernoulli_dyadic(s2.accept_probability, rng)) {
      return {false, {std::move(mid), false}};
    }
    return {true, QuantumNote::coset(hadamard_all(*s2.accepted_state))};
  }

  DenseState st = std::get<DenseState>(std::move(note.state));
  const DenseProjection o1 = dense_project_membership(st, w_perp);
  const bool ok1 = detail::bernoulli_double(o1.accept_probability, rng);
  st = ok1 ? *o1.accepted_state : *o1.rejected_state;
  st = dense_hadamard_all(std::move(st));
  const DenseProjection o2 = dense_project_membership(st, v_perp);
  const bool ok2 = detail::bernoulli_double(o2.accept_probability, rng);
  st = ok2 ? *o2.accepted_state : *o2.rejected_state;
  st = dense_hadamard_all(std::move(st));
  return {ok1 && ok2, QuantumNote::dense(std::move(st))};
}

// Verifies one n-qubit block of an entangled bundle in place. The bundle
// keeps evolving across calls, which is what sequential verification of
// entangled submissions means.
inline bool quantum_verify_joint(const Subspace& v, const Subspace& w, DenseState& joint,
                                 std::size_t block_index, Rng& rng) {
  const std::size_t n = v.ambient_dim();
  const std::size_t offset = block_index * n;
  const Subspace w_perp = complement(w);
  const Subspace v_perp = complement(v);

  const DenseProjection o1 = dense_project_membership_block(joint, w_perp, offset);
  const bool ok1 = detail::bernoulli_double(o1.accept_probability, rng);
  joint = ok1 ? *o1.accepted_state : *o1.rejected_state;
  joint = dense_hadamard_block(std::move(joint), offset, n);
  const DenseProjection o2 = dense_project_membership_block(joint, v_perp, offset);
  const bool ok2 = detail::bernoulli_double(o2.accept_probability, rng);
  joint = ok2 ? *o2.accepted_state : *o2.rejected_state;
  joint = dense_hadamard_block(std::move(joint), offset, n);
  return ok1 && ok2;
}

}  // namespace fqm
