#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fqm/error.hpp"
#include "fqm/gf2.hpp"
#include "fqm/qstate.hpp"
#include "fqm/rng.hpp"
#include "fqm/subspace.hpp"

namespace fqm {

// Parameters of the single-banknote scheme. Degenerate settings (t = 0,
// collusion_c = 0, big_n = collusion_c) are legal and exercised in tests.
struct SimpleParams {
  unsigned lambda = 128;
  std::size_t n = 0;            // ambient dimension, multiple of 4
  std::size_t t = 0;            // indices drawn per key side
  std::size_t big_n = 0;        // number of franchisable ids
  std::size_t collusion_c = 0;  // adversary's key budget in the games

  static std::size_t default_t(std::size_t n) {
    return static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  }

  static std::size_t default_collusion(std::size_t n, std::size_t t) {
    return t == 0 ? 0 : n / (4 * t);
  }

  static SimpleParams defaults_for(std::size_t n) {
    SimpleParams p;
    p.n = n;
    p.t = default_t(n);
    p.collusion_c = default_collusion(n, p.t);
    p.big_n = p.collusion_c + 8;
    return p;
  }

  void validate() const {
    if (lambda == 0) throw ConfigError("lambda", "must be positive");
    if (n == 0) throw ConfigError("n", "must be positive");
    if (n % 4 != 0) throw ConfigError("n", "must be a multiple of 4");
    if (big_n < collusion_c) {
      throw ConfigError("big_n", "must be at least collusion_c (" +
                                     std::to_string(collusion_c) + ")");
    }
  }
};

// Master secret key: the hidden subspace A, one candidate vector per index on
// each side, and the per-id index multisets fixed at setup time.
struct SimpleMsk {
  SimpleParams params;
  Subspace a;                                     // dim n/2
  Subspace a_perp;                                // complement(a), cached
  std::vector<BitVec> v_list;                     // n/2 vectors in A
  std::vector<BitVec> w_list;                     // n/2 vectors in A^perp
  std::vector<std::vector<std::size_t>> i_sets;   // per id, t indices into v_list
  std::vector<std::vector<std::size_t>> j_sets;   // per id, t indices into w_list
};

// Franchised verification key for one id.
struct SimpleSvk {
  std::size_t id = 0;
  std::size_t ambient_dim = 0;
  std::vector<std::size_t> i_set, j_set;
  std::vector<BitVec> v_subset, w_subset;

  Subspace v_span() const { return Subspace::span_of(ambient_dim, v_subset); }
  Subspace w_span() const { return Subspace::span_of(ambient_dim, w_subset); }
};

using SimpleBanknote = QuantumNote;

// Tracks which ids have been franchised; each id may be claimed once.
class IdLedger {
 public:
  explicit IdLedger(std::size_t big_n) : used_(big_n, false) {}

  void claim(std::size_t id) {
    if (id >= used_.size()) {
      throw std::invalid_argument("id " + std::to_string(id) + " out of range [0, " +
                                  std::to_string(used_.size()) + ")");
    }
    if (used_[id]) {
      throw std::invalid_argument("id " + std::to_string(id) + " already franchised");
    }
    used_[id] = true;
  }

  bool claimed(std::size_t id) const { return id < used_.size() && used_[id]; }

 private:
  std::vector<bool> used_;
};

// Draw order is part of the determinism contract: A, then v_list, then
// w_list, then for each id in order its I set then its J set. Index draws
// are with replacement, so a key's span may have dimension below t.
inline SimpleMsk setup(const SimpleParams& p, Rng& rng) {
  p.validate();
  SimpleMsk msk;
  msk.params = p;
  msk.a = sample_subspace(p.n, p.n / 2, rng);
  msk.a_perp = complement(msk.a);
  msk.v_list.reserve(p.n / 2);
  msk.w_list.reserve(p.n / 2);
  for (std::size_t i = 0; i < p.n / 2; ++i) msk.v_list.push_back(sample_vector_in(msk.a, rng));
  for (std::size_t j = 0; j < p.n / 2; ++j) {
    msk.w_list.push_back(sample_vector_in(msk.a_perp, rng));
  }
  msk.i_sets.resize(p.big_n);
  msk.j_sets.resize(p.big_n);
  for (std::size_t id = 0; id < p.big_n; ++id) {
    msk.i_sets[id].reserve(p.t);
    msk.j_sets[id].reserve(p.t);
    for (std::size_t k = 0; k < p.t; ++k) msk.i_sets[id].push_back(rng.uniform_index(p.n / 2));
    for (std::size_t k = 0; k < p.t; ++k) msk.j_sets[id].push_back(rng.uniform_index(p.n / 2));
  }
  return msk;
}

inline SimpleSvk franchise(const SimpleMsk& msk, std::size_t id, IdLedger& ledger) {
  ledger.claim(id);
  SimpleSvk svk;
  svk.id = id;
  svk.ambient_dim = msk.params.n;
  svk.i_set = msk.i_sets[id];
  svk.j_set = msk.j_sets[id];
  svk.v_subset.reserve(svk.i_set.size());
  svk.w_subset.reserve(svk.j_set.size());
  for (const std::size_t i : svk.i_set) svk.v_subset.push_back(msk.v_list[i]);
  for (const std::size_t j : svk.j_set) svk.w_subset.push_back(msk.w_list[j]);
  return svk;
}

// The simple scheme has no per-note randomness: every banknote is |A>.
inline SimpleBanknote mint(const SimpleMsk& msk) {
  return QuantumNote::coset(CosetState::subspace_state(msk.a));
}

inline SimpleBanknote mint_dense(const SimpleMsk& msk) {
  return QuantumNote::dense(DenseState::from_coset(CosetState::subspace_state(msk.a)));
}

inline QuantumVerdict verify(const SimpleSvk& svk, SimpleBanknote note, Rng& rng) {
  if (note.ambient_dim() != svk.ambient_dim) {
    throw std::invalid_argument("banknote ambient dimension " +
                                std::to_string(note.ambient_dim()) +
                                " does not match key dimension " +
                                std::to_string(svk.ambient_dim));
  }
  return quantum_verify(svk.v_span(), svk.w_span(), std::move(note), rng);
}

}  // namespace fqm
