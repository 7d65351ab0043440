#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "fqm/error.hpp"
#include "fqm/gf2.hpp"
#include "fqm/qstate.hpp"
#include "fqm/report.hpp"
#include "fqm/rng.hpp"
#include "fqm/scheme_full.hpp"
#include "fqm/scheme_simple.hpp"
#include "fqm/subspace.hpp"

namespace fqm {

// Ids are split with the colluding keys at the top: honest ids are
// [0, N - C), the adversary's are [N - C, N).

// Everything the adversary learns from its franchised keys.
struct AdversaryView {
  SimpleParams params;
  std::vector<SimpleSvk> keys;
  std::vector<std::size_t> i_adv, j_adv;  // sorted unions of the keys' index sets
  Subspace v_adv_space, w_adv_space;
};

inline AdversaryView view_from_keys(const SimpleParams& params,
                                    std::vector<SimpleSvk> keys) {
  if (keys.size() > params.collusion_c) {
    throw GameFault("adversary holds more keys than the collusion bound");
  }
  AdversaryView view{params, std::move(keys), {}, {}, Subspace::zero(params.n),
                     Subspace::zero(params.n)};
  std::set<std::size_t> is, js;
  std::vector<BitVec> vs, ws;
  for (const SimpleSvk& key : view.keys) {
    is.insert(key.i_set.begin(), key.i_set.end());
    js.insert(key.j_set.begin(), key.j_set.end());
    vs.insert(vs.end(), key.v_subset.begin(), key.v_subset.end());
    ws.insert(ws.end(), key.w_subset.begin(), key.w_subset.end());
  }
  view.i_adv.assign(is.begin(), is.end());
  view.j_adv.assign(js.begin(), js.end());
  view.v_adv_space = Subspace::span_of(params.n, vs);
  view.w_adv_space = Subspace::span_of(params.n, ws);
  return view;
}

// The colluding coalition's view: the top C keys of the msk.
inline AdversaryView make_adversary_view(const SimpleMsk& msk) {
  std::vector<SimpleSvk> keys;
  IdLedger ledger(msk.params.big_n);
  for (std::size_t k = 0; k < msk.params.collusion_c; ++k) {
    keys.push_back(franchise(msk, msk.params.big_n - msk.params.collusion_c + k, ledger));
  }
  return view_from_keys(msk.params, std::move(keys));
}

// Forged note |B> with V_adv <= B <= W_adv^perp: every key the adversary
// holds accepts it with certainty. extra_dims grows B beyond the minimal
// choice B = V_adv by uniformly chosen directions inside W_adv^perp.
inline SimpleBanknote adversary_self_forgery(const AdversaryView& view,
                                             std::size_t extra_dims, Rng& rng) {
  if (view.keys.empty()) throw std::invalid_argument("empty adversary view");
  const Subspace w_adv_perp = complement(view.w_adv_space);
  if (view.v_adv_space.dim() + extra_dims > w_adv_perp.dim()) {
    throw std::invalid_argument("extra_dims exceeds the forgeable corridor");
  }
  std::vector<BitVec> rows;
  GaussBasis tracker(view.params.n);
  for (std::size_t r = 0; r < view.v_adv_space.dim(); ++r) {
    rows.push_back(view.v_adv_space.basis_row(r));
    tracker.insert(rows.back());
  }
  const std::size_t target = view.v_adv_space.dim() + extra_dims;
  while (tracker.dim() < target) {
    BitVec candidate = sample_vector_in(w_adv_perp, rng);
    if (tracker.insert(candidate)) rows.push_back(std::move(candidate));
  }
  return QuantumNote::coset(
      CosetState::subspace_state(Subspace::span_of(view.params.n, rows)));
}

// Challenger side of the counterfeiting and sabotage games. Owns nothing; it
// is a budget-enforcing window onto the runner's msk and key table, and the
// only surface the adversary may touch (the hidden subspace stays private).
class Challenger {
 public:
  Challenger(const SimpleMsk& msk, const std::vector<SimpleSvk>& all_keys, Rng& rng)
      : msk_(&msk), keys_(&all_keys), rng_(&rng) {}

  const SimpleParams& params() const { return msk_->params; }
  std::size_t honest_count() const {
    return msk_->params.big_n - msk_->params.collusion_c;
  }

  // Hands out the colluding keys, top id first. At most C calls.
  const SimpleSvk& franchise_query() {
    if (handed_ == msk_->params.collusion_c) {
      throw GameFault("franchise budget exhausted");
    }
    return (*keys_)[honest_count() + handed_++];
  }

  SimpleBanknote mint_query() {
    ++mints_;
    return mint(*msk_);
  }

  std::pair<bool, SimpleBanknote> verify_query(std::size_t honest_id,
                                               SimpleBanknote note) {
    require_honest(honest_id);
    QuantumVerdict verdict = verify((*keys_)[honest_id], std::move(note), *rng_);
    return {verdict.accepted, std::move(verdict.note)};
  }

  std::size_t mint_count() const { return mints_; }
  std::size_t franchised() const { return handed_; }

  void require_honest(std::size_t id) const {
    if (id >= honest_count()) {
      throw GameFault("id " + std::to_string(id) + " is not an honest id");
    }
  }

 private:
  const SimpleMsk* msk_;
  const std::vector<SimpleSvk>* keys_;
  Rng* rng_;
  std::size_t mints_ = 0;
  std::size_t handed_ = 0;
};

// A challenge of u notes aimed at honest ids. Product-form submissions carry
// one note per id; entangled submissions carry a single dense register where
// note k lives on qubits [k*n, (k+1)*n).
struct IndependentNotes {
  std::vector<std::size_t> ids;
  std::vector<SimpleBanknote> notes;  // parallel to ids
};

struct JointNotes {
  std::vector<std::size_t> ids;
  DenseState joint;
};

using ChallengeSubmission = std::variant<IndependentNotes, JointNotes>;

class CounterfeitAdversary {
 public:
  virtual ~CounterfeitAdversary() = default;
  virtual ChallengeSubmission run(Challenger& challenger, Rng& rng) = 0;
  virtual std::string_view name() const = 0;
};

class SabotageAdversary {
 public:
  virtual ~SabotageAdversary() = default;
  struct Submission {
    SimpleBanknote note;
    std::size_t id1 = 0;
    std::size_t id2 = 1;
  };
  virtual Submission run(Challenger& challenger, Rng& rng) = 0;
  virtual std::string_view name() const = 0;
};

namespace detail {

// P(at least `threshold` of independent Bernoulli(p_k) succeed).
inline double at_least_probability(const std::vector<double>& ps, std::size_t threshold) {
  std::vector<double> dp(ps.size() + 1, 0.0);
  dp[0] = 1.0;
  std::size_t filled = 0;
  for (const double p : ps) {
    for (std::size_t j = filled + 1; j-- > 0;) {
      dp[j + 1] += dp[j] * p;
      dp[j] *= 1.0 - p;
    }
    ++filled;
  }
  double total = 0.0;
  for (std::size_t j = threshold; j < dp.size(); ++j) total += dp[j];
  return std::min(total, 1.0);
}

inline double exact_note_acceptance(const SimpleBanknote& note, const SimpleSvk& svk) {
  if (!note.usable) return 0.0;
  const CosetState& cs = std::get<CosetState>(note.state);
  return symbolic_acceptance(cs, svk.v_span(), svk.w_span()).accept_probability.to_double();
}

}  // namespace detail

struct CounterfeitOutcome {
  bool win = false;
  std::size_t accepted = 0;
  std::optional<double> win_probability;  // exact, for all-symbolic submissions
};

// Sequentially verifies the submission against the targeted honest keys.
// Winning means strictly more acceptances than banknotes were minted.
inline CounterfeitOutcome judge_counterfeit(const std::vector<SimpleSvk>& keys,
                                            std::size_t honest_count,
                                            std::size_t mint_count,
                                            const ChallengeSubmission& sub, Rng& rng) {
  CounterfeitOutcome out;
  if (const auto* ind = std::get_if<IndependentNotes>(&sub)) {
    if (ind->ids.size() != ind->notes.size()) {
      throw GameFault("challenge ids and notes differ in length");
    }
    for (const std::size_t id : ind->ids) {
      if (id >= honest_count) {
        throw GameFault("id " + std::to_string(id) + " is not an honest id");
      }
    }
    bool all_symbolic = true;
    std::vector<double> ps;
    for (std::size_t k = 0; k < ind->ids.size(); ++k) {
      all_symbolic = all_symbolic && ind->notes[k].is_symbolic();
      if (all_symbolic) {
        ps.push_back(detail::exact_note_acceptance(ind->notes[k], keys[ind->ids[k]]));
      }
    }
    for (std::size_t k = 0; k < ind->ids.size(); ++k) {
      out.accepted += verify(keys[ind->ids[k]], ind->notes[k], rng).accepted;
    }
    if (all_symbolic) {
      out.win_probability = detail::at_least_probability(ps, mint_count + 1);
    }
  } else {
    const auto& joint = std::get<JointNotes>(sub);
    for (const std::size_t id : joint.ids) {
      if (id >= honest_count) {
        throw GameFault("id " + std::to_string(id) + " is not an honest id");
      }
    }
    if (joint.ids.empty()) return out;
    const std::size_t n = keys[joint.ids[0]].ambient_dim;
    if (joint.joint.qubits() != joint.ids.size() * n) {
      throw GameFault("joint register does not hold one n-qubit block per id");
    }
    DenseState state = joint.joint;
    for (std::size_t k = 0; k < joint.ids.size(); ++k) {
      const SimpleSvk& svk = keys[joint.ids[k]];
      out.accepted += quantum_verify_joint(svk.v_span(), svk.w_span(), state, k, rng);
    }
  }
  out.win = out.accepted >= mint_count + 1;
  return out;
}

struct SabotageOutcome {
  bool win = false;
  bool first_accepted = false;
  bool second_accepted = false;
  std::optional<double> win_probability;  // exact, for symbolic notes
};

// First verification must accept and the second, run on the post-state with
// a different key, must reject.
inline SabotageOutcome judge_sabotage(const SimpleSvk& key1, const SimpleSvk& key2,
                                      SimpleBanknote note, Rng& rng) {
  SabotageOutcome out;
  if (note.is_symbolic()) {
    double win_probability = 0.0;
    if (note.usable) {
      const CosetState& cs = std::get<CosetState>(note.state);
      const SymbolicVerification first =
          symbolic_acceptance(cs, key1.v_span(), key1.w_span());
      if (!first.accept_probability.is_zero()) {
        const SymbolicVerification second = symbolic_acceptance(
            *first.accepted_state, key2.v_span(), key2.w_span());
        win_probability = first.accept_probability.to_double() *
                          (1.0 - second.accept_probability.to_double());
      }
    }
    out.win_probability = win_probability;
  }
  QuantumVerdict first = verify(key1, std::move(note), rng);
  out.first_accepted = first.accepted;
  if (!first.accepted) return out;
  QuantumVerdict second = verify(key2, std::move(first.note), rng);
  out.second_accepted = second.accepted;
  out.win = !second.accepted;
  return out;
}

// ---------------------------------------------------------------------------
// Built-in adversaries.

// Returns the banknotes it was given, untouched, plus one dead note (a note
// whose state was already destroyed by a failed measurement). The extra note
// can never be accepted, so this adversary never wins.
class HonestForwarder final : public CounterfeitAdversary {
 public:
  explicit HonestForwarder(std::size_t mints = 3) : mints_(mints) {}

  ChallengeSubmission run(Challenger& challenger, Rng& rng) override {
    IndependentNotes sub;
    for (std::size_t k = 0; k < mints_; ++k) {
      sub.ids.push_back(rng.uniform_index(challenger.honest_count()));
      sub.notes.push_back(challenger.mint_query());
    }
    SimpleBanknote junk =
        mints_ > 0 ? sub.notes.front()
                   : QuantumNote::coset(CosetState::subspace_state(
                         Subspace::zero(challenger.params().n)));
    junk.usable = false;
    sub.ids.push_back(rng.uniform_index(challenger.honest_count()));
    sub.notes.push_back(std::move(junk));
    return sub;
  }

  std::string_view name() const override { return "honest-forwarder"; }

 private:
  std::size_t mints_;
};

// Spends the whole franchise budget, forges |B> from the pooled key
// material, and submits clones of it on top of any honestly minted notes.
class SelfForgeryAdversary final : public CounterfeitAdversary {
 public:
  explicit SelfForgeryAdversary(std::size_t extra_dims = 0, std::size_t copies = 1,
                                std::size_t mints = 0)
      : extra_dims_(extra_dims), copies_(copies), mints_(mints) {}

  ChallengeSubmission run(Challenger& challenger, Rng& rng) override {
    std::vector<SimpleSvk> keys;
    for (std::size_t k = 0; k < challenger.params().collusion_c; ++k) {
      keys.push_back(challenger.franchise_query());
    }
    const AdversaryView view = view_from_keys(challenger.params(), std::move(keys));
    const SimpleBanknote forged = adversary_self_forgery(view, extra_dims_, rng);

    IndependentNotes sub;
    for (std::size_t k = 0; k < mints_; ++k) {
      sub.ids.push_back(rng.uniform_index(challenger.honest_count()));
      sub.notes.push_back(challenger.mint_query());
    }
    for (std::size_t k = 0; k < copies_; ++k) {
      sub.ids.push_back(rng.uniform_index(challenger.honest_count()));
      sub.notes.push_back(forged);  // clonable by simulation fiat
    }
    return sub;
  }

  std::string_view name() const override { return "self-forgery"; }

 private:
  std::size_t extra_dims_;
  std::size_t copies_;
  std::size_t mints_;
};

// Submits an honestly minted note. Both verifications accept with
// certainty, so sabotage never succeeds.
class HonestSabotager final : public SabotageAdversary {
 public:
  Submission run(Challenger& challenger, Rng& rng) override {
    Submission sub;
    sub.note = challenger.mint_query();
    sub.id1 = rng.uniform_index(challenger.honest_count());
    sub.id2 = (sub.id1 + 1 + rng.uniform_index(challenger.honest_count() - 1)) %
              challenger.honest_count();
    return sub;
  }
  std::string_view name() const override { return "honest"; }
};

// Submits |B> for a uniformly random subspace B.
class SubspaceSabotager final : public SabotageAdversary {
 public:
  Submission run(Challenger& challenger, Rng& rng) override {
    const std::size_t n = challenger.params().n;
    Submission sub;
    sub.note = QuantumNote::coset(
        CosetState::subspace_state(sample_subspace(n, rng.uniform_index(n + 1), rng)));
    sub.id1 = rng.uniform_index(challenger.honest_count());
    sub.id2 = (sub.id1 + 1 + rng.uniform_index(challenger.honest_count() - 1)) %
              challenger.honest_count();
    return sub;
  }
  std::string_view name() const override { return "subspace"; }
};

// Submits a Haar-random dense state; needs n within the dense cap.
class RandomDenseSabotager final : public SabotageAdversary {
 public:
  Submission run(Challenger& challenger, Rng& rng) override {
    Submission sub;
    sub.note = QuantumNote::dense(DenseState::random_state(challenger.params().n, rng));
    sub.id1 = rng.uniform_index(challenger.honest_count());
    sub.id2 = (sub.id1 + 1 + rng.uniform_index(challenger.honest_count() - 1)) %
              challenger.honest_count();
    return sub;
  }
  std::string_view name() const override { return "random-dense"; }
};

// ---------------------------------------------------------------------------
// Membership oracles and the key-twisting map behind the distinguishing game.

struct OracleQuery {
  std::size_t id = 0;
  bool s = false;  // 0: computational-basis side, 1: Fourier side
  BitVec x;
};

// Precomputed membership tables for one msk: the hidden subspace pair plus,
// per honest id, the duals of that id's key spans.
struct OracleTable {
  std::size_t honest_count = 0;
  Subspace a, a_perp;
  std::vector<Subspace> w_id_perp, v_id_perp;
};

inline OracleTable make_oracle_table(const SimpleMsk& msk, std::size_t honest_count) {
  OracleTable table{honest_count, msk.a, msk.a_perp, {}, {}};
  for (std::size_t id = 0; id < honest_count; ++id) {
    std::vector<BitVec> vs, ws;
    for (const std::size_t i : msk.i_sets[id]) vs.push_back(msk.v_list[i]);
    for (const std::size_t j : msk.j_sets[id]) ws.push_back(msk.w_list[j]);
    table.w_id_perp.push_back(complement(Subspace::span_of(msk.params.n, ws)));
    table.v_id_perp.push_back(complement(Subspace::span_of(msk.params.n, vs)));
  }
  return table;
}

namespace detail {

inline void require_oracle_id(const OracleTable& table, const OracleQuery& q) {
  if (q.id >= table.honest_count) {
    throw GameFault("oracle id " + std::to_string(q.id) + " is not an honest id");
  }
}

}  // namespace detail

// s = 0: membership in A; s = 1: membership in A^perp. The id is validated
// but does not change the answer.
inline bool oracle_full(const OracleTable& table, const OracleQuery& q) {
  detail::require_oracle_id(table, q);
  return q.s ? table.a_perp.contains(q.x) : table.a.contains(q.x);
}

// s = 0: membership in W_id^perp; s = 1: membership in V_id^perp. Accepts
// everything oracle_full accepts, and more.
inline bool oracle_fran(const OracleTable& table, const OracleQuery& q) {
  detail::require_oracle_id(table, q);
  return q.s ? table.v_id_perp[q.id].contains(q.x) : table.w_id_perp[q.id].contains(q.x);
}

// Applies the stabilizer element m to every key vector outside the
// adversary's index unions. The adversary's view is untouched, every other
// vector moves within its side of the pair (m preserves A and A^perp).
inline SimpleMsk m_of_msk(const SimpleMsk& msk, const GF2Matrix& m,
                          const std::vector<std::size_t>& i_adv,
                          const std::vector<std::size_t>& j_adv) {
  if (!is_space_automorphism(msk.a, m)) {
    throw std::invalid_argument("matrix does not stabilize the hidden subspace pair");
  }
  const std::size_t half = msk.params.n / 2;
  std::vector<bool> i_mask(half, false), j_mask(half, false);
  for (const std::size_t i : i_adv) i_mask.at(i) = true;
  for (const std::size_t j : j_adv) j_mask.at(j) = true;

  SimpleMsk out = msk;
  for (std::size_t i = 0; i < half; ++i) {
    if (!i_mask[i]) out.v_list[i] = m.mul_vec(msk.v_list[i]);
  }
  for (std::size_t j = 0; j < half; ++j) {
    if (!j_mask[j]) out.w_list[j] = m.mul_vec(msk.w_list[j]);
  }
  return out;
}

// A msk is good when every honest key strengthens the adversary's spans by
// at least t/4 dimensions on both sides. Compared as 4*gain >= t to stay in
// integers.
inline bool is_good_msk(const SimpleMsk& msk, const std::vector<std::size_t>& i_adv,
                        const std::vector<std::size_t>& j_adv,
                        std::size_t honest_count) {
  std::vector<BitVec> adv_vs, adv_ws;
  for (const std::size_t i : i_adv) adv_vs.push_back(msk.v_list.at(i));
  for (const std::size_t j : j_adv) adv_ws.push_back(msk.w_list.at(j));
  const Subspace v_adv = Subspace::span_of(msk.params.n, adv_vs);
  const Subspace w_adv = Subspace::span_of(msk.params.n, adv_ws);

  for (std::size_t id = 0; id < honest_count; ++id) {
    std::vector<BitVec> vs = adv_vs, ws = adv_ws;
    for (const std::size_t i : msk.i_sets[id]) vs.push_back(msk.v_list[i]);
    for (const std::size_t j : msk.j_sets[id]) ws.push_back(msk.w_list[j]);
    const std::size_t v_gain = Subspace::span_of(msk.params.n, vs).dim() - v_adv.dim();
    const std::size_t w_gain = Subspace::span_of(msk.params.n, ws).dim() - w_adv.dim();
    if (4 * v_gain < msk.params.t || 4 * w_gain < msk.params.t) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Distinguishers.

using OracleFn = std::function<bool(const OracleQuery&)>;

// Gets the msk in full; must tell the full-verification oracle from the
// franchised one built over a twisted msk.
class Distinguisher {
 public:
  virtual ~Distinguisher() = default;
  virtual bool run(const SimpleMsk& msk, std::size_t honest_count,
                   const OracleFn& oracle, Rng& rng) = 0;
  virtual std::string_view name() const = 0;
};

class CoinFlipDistinguisher final : public Distinguisher {
 public:
  bool run(const SimpleMsk&, std::size_t, const OracleFn&, Rng& rng) override {
    return rng.next_bit();
  }
  std::string_view name() const override { return "coin-flip"; }
};

// Probes random vectors outside A on the computational side. The full
// oracle rejects them all; any acceptance betrays the franchised oracle.
class MembershipScanDistinguisher final : public Distinguisher {
 public:
  explicit MembershipScanDistinguisher(std::size_t queries) : queries_(queries) {}

  bool run(const SimpleMsk& msk, std::size_t honest_count, const OracleFn& oracle,
           Rng& rng) override {
    if (honest_count == 0) return false;
    for (std::size_t q = 0; q < queries_; ++q) {
      BitVec x = random_bits(msk.params.n, rng);
      while (msk.a.contains(x)) x = random_bits(msk.params.n, rng);
      if (oracle({rng.uniform_index(honest_count), false, std::move(x)})) return true;
    }
    return false;
  }

  std::size_t queries() const { return queries_; }
  std::string_view name() const override { return "scan"; }

 private:
  std::size_t queries_;
};

// Queries only vectors inside A, which both oracles accept: advantage is
// exactly zero, demonstrating the one-sided blind spot.
class InsideSubspaceDistinguisher final : public Distinguisher {
 public:
  explicit InsideSubspaceDistinguisher(std::size_t queries) : queries_(queries) {}

  bool run(const SimpleMsk& msk, std::size_t honest_count, const OracleFn& oracle,
           Rng& rng) override {
    if (honest_count == 0) return false;
    for (std::size_t q = 0; q < queries_; ++q) {
      if (!oracle({rng.uniform_index(honest_count), false, sample_vector_in(msk.a, rng)})) {
        return true;  // unreachable: members of A pass both oracles
      }
    }
    return false;
  }

  std::string_view name() const override { return "inside"; }

 private:
  std::size_t queries_;
};

// ---------------------------------------------------------------------------
// Game runners. Every trial draws its own child rng from (seed, trial), so
// results are identical for any thread count.

namespace detail {

template <typename F>
inline void for_each_trial(std::size_t trials, unsigned threads, F&& fn) {
  if (threads <= 1 || trials <= 1) {
    for (std::size_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex fault_mutex;
  std::exception_ptr fault;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        fn(t);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(fault_mutex);
        if (!fault) fault = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(
      std::min<std::size_t>(threads, trials));
  pool.reserve(count);
  for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (fault) std::rethrow_exception(fault);
}

class TrialTimer {
 public:
  explicit TrialTimer(bool enabled) : enabled_(enabled) {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }
  std::optional<double> elapsed_ms() const {
    if (!enabled_) return std::nullopt;
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

inline std::vector<std::pair<std::string, std::string>> simple_config(
    const char* game, const SimpleParams& p, const char* backend,
    std::string_view adversary, std::size_t trials, std::uint64_t seed) {
  return {{"game", game},
          {"scheme", "simple"},
          {"backend", backend},
          {"n", std::to_string(p.n)},
          {"t", std::to_string(p.t)},
          {"big_n", std::to_string(p.big_n)},
          {"collusion_c", std::to_string(p.collusion_c)},
          {"adversary", std::string(adversary)},
          {"trials", std::to_string(trials)},
          {"seed", std::to_string(seed)}};
}

}  // namespace detail

struct RunOptions {
  unsigned threads = 1;
  bool timing = false;
};

// Fraction of honest (setup, franchise, mint, verify) cycles that accept,
// plus the worst post-state infidelity seen.
inline GameResult run_correctness_simple(const SimpleParams& p, std::size_t trials,
                                         Rng& rng, bool dense = false,
                                         RunOptions options = {}) {
  p.validate();
  GameResult result;
  result.game = "correctness.simple";
  result.config = detail::simple_config("correctness.simple", p,
                                        dense ? "dense" : "symbolic", "none", trials,
                                        rng.seed());
  result.rows.resize(trials);
  std::vector<double> infidelity(trials, 0.0);

  detail::for_each_trial(trials, options.threads, [&](std::size_t trial) {
    const detail::TrialTimer timer(options.timing);
    Rng tr = rng.child(trial);
    const SimpleMsk msk = setup(p, tr);
    IdLedger ledger(p.big_n);
    const SimpleSvk svk = franchise(msk, tr.uniform_index(p.big_n), ledger);
    const SimpleBanknote note = dense ? mint_dense(msk) : mint(msk);
    const QuantumVerdict verdict = verify(svk, note, tr);

    TrialRow& row = result.rows[trial];
    row.trial = trial;
    row.seed = tr.seed();
    row.outcome = verdict.accepted;
    if (dense) {
      const double ov = overlap(std::get<DenseState>(note.state),
                                std::get<DenseState>(verdict.note.state));
      infidelity[trial] = std::max(0.0, 1.0 - ov * ov);
    } else {
      row.probability =
          detail::exact_note_acceptance(note, svk);
      infidelity[trial] = verdict.note == note ? 0.0 : 1.0;
    }
    row.wall_ms = timer.elapsed_ms();
  });

  result.trials = trials;
  for (const TrialRow& row : result.rows) result.wins += row.outcome;
  result.finalize();
  double max_infidelity = 0.0;
  for (const double f : infidelity) max_infidelity = std::max(max_infidelity, f);
  result.stats.emplace_back("max_infidelity", max_infidelity);
  return result;
}

inline GameResult run_correctness_full(const FullParams& p, const CryptoSuite& crypto,
                                       std::size_t trials, Rng& rng, bool dense = false,
                                       RunOptions options = {}) {
  p.validate();
  GameResult result;
  result.game = "correctness.full";
  result.config = {{"game", "correctness.full"},
                   {"scheme", "full"},
                   {"backend", dense ? "dense" : "symbolic"},
                   {"crypto", std::string(crypto.name)},
                   {"n", std::to_string(p.n)},
                   {"t", std::to_string(p.t)},
                   {"adversary", "none"},
                   {"trials", std::to_string(trials)},
                   {"seed", std::to_string(rng.seed())}};
  result.rows.resize(trials);
  std::vector<double> infidelity(trials, 0.0);

  detail::for_each_trial(trials, options.threads, [&](std::size_t trial) {
    const detail::TrialTimer timer(options.timing);
    Rng tr = rng.child(trial);
    const FullMsk msk = setup(p, crypto, tr);
    const FullSvk svk = franchise(msk, tr);
    const FullBanknote note = dense ? mint_dense(msk, tr) : mint(msk, tr);
    const FullVerdict verdict = verify(svk, note, tr);

    TrialRow& row = result.rows[trial];
    row.trial = trial;
    row.seed = tr.seed();
    row.outcome = verdict.accepted && verdict.reason == RejectReason::none;
    if (dense) {
      const double ov = overlap(std::get<DenseState>(note.state.state),
                                std::get<DenseState>(verdict.note.state.state));
      infidelity[trial] = std::max(0.0, 1.0 - ov * ov);
    } else {
      infidelity[trial] = verdict.note == note ? 0.0 : 1.0;
    }
    row.wall_ms = timer.elapsed_ms();
  });

  result.trials = trials;
  for (const TrialRow& row : result.rows) result.wins += row.outcome;
  result.finalize();
  double max_infidelity = 0.0;
  for (const double f : infidelity) max_infidelity = std::max(max_infidelity, f);
  result.stats.emplace_back("max_infidelity", max_infidelity);
  return result;
}

// One counterfeiting game per trial: fresh msk, adversary drives the
// challenger, judge counts acceptances against the mint count.
inline GameResult run_counterfeit_game(CounterfeitAdversary& adversary,
                                       const SimpleParams& p, std::size_t trials,
                                       Rng& rng, RunOptions options = {}) {
  p.validate();
  if (p.big_n == p.collusion_c) {
    throw ConfigError("big_n", "counterfeiting needs at least one honest id");
  }
  GameResult result;
  result.game = "counterfeit";
  result.config = detail::simple_config("counterfeit", p, "symbolic",
                                        adversary.name(), trials, rng.seed());
  result.rows.resize(trials);

  detail::for_each_trial(trials, options.threads, [&](std::size_t trial) {
    const detail::TrialTimer timer(options.timing);
    Rng tr = rng.child(trial);
    const SimpleMsk msk = setup(p, tr);
    std::vector<SimpleSvk> keys;
    IdLedger ledger(p.big_n);
    for (std::size_t id = 0; id < p.big_n; ++id) keys.push_back(franchise(msk, id, ledger));

    Challenger challenger(msk, keys, tr);
    const ChallengeSubmission sub = adversary.run(challenger, tr);
    const CounterfeitOutcome outcome =
        judge_counterfeit(keys, challenger.honest_count(), challenger.mint_count(), sub, tr);

    TrialRow& row = result.rows[trial];
    row.trial = trial;
    row.seed = tr.seed();
    row.outcome = outcome.win;
    row.probability = outcome.win_probability;
    row.wall_ms = timer.elapsed_ms();
  });

  result.trials = trials;
  for (const TrialRow& row : result.rows) result.wins += row.outcome;
  result.finalize();
  return result;
}

// Builds the bank's own verification key: V = A, W = A^perp. Under it,
// verification projects onto |A> exactly, so a second test always agrees.
inline SimpleSvk full_verification_key(const SimpleMsk& msk) {
  SimpleSvk svk;
  svk.id = 0;
  svk.ambient_dim = msk.params.n;
  for (std::size_t r = 0; r < msk.a.dim(); ++r) svk.v_subset.push_back(msk.a.basis_row(r));
  for (std::size_t r = 0; r < msk.a_perp.dim(); ++r) {
    svk.w_subset.push_back(msk.a_perp.basis_row(r));
  }
  return svk;
}

// One sabotage attempt per trial: accept under id1's key, then fail under
// id2's key on the post-state. full_keys swaps both franchised keys for the
// bank's full key.
inline GameResult run_sabotage_game(SabotageAdversary& adversary, const SimpleParams& p,
                                    std::size_t trials, Rng& rng, bool full_keys = false,
                                    RunOptions options = {}) {
  p.validate();
  if (p.big_n - p.collusion_c < 2) {
    throw ConfigError("big_n", "sabotage needs at least two honest ids");
  }
  GameResult result;
  result.game = full_keys ? "sabotage.full-keys" : "sabotage";
  result.config = detail::simple_config(result.game.c_str(), p, "symbolic",
                                        adversary.name(), trials, rng.seed());
  result.rows.resize(trials);

  detail::for_each_trial(trials, options.threads, [&](std::size_t trial) {
    const detail::TrialTimer timer(options.timing);
    Rng tr = rng.child(trial);
    const SimpleMsk msk = setup(p, tr);
    std::vector<SimpleSvk> keys;
    IdLedger ledger(p.big_n);
    for (std::size_t id = 0; id < p.big_n; ++id) keys.push_back(franchise(msk, id, ledger));

    Challenger challenger(msk, keys, tr);
    const SabotageAdversary::Submission sub = adversary.run(challenger, tr);
    if (sub.id1 == sub.id2) throw GameFault("sabotage ids must differ");
    challenger.require_honest(sub.id1);
    challenger.require_honest(sub.id2);

    const SimpleSvk bank_key = full_keys ? full_verification_key(msk) : SimpleSvk{};
    const SimpleSvk& key1 = full_keys ? bank_key : keys[sub.id1];
    const SimpleSvk& key2 = full_keys ? bank_key : keys[sub.id2];
    const SabotageOutcome outcome = judge_sabotage(key1, key2, sub.note, tr);

    TrialRow& row = result.rows[trial];
    row.trial = trial;
    row.seed = tr.seed();
    row.outcome = outcome.win;
    row.probability = outcome.win_probability;
    row.wall_ms = timer.elapsed_ms();
  });

  result.trials = trials;
  for (const TrialRow& row : result.rows) result.wins += row.outcome;
  result.finalize();
  return result;
}

// Per trial: hidden bit b and stabilizer element M; the adversary queries
// the full oracle (b = 0) or the franchised oracle over M(msk) (b = 1).
// Wins count correct guesses; the advantage statistic is the gap between
// the two arms' guess rates.
inline GameResult run_distinguish_game(Distinguisher& adversary, const SimpleMsk& msk,
                                       std::size_t trials, Rng& rng,
                                       RunOptions options = {}) {
  const std::size_t honest_count = msk.params.big_n - msk.params.collusion_c;
  const AdversaryView coalition = make_adversary_view(msk);

  GameResult result;
  result.game = "distinguish";
  result.config = detail::simple_config("distinguish", msk.params, "symbolic",
                                        adversary.name(), trials, rng.seed());
  result.rows.resize(trials);
  const OracleTable full_table = make_oracle_table(msk, honest_count);

  detail::for_each_trial(trials, options.threads, [&](std::size_t trial) {
    const detail::TrialTimer timer(options.timing);
    Rng tr = rng.child(trial);
    const bool b = tr.next_bit();
    const GF2Matrix m = sample_automorphism(msk.a, tr);

    bool guess;
    if (b) {
      const OracleTable twisted_table =
          make_oracle_table(m_of_msk(msk, m, coalition.i_adv, coalition.j_adv), honest_count);
      const OracleFn oracle = [&](const OracleQuery& q) {
        return oracle_fran(twisted_table, q);
      };
      guess = adversary.run(msk, honest_count, oracle, tr);
    } else {
      const OracleFn oracle = [&](const OracleQuery& q) {
        return oracle_full(full_table, q);
      };
      guess = adversary.run(msk, honest_count, oracle, tr);
    }

    TrialRow& row = result.rows[trial];
    row.trial = trial;
    row.seed = tr.seed();
    row.challenge = b ? 1 : 0;
    row.outcome = guess;
    row.wall_ms = timer.elapsed_ms();
  });

  result.trials = trials;
  std::size_t n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (const TrialRow& row : result.rows) {
    const bool b = row.challenge == 1;
    result.wins += (row.outcome == b);
    (b ? n1 : n0) += 1;
    if (row.outcome) (b ? s1 : s0) += 1;
  }
  result.finalize();
  const double rate0 = n0 == 0 ? 0.0 : static_cast<double>(s0) / static_cast<double>(n0);
  const double rate1 = n1 == 0 ? 0.0 : static_cast<double>(s1) / static_cast<double>(n1);
  result.stats.emplace_back("guess_fran_given_full", rate0);
  result.stats.emplace_back("guess_fran_given_fran", rate1);
  result.stats.emplace_back("advantage", std::abs(rate0 - rate1));
  return result;
}

}  // namespace fqm
