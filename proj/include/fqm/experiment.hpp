#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fqm/error.hpp"
#include "fqm/games.hpp"
#include "fqm/report.hpp"
#include "fqm/rng.hpp"
#include "fqm/scheme_full.hpp"
#include "fqm/scheme_simple.hpp"

namespace fqm {

// ---------------------------------------------------------------------------
// Experiment configuration: one struct covering every game, filled from the
// command line or a config file. Unset size fields take the scheme defaults
// for n.

struct ExperimentConfig {
  std::string game = "correctness";  // correctness | counterfeit | sabotage | distinguish
  std::string scheme = "simple";     // simple | full
  std::string backend = "symbolic";  // symbolic | dense
  std::string adversary;             // empty: the game's default strategy
  std::string crypto = "test";       // full scheme only
  std::size_t n = 16;
  std::optional<std::size_t> t, big_n, collusion_c;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t queries = 100;          // distinguishers
  std::size_t extra_dims = 0;         // self-forgery
  std::size_t copies = 1;             // self-forgery
  std::optional<std::size_t> mints;   // counterfeit adversaries
  bool full_keys = false;             // sabotage under the bank's key
  unsigned threads = 1;
  bool timing = false;

  SimpleParams simple_params() const {
    SimpleParams p = SimpleParams::defaults_for(n);
    if (t) p.t = *t;
    if (big_n) p.big_n = *big_n;
    if (collusion_c) p.collusion_c = *collusion_c;
    p.validate();
    return p;
  }

  FullParams full_params() const {
    FullParams p = FullParams::defaults_for(n);
    if (t) p.t = *t;
    p.validate();
    return p;
  }

  std::string resolved_adversary() const {
    if (!adversary.empty()) return adversary;
    if (game == "counterfeit") return "self-forgery";
    if (game == "sabotage") return "subspace";
    if (game == "distinguish") return "scan";
    return "none";
  }

  void validate() const {
    if (scheme != "simple" && scheme != "full") {
      throw ConfigError("scheme", "must be 'simple' or 'full'");
    }
    if (backend != "symbolic" && backend != "dense") {
      throw ConfigError("backend", "must be 'symbolic' or 'dense'");
    }
    const bool attack =
        game == "counterfeit" || game == "sabotage" || game == "distinguish";
    if (game != "correctness" && !attack) {
      throw ConfigError("game", "unknown game '" + game + "'");
    }
    if (attack && scheme == "full") {
      throw ConfigError("game", "attack games run on the simple scheme");
    }
    if (attack && backend == "dense") {
      throw ConfigError("backend", "attack games use the symbolic backend");
    }
    if (backend == "dense" && n > kDenseQubitCap) {
      throw ConfigError("n", "dense backend caps n at " + std::to_string(kDenseQubitCap));
    }
    if (threads == 0) throw ConfigError("threads", "must be at least 1");

    const std::string adv = resolved_adversary();
    const auto allow = [&](std::initializer_list<std::string_view> names) {
      if (std::find(names.begin(), names.end(), adv) == names.end()) {
        throw ConfigError("adversary",
                          "unknown adversary '" + adv + "' for game '" + game + "'");
      }
    };
    if (game == "correctness") allow({"none"});
    if (game == "counterfeit") allow({"self-forgery", "honest-forwarder"});
    if (game == "sabotage") allow({"honest", "subspace", "random-dense"});
    if (game == "distinguish") allow({"coin-flip", "scan", "inside"});
    if (adv == "random-dense" && n > kDenseQubitCap) {
      throw ConfigError("n", "the random-dense adversary caps n at " +
                                 std::to_string(kDenseQubitCap));
    }

    if (scheme == "simple") {
      const SimpleParams p = simple_params();
      if (game == "counterfeit" && adv == "self-forgery" && p.collusion_c == 0) {
        throw ConfigError("collusion_c", "self-forgery needs at least one colluding key");
      }
    } else {
      full_params();
      crypto_by_name(crypto);
    }
  }
};

// Runs the configured game end to end and returns the trial table, with the
// adversary's knobs appended to the config echo.
inline GameResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Rng master(cfg.seed);
  const RunOptions options{cfg.threads, cfg.timing};
  const std::string adv = cfg.resolved_adversary();

  if (cfg.game == "correctness") {
    if (cfg.scheme == "simple") {
      return run_correctness_simple(cfg.simple_params(), cfg.trials, master,
                                    cfg.backend == "dense", options);
    }
    return run_correctness_full(cfg.full_params(), crypto_by_name(cfg.crypto),
                                cfg.trials, master, cfg.backend == "dense", options);
  }

  if (cfg.game == "counterfeit") {
    const SimpleParams p = cfg.simple_params();
    GameResult result;
    if (adv == "honest-forwarder") {
      const std::size_t mints = cfg.mints.value_or(3);
      HonestForwarder adversary(mints);
      result = run_counterfeit_game(adversary, p, cfg.trials, master, options);
      result.config.emplace_back("mints", std::to_string(mints));
    } else {
      const std::size_t mints = cfg.mints.value_or(0);
      SelfForgeryAdversary adversary(cfg.extra_dims, cfg.copies, mints);
      result = run_counterfeit_game(adversary, p, cfg.trials, master, options);
      result.config.emplace_back("extra_dims", std::to_string(cfg.extra_dims));
      result.config.emplace_back("copies", std::to_string(cfg.copies));
      result.config.emplace_back("mints", std::to_string(mints));
    }
    return result;
  }

  if (cfg.game == "sabotage") {
    const SimpleParams p = cfg.simple_params();
    HonestSabotager honest;
    SubspaceSabotager subspace;
    RandomDenseSabotager random_dense;
    SabotageAdversary* adversary = &subspace;
    if (adv == "honest") adversary = &honest;
    if (adv == "random-dense") adversary = &random_dense;
    GameResult result =
        run_sabotage_game(*adversary, p, cfg.trials, master, cfg.full_keys, options);
    result.config.emplace_back("full_keys", cfg.full_keys ? "true" : "false");
    return result;
  }

  // distinguish: the adversary sees the msk itself, so one msk per run.
  const SimpleParams p = cfg.simple_params();
  const SimpleMsk msk = setup(p, master);
  CoinFlipDistinguisher coin;
  MembershipScanDistinguisher scan(cfg.queries);
  InsideSubspaceDistinguisher inside(cfg.queries);
  Distinguisher* adversary = &scan;
  if (adv == "coin-flip") adversary = &coin;
  if (adv == "inside") adversary = &inside;
  GameResult result = run_distinguish_game(*adversary, msk, cfg.trials, master, options);
  if (adv != "coin-flip") {
    result.config.emplace_back("queries", std::to_string(cfg.queries));
  }
  return result;
}

// JSON report: config echo, summary with interval, named statistics, and an
// environment stamp. Nothing here depends on wall time or host identity, so
// reruns are byte-identical.
inline nlohmann::json report_json(const GameResult& r) {
  nlohmann::json j;
  j["game"] = r.game;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [key, value] : r.config) cfg[key] = value;
  j["config"] = cfg;
  j["summary"] = {{"trials", r.trials},
                  {"wins", r.wins},
                  {"win_rate", r.win_rate},
                  {"wilson95_low", r.interval.low},
                  {"wilson95_high", r.interval.high}};
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [key, value] : r.stats) stats[key] = value;
  j["stats"] = stats;
  j["environment"] = {{"implementation", "fqm"},
                      {"version", "1.0.0"},
                      {"rng", "mt19937_64"},
                      {"probabilities", "exact-dyadic"}};
  return j;
}

// ---------------------------------------------------------------------------
// File helpers.

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

inline Bytes read_binary_file(const std::string& path) {
  const std::string text = read_text_file(path);
  return Bytes(text.begin(), text.end());
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ParseError("cannot write file: " + path);
}

inline void write_binary_file(const std::string& path, const Bytes& content) {
  write_text_file(path,
                  std::string_view(reinterpret_cast<const char*>(content.data()),
                                   content.size()));
}

// ---------------------------------------------------------------------------
// Simple-scheme key and note files. Notes reuse the coset-state text fixture
// format; keys are JSON with bit-string vectors.

namespace detail {

inline BitVec parse_bit_string(const std::string& s, std::size_t expected,
                               const char* field) {
  if (s.size() != expected) {
    throw ParseError(std::string("key file: ") + field + " has width " +
                     std::to_string(s.size()) + ", expected " + std::to_string(expected));
  }
  return BitVec::from_string(s);
}

}  // namespace detail

inline std::string simple_svk_to_json(const SimpleSvk& svk) {
  nlohmann::json j;
  j["ambient_dim"] = svk.ambient_dim;
  j["id"] = svk.id;
  j["i_set"] = svk.i_set;
  j["j_set"] = svk.j_set;
  const auto strings = [](const std::vector<BitVec>& vs) {
    std::vector<std::string> out;
    out.reserve(vs.size());
    for (const BitVec& v : vs) out.push_back(v.to_string());
    return out;
  };
  j["v_subset"] = strings(svk.v_subset);
  j["w_subset"] = strings(svk.w_subset);
  return j.dump(2) + "\n";
}

inline SimpleSvk simple_svk_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("key file: ") + e.what());
  }
  try {
    SimpleSvk svk;
    svk.ambient_dim = j.at("ambient_dim").get<std::size_t>();
    svk.id = j.at("id").get<std::size_t>();
    svk.i_set = j.at("i_set").get<std::vector<std::size_t>>();
    svk.j_set = j.at("j_set").get<std::vector<std::size_t>>();
    for (const auto& s : j.at("v_subset").get<std::vector<std::string>>()) {
      svk.v_subset.push_back(detail::parse_bit_string(s, svk.ambient_dim, "v_subset"));
    }
    for (const auto& s : j.at("w_subset").get<std::vector<std::string>>()) {
      svk.w_subset.push_back(detail::parse_bit_string(s, svk.ambient_dim, "w_subset"));
    }
    return svk;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("key file: ") + e.what());
  }
}

inline std::string simple_note_to_text(const SimpleBanknote& note) {
  if (!note.usable) {
    throw std::invalid_argument("cannot serialize a note whose state was lost to measurement");
  }
  if (!note.is_symbolic()) {
    throw std::invalid_argument("simple-scheme note files hold symbolic states only");
  }
  return std::get<CosetState>(note.state).to_text();
}

inline SimpleBanknote simple_note_from_text(const std::string& text) {
  return QuantumNote::coset(CosetState::from_text(text));
}

// ---------------------------------------------------------------------------
// Full-scheme key files, bit-exact:
//   "FQK1" | version u8 | n u16 BE | crypto name u8 length + bytes
//   | u32 BE length || sig_pk | count u16 BE (= t)
//   | t x u16 BE i_set | t x u16 BE j_set
//   | t x (u32 BE length || v_key) | t x (u32 BE length || w_key)

inline constexpr std::uint8_t kKeyFileVersion = 1;

inline Bytes serialize_svk(const FullSvk& svk) {
  if (svk.crypto == nullptr) throw std::invalid_argument("serialize_svk: missing crypto suite");
  if (svk.n == 0 || svk.n > 65535 || svk.i_set.size() != svk.j_set.size() ||
      svk.v_keys.size() != svk.i_set.size() || svk.w_keys.size() != svk.j_set.size()) {
    throw std::invalid_argument("serialize_svk: malformed key");
  }
  detail::ByteWriter w;
  w.bytes({'F', 'Q', 'K', '1'});
  w.u8(kKeyFileVersion);
  w.u16be(static_cast<std::uint16_t>(svk.n));
  const std::string_view name = svk.crypto->name;
  w.u8(static_cast<std::uint8_t>(name.size()));
  w.bytes(Bytes(name.begin(), name.end()));
  w.u32be(static_cast<std::uint32_t>(svk.sig_pk.size()));
  w.bytes(svk.sig_pk);
  w.u16be(static_cast<std::uint16_t>(svk.i_set.size()));
  for (const std::size_t i : svk.i_set) w.u16be(static_cast<std::uint16_t>(i));
  for (const std::size_t j : svk.j_set) w.u16be(static_cast<std::uint16_t>(j));
  for (const EncKey& k : svk.v_keys) {
    w.u32be(static_cast<std::uint32_t>(k.key.size()));
    w.bytes(k.key);
  }
  for (const EncKey& k : svk.w_keys) {
    w.u32be(static_cast<std::uint32_t>(k.key.size()));
    w.bytes(k.key);
  }
  return w.take();
}

inline FullSvk deserialize_svk(const Bytes& buf) {
  detail::ByteReader r(buf, "key file");
  const Bytes magic = r.bytes(4, "magic");
  if (magic != Bytes{'F', 'Q', 'K', '1'}) throw ParseError("key file: bad magic");
  if (r.u8("version") != kKeyFileVersion) throw ParseError("key file: unsupported version");
  FullSvk svk;
  svk.n = r.u16be("n");
  if (svk.n == 0 || svk.n % 4 != 0) throw ParseError("key file: invalid n");
  const std::size_t name_len = r.u8("crypto name length");
  const Bytes name_bytes = r.bytes(name_len, "crypto name");
  const std::string name(name_bytes.begin(), name_bytes.end());
  try {
    svk.crypto = &crypto_by_name(name);
  } catch (const ConfigError&) {
    throw ParseError("key file: unknown crypto suite '" + name + "'");
  }
  svk.sig_pk = r.bytes(r.u32be("sig_pk length"), "sig_pk");
  const std::size_t count = r.u16be("index count");
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = r.u16be("i_set entry");
    if (i >= svk.n / 2) throw ParseError("key file: i_set entry out of range");
    svk.i_set.push_back(i);
  }
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = r.u16be("j_set entry");
    if (j >= svk.n / 2) throw ParseError("key file: j_set entry out of range");
    svk.j_set.push_back(j);
  }
  for (std::size_t k = 0; k < count; ++k) {
    svk.v_keys.push_back({r.bytes(r.u32be("v_key length"), "v_key")});
  }
  for (std::size_t k = 0; k < count; ++k) {
    svk.w_keys.push_back({r.bytes(r.u32be("w_key length"), "w_key")});
  }
  if (!r.done()) throw ParseError("key file: trailing bytes");
  return svk;
}

// ---------------------------------------------------------------------------
// Deterministic substreams for the file workflow: the bank at `seed` mints
// with substream 0 and franchises id k with substream k + 1, so separate
// invocations agree on the same bank.

inline constexpr std::uint64_t kMintStream = 0;

inline Rng full_scheme_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(seed).child(stream);
}

// ---------------------------------------------------------------------------
// Self test: fast named invariant checks across both backends.

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline void expect(bool condition, const std::string& what) {
  if (!condition) throw std::runtime_error(what);
}

inline double stat_or_nan(const GameResult& r, std::string_view key) {
  for (const auto& [k, v] : r.stats) {
    if (k == key) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline void selftest_hadamard_duality() {
  Rng rng(1);
  for (int rep = 0; rep < 150; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(11);
    const Subspace a = sample_subspace(n, rng.uniform_index(n + 1), rng);
    const CosetState state = CosetState::subspace_state(a);
    const CosetState dual = hadamard_all(state);
    expect(dual == CosetState::subspace_state(complement(a)), "symbolic dual mismatch");
    expect(hadamard_all(dual) == state, "hadamard-all is not an involution");
    const double fidelity = overlap(dense_hadamard_all(DenseState::from_coset(state)),
                                    DenseState::from_coset(dual));
    expect(fidelity >= 1.0 - 1e-10, "dense dual fidelity below 1 - 1e-10");
  }
}

inline void selftest_acceptance_closed_form() {
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + rng.uniform_index(7);
    const Subspace b = sample_subspace(n, rng.uniform_index(n + 1), rng);
    const Subspace v = sample_subspace(n, rng.uniform_index(n / 2 + 1), rng);
    const Subspace w = sample_subspace(n, rng.uniform_index(n / 2 + 1), rng);
    const double closed = acceptance_probability(b, v, w).to_double();

    double dense = 0.0;
    const DenseProjection o1 = dense_project_membership(
        DenseState::from_coset(CosetState::subspace_state(b)), complement(w));
    if (o1.accepted_state) {
      const DenseProjection o2 = dense_project_membership(
          dense_hadamard_all(*o1.accepted_state), complement(v));
      dense = o1.accept_probability * o2.accept_probability;
    }
    expect(std::abs(closed - dense) <= 1e-10, "closed form diverges from dense pipeline");
  }
}

inline void selftest_simple_correctness() {
  for (const std::size_t n : {std::size_t{8}, std::size_t{16}, std::size_t{36},
                              std::size_t{64}}) {
    Rng rng(3);
    const GameResult r = run_correctness_simple(SimpleParams::defaults_for(n), 25, rng);
    expect(r.win_rate == 1.0, "honest verification rejected at n = " + std::to_string(n));
    expect(stat_or_nan(r, "max_infidelity") == 0.0, "post-state drifted");
  }
}

inline void selftest_full_correctness_binding() {
  const FullParams p = FullParams::defaults_for(16);
  const CryptoSuite& crypto = test_crypto();
  Rng rng(4);
  for (int rep = 0; rep < 40; ++rep) {
    const FullMsk msk = setup(p, crypto, rng);
    const FullSvk svk = franchise(msk, rng);
    const FullBanknote note = mint(msk, rng);
    expect(verify(svk, note, rng).accepted, "honest full verification rejected");

    FullBanknote tampered = note;
    if (rng.next_bit() && !tampered.signature.empty()) {
      tampered.signature[rng.uniform_index(tampered.signature.size())] ^=
          static_cast<std::uint8_t>(1u << rng.uniform_index(8));
    } else {
      Bytes& ct = tampered.ciphertexts[rng.uniform_index(tampered.ciphertexts.size())];
      ct[rng.uniform_index(ct.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform_index(8));
    }
    const FullVerdict verdict = verify(svk, tampered, rng);
    expect(!verdict.accepted && verdict.reason == RejectReason::signature,
           "classical mutation not caught at the signature step");
  }
}

inline void selftest_wire_round_trip() {
  const CryptoSuite& crypto = test_crypto();
  Rng rng(5);
  for (const std::size_t n : {std::size_t{4}, std::size_t{8}, std::size_t{16}}) {
    const FullParams p = FullParams::defaults_for(n);
    for (int rep = 0; rep < 10; ++rep) {
      const FullMsk msk = setup(p, crypto, rng);
      const FullBanknote note = n <= 8 && rep % 2 == 1 ? mint_dense(msk, rng) : mint(msk, rng);
      expect(deserialize(serialize(note)) == note, "wire round trip changed the note");
    }
  }
}

inline void selftest_one_sidedness() {
  const SimpleParams p8 = SimpleParams::defaults_for(8);
  Rng rng(6);
  const SimpleMsk msk8 = setup(p8, rng);
  const std::size_t honest8 = p8.big_n - p8.collusion_c;
  const OracleTable table8 = make_oracle_table(msk8, honest8);
  for (std::size_t id = 0; id < honest8; ++id) {
    for (std::uint64_t idx = 0; idx < 256; ++idx) {
      BitVec x(8);
      for (std::size_t b = 0; b < 8; ++b) x.set(b, (idx >> b) & 1u);
      for (const bool s : {false, true}) {
        const OracleQuery q{id, s, x};
        expect(!(oracle_full(table8, q) && !oracle_fran(table8, q)),
               "one-sidedness violated at n = 8");
      }
    }
  }

  const SimpleParams p64 = SimpleParams::defaults_for(64);
  const SimpleMsk msk64 = setup(p64, rng);
  const std::size_t honest64 = p64.big_n - p64.collusion_c;
  const OracleTable table64 = make_oracle_table(msk64, honest64);
  for (int rep = 0; rep < 100000; ++rep) {
    const OracleQuery q{rng.uniform_index(honest64), rng.next_bit(), random_bits(64, rng)};
    expect(!(oracle_full(table64, q) && !oracle_fran(table64, q)),
           "one-sidedness violated at n = 64");
  }
}

inline void selftest_projective_full_key() {
  const SimpleParams p = SimpleParams::defaults_for(8);
  Rng rng(7);
  const SimpleMsk msk = setup(p, rng);
  const SimpleSvk bank = full_verification_key(msk);
  for (int rep = 0; rep < 100; ++rep) {
    const SimpleBanknote note = QuantumNote::dense(DenseState::random_state(8, rng));
    const QuantumVerdict first = verify(bank, note, rng);
    const QuantumVerdict second = verify(bank, first.note, rng);
    expect(first.accepted == second.accepted, "successive full verifications disagree");
  }
}

inline void selftest_determinism() {
  ExperimentConfig cfg;
  cfg.game = "counterfeit";
  cfg.n = 16;
  cfg.trials = 30;
  cfg.seed = 5;
  const GameResult a = run_experiment(cfg);
  const GameResult b = run_experiment(cfg);
  expect(to_csv(a) == to_csv(b), "csv output is not deterministic");
  expect(report_json(a).dump(2) == report_json(b).dump(2),
         "json output is not deterministic");
}

}  // namespace detail

inline std::vector<SelfTestResult> run_selftest() {
  const std::vector<std::pair<std::string, void (*)()>> checks = {
      {"hadamard-duality", &detail::selftest_hadamard_duality},
      {"acceptance-closed-form", &detail::selftest_acceptance_closed_form},
      {"simple-correctness", &detail::selftest_simple_correctness},
      {"full-correctness-binding", &detail::selftest_full_correctness_binding},
      {"wire-round-trip", &detail::selftest_wire_round_trip},
      {"one-sidedness", &detail::selftest_one_sidedness},
      {"projective-full-key", &detail::selftest_projective_full_key},
      {"determinism", &detail::selftest_determinism},
  };
  std::vector<SelfTestResult> out;
  for (const auto& [name, fn] : checks) {
    try {
      fn();
      out.push_back({name, true, {}});
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bench: medians over fixed inputs for the hot kernels. Timings are the only
// nondeterministic output in the tool.

struct BenchRow {
  std::string name;
  double median_ms = 0.0;
  std::size_t reps = 0;
};

namespace detail {

inline void keep_alive(std::size_t v) {
  static volatile std::size_t sink = 0;
  sink = sink + v;
}

template <typename F>
inline double median_ms(std::size_t reps, F&& fn) {
  std::vector<double> samples;
  samples.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto end = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::milli>(end - start).count());
  }
  std::sort(samples.begin(), samples.end());
  return samples[reps / 2];
}

}  // namespace detail

inline std::vector<BenchRow> run_bench(std::size_t reps = 9) {
  if (reps == 0) throw ConfigError("reps", "must be at least 1");
  std::vector<BenchRow> out;
  Rng rng(42);

  std::vector<BitVec> batch;
  for (int k = 0; k < 200; ++k) batch.push_back(random_bits(64, rng));
  out.push_back({"gf2.rank.n64.batch200", detail::median_ms(reps, [&] {
                   detail::keep_alive(Subspace::span_of(64, batch).dim());
                 }),
                 reps});

  const Subspace a64 = sample_subspace(64, 32, rng);
  out.push_back({"gf2.complement.n64", detail::median_ms(reps, [&] {
                   detail::keep_alive(complement(a64).dim());
                 }),
                 reps});

  const Subspace b64 = sample_subspace(64, 32, rng);
  out.push_back({"gf2.intersect.n64", detail::median_ms(reps, [&] {
                   detail::keep_alive(intersect(a64, b64).dim());
                 }),
                 reps});

  const SimpleParams p = SimpleParams::defaults_for(64);
  Rng setup_rng(43);
  const SimpleMsk msk = setup(p, setup_rng);
  IdLedger ledger(p.big_n);
  const SimpleSvk svk = franchise(msk, 0, ledger);
  const SimpleBanknote note = mint(msk);
  out.push_back({"symbolic.verify.n64.x100", detail::median_ms(reps, [&] {
                   Rng draw(44);
                   std::size_t accepted = 0;
                   for (int k = 0; k < 100; ++k) accepted += verify(svk, note, draw).accepted;
                   detail::keep_alive(accepted);
                 }),
                 reps});

  const DenseState state12 = DenseState::random_state(12, rng);
  out.push_back({"dense.hadamard.n12", detail::median_ms(reps, [&] {
                   detail::keep_alive(dense_hadamard_all(state12).qubits());
                 }),
                 reps});

  const Subspace a12 = sample_subspace(12, 6, rng);
  const Subspace a12_perp = complement(a12);
  SimpleSvk key12;
  key12.ambient_dim = 12;
  for (std::size_t r = 0; r < a12.dim(); ++r) key12.v_subset.push_back(a12.basis_row(r));
  for (std::size_t r = 0; r < a12_perp.dim(); ++r) {
    key12.w_subset.push_back(a12_perp.basis_row(r));
  }
  Rng draw12(45);
  out.push_back({"dense.verify.n12", detail::median_ms(reps, [&] {
                   const QuantumVerdict verdict =
                       verify(key12, QuantumNote::dense(state12), draw12);
                   detail::keep_alive(verdict.accepted);
                 }),
                 reps});

  return out;
}

}  // namespace fqm
