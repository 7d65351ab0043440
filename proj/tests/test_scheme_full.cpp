#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fqm/scheme_full.hpp"
#include "oracles.hpp"

using namespace fqm;

TEST_CASE("full params defaults and validation", "[scheme_full]") {
  const FullParams p = FullParams::defaults_for(64);
  REQUIRE(p.t == 8);
  REQUIRE_NOTHROW(p.validate());

  FullParams bad = p;
  bad.n = 6;
  REQUIRE_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.n = 0;
  REQUIRE_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.n = 65536;  // multiple of 4 but too wide for the wire format
  REQUIRE_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.lambda = 0;
  REQUIRE_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("full setup draws distinct positional keys reproducibly", "[scheme_full]") {
  for (const CryptoSuite* suite : {&test_crypto(), &openssl_crypto()}) {
    INFO("suite " << suite->name);
    const FullParams p = FullParams::defaults_for(16);
    Rng rng_a(401), rng_b(401), rng_c(402);
    const FullMsk a = setup(p, *suite, rng_a);
    const FullMsk b = setup(p, *suite, rng_b);
    const FullMsk c = setup(p, *suite, rng_c);

    REQUIRE(a.enc_keys.size() == 16);
    std::set<Bytes> distinct;
    for (const EncKey& k : a.enc_keys) distinct.insert(k.key);
    REQUIRE(distinct.size() == 16);

    REQUIRE(a.sig_pair.public_key == b.sig_pair.public_key);
    for (std::size_t k = 0; k < 16; ++k) REQUIRE(a.enc_keys[k].key == b.enc_keys[k].key);
    REQUIRE(a.sig_pair.public_key != c.sig_pair.public_key);

    const Bytes msg{9, 9, 9};
    REQUIRE(suite->signature->sig_ver(a.sig_pair.public_key, msg,
                                      suite->signature->sign(a.sig_pair.secret_key, msg)));
  }
}

TEST_CASE("full franchise selects the positional key subsets", "[scheme_full]") {
  Rng rng(55);
  const FullParams p = FullParams::defaults_for(16);
  const FullMsk msk = setup(p, test_crypto(), rng);
  const FullSvk svk = franchise(msk, rng);
  const FullSvk other = franchise(msk, rng);

  REQUIRE(svk.i_set.size() == p.t);
  REQUIRE(svk.j_set.size() == p.t);
  for (std::size_t k = 0; k < p.t; ++k) {
    REQUIRE(svk.i_set[k] < 8);
    REQUIRE(svk.j_set[k] < 8);
    REQUIRE(svk.v_keys[k].key == msk.enc_keys[svk.i_set[k]].key);
    REQUIRE(svk.w_keys[k].key == msk.enc_keys[8 + svk.j_set[k]].key);
  }
  REQUIRE(svk.sig_pk == other.sig_pk);
  REQUIRE(svk.sig_pk == msk.sig_pair.public_key);
}

TEST_CASE("mint produces fresh well-formed notes", "[scheme_full]") {
  Rng rng(77);
  const FullParams p = FullParams::defaults_for(16);
  const FullMsk msk = setup(p, test_crypto(), rng);

  std::set<std::string> spaces;
  std::set<Bytes> tuples;
  for (int it = 0; it < 100; ++it) {
    const FullBanknote note = mint(msk, rng);
    REQUIRE(note.ciphertexts.size() == 16);
    REQUIRE(note.state.is_symbolic());
    const CosetState& cs = std::get<CosetState>(note.state.state);
    REQUIRE(cs.space().dim() == 8);
    REQUIRE(cs.shift().is_zero());
    REQUIRE(cs.character().is_zero());
    for (const Bytes& ct : note.ciphertexts) {
      REQUIRE(ct.size() == 2 + test_crypto().encryption->overhead());
    }
    spaces.insert(cs.space().to_text());
    tuples.insert(signature_message(note.ciphertexts));
  }
  REQUIRE(spaces.size() == 100);  // fresh A every time
  REQUIRE(tuples.size() == 100);  // unique ciphertext tuples
}

TEST_CASE("honest full notes verify under every franchised key", "[scheme_full]") {
  for (const std::size_t n : {8u, 16u, 36u, 64u}) {
    Rng rng(500 + n);
    const FullMsk msk = setup(FullParams::defaults_for(n), test_crypto(), rng);
    for (int key = 0; key < 3; ++key) {
      const FullSvk svk = franchise(msk, rng);
      // One svk verifies many notes, each minted over its own subspace.
      for (int bill = 0; bill < 3; ++bill) {
        const FullBanknote note = mint(msk, rng);
        Rng verify_rng(n + 10 * key + bill), witness(n + 10 * key + bill);
        const FullVerdict verdict = verify(svk, note, verify_rng);
        REQUIRE(verdict.accepted);
        REQUIRE(verdict.reason == RejectReason::none);
        REQUIRE(verdict.note == note);
        REQUIRE(verify_rng.next_u64() == witness.next_u64());
      }
    }
  }
}

TEST_CASE("honest dense full notes verify", "[scheme_full]") {
  for (const CryptoSuite* suite : {&test_crypto(), &openssl_crypto()}) {
    INFO("suite " << suite->name);
    Rng rng(31);
    const FullMsk msk = setup(FullParams::defaults_for(8), *suite, rng);
    const FullSvk svk = franchise(msk, rng);
    const FullBanknote note = mint_dense(msk, rng);
    Rng verify_rng(3);
    const FullVerdict verdict = verify(svk, note, verify_rng);
    REQUIRE(verdict.accepted);
    const DenseState& pre = std::get<DenseState>(note.state.state);
    const DenseState& post = std::get<DenseState>(verdict.note.state.state);
    REQUIRE(overlap(pre, post) == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("any flipped classical bit is rejected at the signature check",
          "[scheme_full]") {
  for (const CryptoSuite* suite : {&test_crypto(), &openssl_crypto()}) {
    INFO("suite " << suite->name);
    Rng rng(88);
    const FullMsk msk = setup(FullParams::defaults_for(16), *suite, rng);
    const FullSvk svk = franchise(msk, rng);
    const FullBanknote note = mint(msk, rng);

    const int reps = suite == &test_crypto() ? 50 : 10;
    for (int it = 0; it < reps; ++it) {
      FullBanknote tampered = note;
      if (it % 3 == 0) {
        Bytes& sig = tampered.signature;
        const std::size_t bit = rng.uniform_index(8 * sig.size());
        sig[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      } else {
        Bytes& ct = tampered.ciphertexts[rng.uniform_index(16)];
        const std::size_t bit = rng.uniform_index(8 * ct.size());
        ct[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      }
      Rng verify_rng(it), witness(it);
      const FullVerdict verdict = verify(svk, tampered, verify_rng);
      REQUIRE_FALSE(verdict.accepted);
      REQUIRE(verdict.reason == RejectReason::signature);
      REQUIRE(verdict.note == tampered);  // state untouched
      REQUIRE(verify_rng.next_u64() == witness.next_u64());
    }
  }
}

TEST_CASE("structurally malformed notes are reported as malformed", "[scheme_full]") {
  Rng rng(92);
  const FullParams p = FullParams::defaults_for(16);
  const FullMsk msk = setup(p, test_crypto(), rng);
  const FullSvk svk = franchise(msk, rng);
  const FullBanknote note = mint(msk, rng);

  // Wrong ciphertext count.
  FullBanknote short_note = note;
  short_note.ciphertexts.pop_back();
  Rng r1(1);
  REQUIRE(verify(svk, short_note, r1).reason == RejectReason::malformed);

  // Ambient dimension mismatch.
  FullBanknote wrong_dim = note;
  wrong_dim.state = QuantumNote::coset(CosetState::subspace_state(Subspace::full(8)));
  Rng r2(2);
  REQUIRE(verify(svk, wrong_dim, r2).reason == RejectReason::malformed);

  // A malicious mint holding the signing key can sign a ciphertext that is
  // shorter than the encryption overhead; the decrypt step rejects it.
  FullBanknote bad_ct = note;
  bad_ct.ciphertexts[svk.i_set[0]] = Bytes{1, 2, 3};
  bad_ct.signature = test_crypto().signature->sign(msk.sig_pair.secret_key,
                                                   signature_message(bad_ct.ciphertexts));
  Rng r3(3);
  const FullVerdict v3 = verify(svk, bad_ct, r3);
  REQUIRE_FALSE(v3.accepted);
  REQUIRE(v3.reason == RejectReason::malformed);

  // Or a ciphertext whose plaintext is not exactly n bits.
  FullBanknote bad_len = note;
  bad_len.ciphertexts[svk.i_set[0]] =
      test_crypto().encryption->enc(msk.enc_keys[svk.i_set[0]], Bytes(5, 0x00), rng);
  bad_len.signature = test_crypto().signature->sign(msk.sig_pair.secret_key,
                                                    signature_message(bad_len.ciphertexts));
  Rng r4(4);
  REQUIRE(verify(svk, bad_len, r4).reason == RejectReason::malformed);
}

TEST_CASE("quantum layer agrees with the simple pipeline on the same key spaces",
          "[scheme_full]") {
  Rng rng(1200);
  const FullParams p = FullParams::defaults_for(16);
  const FullMsk msk = setup(p, test_crypto(), rng);

  for (int it = 0; it < 50; ++it) {
    const FullSvk svk = franchise(msk, rng);
    FullBanknote note = mint(msk, rng);
    // Adversarial state: some other note's subspace, so acceptance is nontrivial.
    const FullBanknote other = mint(msk, rng);
    note.state = other.state;

    const auto spaces = decrypt_key_spaces(svk, note);
    REQUIRE(spaces.has_value());

    Rng full_rng(7000 + it), simple_rng(7000 + it);
    const FullVerdict full_verdict = verify(svk, note, full_rng);
    const QuantumVerdict simple_verdict =
        quantum_verify(spaces->first, spaces->second, note.state, simple_rng);
    REQUIRE(full_verdict.accepted == simple_verdict.accepted);
    REQUIRE(full_verdict.note.state == simple_verdict.note);
    REQUIRE(full_rng.next_u64() == simple_rng.next_u64());
  }
}

TEST_CASE("acceptance of a planted span of another key's vectors matches the oracle",
          "[scheme_full]") {
  Rng rng(1500);
  const FullParams p = FullParams::defaults_for(16);
  const FullMsk msk = setup(p, test_crypto(), rng);

  double expected_sum = 0.0, var_sum = 0.0;
  int accepted = 0;
  const int trials = 1000;
  for (int it = 0; it < trials; ++it) {
    const FullSvk svk_a = franchise(msk, rng);
    const FullSvk svk_b = franchise(msk, rng);
    FullBanknote note = mint(msk, rng);

    const auto spaces_a = decrypt_key_spaces(svk_a, note);
    const auto spaces_b = decrypt_key_spaces(svk_b, note);
    REQUIRE(spaces_a.has_value());
    REQUIRE(spaces_b.has_value());

    // Replace the state by the span of svk_b's decrypted v vectors.
    note.state = QuantumNote::coset(CosetState::subspace_state(spaces_b->first));
    const double prob =
        acceptance_probability(spaces_b->first, spaces_a->first, spaces_a->second).to_double();
    expected_sum += prob;
    var_sum += prob * (1.0 - prob);

    Rng verify_rng(40000 + it);
    accepted += verify(svk_a, note, verify_rng).accepted;
  }
  const double sigma = std::sqrt(var_sum);
  REQUIRE(std::abs(static_cast<double>(accepted) - expected_sum) <= 3.0 * sigma + 1e-9);
}

TEST_CASE("signature message pins the length-prefixed concatenation", "[scheme_full]") {
  const std::vector<Bytes> cts{{0xAA}, {0xBB, 0xCC}};
  REQUIRE(signature_message(cts) ==
          Bytes{0x00, 0x00, 0x00, 0x01, 0xAA, 0x00, 0x00, 0x00, 0x02, 0xBB, 0xCC});
  REQUIRE(signature_message({}).empty());
}

TEST_CASE("banknote wire bytes are pinned", "[scheme_full]") {
  FullBanknote note;
  std::vector<BitVec> rows;
  rows.push_back(BitVec::unit(4, 0));
  rows.push_back(BitVec::unit(4, 1));
  note.state =
      QuantumNote::coset(CosetState::subspace_state(Subspace::span_of(4, rows)));
  note.ciphertexts = {Bytes{0x61}, Bytes{}, Bytes{0x62, 0x63}, Bytes{0x64}};
  note.signature = Bytes{0xFE, 0xFF};

  const Bytes expected{
      'F',  'Q',  'M',  '1',               // magic
      0x01,                                // version
      0x00, 0x04,                          // n = 4
      0x00,                                // symbolic backend
      0x00, 0x02,                          // dim = 2
      0x01, 0x02,                          // basis rows e0, e1
      0x00, 0x00,                          // shift, character
      0x00, 0x04,                          // ciphertext count
      0x00, 0x00, 0x00, 0x01, 0x61,        // c1
      0x00, 0x00, 0x00, 0x00,              // c2 (empty)
      0x00, 0x00, 0x00, 0x02, 0x62, 0x63,  // c3
      0x00, 0x00, 0x00, 0x01, 0x64,        // c4
      0x00, 0x00, 0x00, 0x02, 0xFE, 0xFF,  // signature
  };
  REQUIRE(serialize(note) == expected);
  REQUIRE(deserialize(expected) == note);
}

TEST_CASE("serialization round-trips bit-exactly across a note corpus",
          "[scheme_full]") {
  for (const std::size_t n : {8u, 16u, 36u, 64u}) {
    Rng rng(4000 + n);
    const FullMsk msk = setup(FullParams::defaults_for(n), test_crypto(), rng);
    for (int it = 0; it < 25; ++it) {
      const FullBanknote note = mint(msk, rng);
      const Bytes wire = serialize(note);
      REQUIRE(deserialize(wire) == note);
      REQUIRE(serialize(deserialize(wire)) == wire);
    }
  }
  // Dense backend, including a nontrivial post-verification state.
  Rng rng(4999);
  const FullMsk msk = setup(FullParams::defaults_for(8), test_crypto(), rng);
  const FullSvk svk = franchise(msk, rng);
  FullBanknote note = mint_dense(msk, rng);
  const Bytes wire = serialize(note);
  REQUIRE(deserialize(wire) == note);
  const FullVerdict verdict = verify(svk, note, rng);
  REQUIRE(deserialize(serialize(verdict.note)) == verdict.note);
}

TEST_CASE("deserializer rejects malformed buffers", "[scheme_full]") {
  Rng rng(600);
  const FullMsk msk = setup(FullParams::defaults_for(8), test_crypto(), rng);
  const FullBanknote note = mint(msk, rng);
  const Bytes wire = serialize(note);

  // Every truncation fails cleanly.
  for (std::size_t len = 0; len < wire.size(); ++len) {
    const Bytes cut(wire.begin(), wire.begin() + len);
    REQUIRE_THROWS_AS(deserialize(cut), ParseError);
  }
  Bytes trailing = wire;
  trailing.push_back(0x00);
  REQUIRE_THROWS_AS(deserialize(trailing), ParseError);

  Bytes bad = wire;
  bad[0] = 'G';
  REQUIRE_THROWS_AS(deserialize(bad), ParseError);  // magic
  bad = wire;
  bad[4] = 9;
  REQUIRE_THROWS_AS(deserialize(bad), ParseError);  // version
  bad = wire;
  bad[7] = 7;
  REQUIRE_THROWS_AS(deserialize(bad), ParseError);  // backend tag

  // Non-canonical symbolic descriptors: swap two basis rows.
  const CosetState& cs = std::get<CosetState>(note.state.state);
  FullBanknote swapped = note;
  {
    GF2Matrix basis = cs.space().basis();
    basis.swap_rows(0, 1);
    // Rebuild the wire by hand: serialize would re-canonicalize, so splice bytes.
    Bytes raw = wire;
    const std::size_t row_bytes = 1;  // n = 8
    const std::size_t rows_at = 4 + 1 + 2 + 1 + 2;
    for (std::size_t r = 0; r < 2; ++r) {
      const Bytes enc = encode_bits(basis.row(r));
      raw[rows_at + r * row_bytes] = enc[0];
    }
    REQUIRE_THROWS_AS(deserialize(raw), ParseError);
  }

  // Dependent rows: duplicate the first basis row.
  {
    Bytes raw = wire;
    const std::size_t rows_at = 4 + 1 + 2 + 1 + 2;
    raw[rows_at + 1] = raw[rows_at];
    REQUIRE_THROWS_AS(deserialize(raw), ParseError);
  }

  // Non-canonical shift: add a basis row to the (zero) shift.
  {
    Bytes raw = wire;
    const std::size_t dim = cs.space().dim();
    const std::size_t shift_at = 4 + 1 + 2 + 1 + 2 + dim;
    raw[shift_at] = encode_bits(cs.space().basis_row(0))[0];
    REQUIRE_THROWS_AS(deserialize(raw), ParseError);
  }

  // Unusable states cannot be serialized at all.
  FullBanknote dead = note;
  dead.state.usable = false;
  REQUIRE_THROWS_AS(serialize(dead), std::invalid_argument);

  // Dense descriptor with a bad norm: zero the first amplitudes.
  FullBanknote dense_note = note;
  dense_note.state = densify(note.state);
  Bytes dense_wire = serialize(dense_note);
  for (std::size_t k = 0; k < 64; ++k) dense_wire[8 + k] = 0;
  REQUIRE_THROWS_AS(deserialize(dense_wire), ParseError);
}
