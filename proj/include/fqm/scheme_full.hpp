#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fqm/crypto.hpp"
#include "fqm/error.hpp"
#include "fqm/gf2.hpp"
#include "fqm/qstate.hpp"
#include "fqm/rng.hpp"
#include "fqm/scheme_simple.hpp"
#include "fqm/subspace.hpp"

namespace fqm {

// Parameters of the many-banknote scheme. Key issuance has no structural id
// bound here; collusion budgets are enforced by the security games.
struct FullParams {
  unsigned lambda = 128;
  std::size_t n = 0;  // ambient dimension, multiple of 4
  std::size_t t = 0;  // indices drawn per key side

  static FullParams defaults_for(std::size_t n) {
    FullParams p;
    p.n = n;
    p.t = SimpleParams::default_t(n);
    return p;
  }

  void validate() const {
    if (lambda == 0) throw ConfigError("lambda", "must be positive");
    if (n == 0) throw ConfigError("n", "must be positive");
    if (n % 4 != 0) throw ConfigError("n", "must be a multiple of 4");
    if (n > 65535) throw ConfigError("n", "must fit the wire format (n <= 65535)");
  }
};

// Master key: one signature pair plus n positional encryption keys. Key k < n/2
// encrypts that position's v vector; key n/2 + j encrypts w_j.
struct FullMsk {
  FullParams params;
  const CryptoSuite* crypto = nullptr;
  SigKeyPair sig_pair;
  std::vector<EncKey> enc_keys;  // exactly n
};

// Franchised key: index multisets plus only the encryption keys they select.
struct FullSvk {
  std::size_t n = 0;
  const CryptoSuite* crypto = nullptr;
  Bytes sig_pk;
  std::vector<std::size_t> i_set, j_set;  // entries in [0, n/2)
  std::vector<EncKey> v_keys;             // parallel to i_set: enc_keys[i]
  std::vector<EncKey> w_keys;             // parallel to j_set: enc_keys[n/2 + j]
};

// A banknote: quantum register plus the classical payload that rides on it.
struct FullBanknote {
  QuantumNote state;
  std::vector<Bytes> ciphertexts;  // exactly n
  Bytes signature;

  bool operator==(const FullBanknote&) const = default;
};

enum class RejectReason { none, malformed, signature, quantum };

inline const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::malformed: return "malformed";
    case RejectReason::signature: return "signature";
    case RejectReason::quantum: return "quantum";
  }
  return "unknown";
}

struct FullVerdict {
  bool accepted = false;
  RejectReason reason = RejectReason::none;
  FullBanknote note;
};

// The byte string the mint signs: ciphertexts in positional order, each
// u32 big-endian length-prefixed so tuple boundaries are unambiguous.
inline Bytes signature_message(const std::vector<Bytes>& ciphertexts) {
  Bytes msg;
  for (const Bytes& ct : ciphertexts) {
    const std::uint32_t len = static_cast<std::uint32_t>(ct.size());
    msg.push_back(static_cast<std::uint8_t>(len >> 24));
    msg.push_back(static_cast<std::uint8_t>(len >> 16));
    msg.push_back(static_cast<std::uint8_t>(len >> 8));
    msg.push_back(static_cast<std::uint8_t>(len));
    msg.insert(msg.end(), ct.begin(), ct.end());
  }
  return msg;
}

// Draw order: signature pair, then encryption keys by position.
inline FullMsk setup(const FullParams& p, const CryptoSuite& crypto, Rng& rng) {
  p.validate();
  FullMsk msk;
  msk.params = p;
  msk.crypto = &crypto;
  msk.sig_pair = crypto.signature->sig_keygen(p.lambda, rng);
  msk.enc_keys.reserve(p.n);
  for (std::size_t k = 0; k < p.n; ++k) {
    msk.enc_keys.push_back(crypto.encryption->enc_keygen(p.lambda, rng));
  }
  return msk;
}

// Draw order: the I indices, then the J indices.
inline FullSvk franchise(const FullMsk& msk, Rng& rng) {
  const std::size_t half = msk.params.n / 2;
  FullSvk svk;
  svk.n = msk.params.n;
  svk.crypto = msk.crypto;
  svk.sig_pk = msk.sig_pair.public_key;
  for (std::size_t k = 0; k < msk.params.t; ++k) svk.i_set.push_back(rng.uniform_index(half));
  for (std::size_t k = 0; k < msk.params.t; ++k) svk.j_set.push_back(rng.uniform_index(half));
  for (const std::size_t i : svk.i_set) svk.v_keys.push_back(msk.enc_keys[i]);
  for (const std::size_t j : svk.j_set) svk.w_keys.push_back(msk.enc_keys[half + j]);
  return svk;
}

// Draw order: A, then the v vectors, then the w vectors, then each
// encryption's randomness in ciphertext order.
inline FullBanknote mint(const FullMsk& msk, Rng& rng) {
  const std::size_t n = msk.params.n;
  const std::size_t half = n / 2;
  const Subspace a = sample_subspace(n, half, rng);
  const Subspace a_perp = complement(a);

  std::vector<BitVec> vs, ws;
  vs.reserve(half);
  ws.reserve(half);
  for (std::size_t i = 0; i < half; ++i) vs.push_back(sample_vector_in(a, rng));
  for (std::size_t j = 0; j < half; ++j) ws.push_back(sample_vector_in(a_perp, rng));

  FullBanknote note;
  note.ciphertexts.reserve(n);
  for (std::size_t i = 0; i < half; ++i) {
    note.ciphertexts.push_back(
        msk.crypto->encryption->enc(msk.enc_keys[i], encode_bits(vs[i]), rng));
  }
  for (std::size_t j = 0; j < half; ++j) {
    note.ciphertexts.push_back(
        msk.crypto->encryption->enc(msk.enc_keys[half + j], encode_bits(ws[j]), rng));
  }
  note.signature =
      msk.crypto->signature->sign(msk.sig_pair.secret_key, signature_message(note.ciphertexts));
  note.state = QuantumNote::coset(CosetState::subspace_state(a));
  return note;
}

inline FullBanknote mint_dense(const FullMsk& msk, Rng& rng) {
  FullBanknote note = mint(msk, rng);
  note.state = densify(std::move(note.state));
  return note;
}

// Decrypts the key's selected ciphertexts into the spans (V, W) the quantum
// tests use. nullopt when a selected ciphertext fails to decrypt to an n-bit
// vector, which cannot happen for a signature-checked honest note.
inline std::optional<std::pair<Subspace, Subspace>> decrypt_key_spaces(
    const FullSvk& svk, const FullBanknote& note) {
  const std::size_t half = svk.n / 2;
  std::vector<BitVec> vs, ws;
  for (std::size_t k = 0; k < svk.i_set.size(); ++k) {
    const auto pt = svk.crypto->encryption->dec(svk.v_keys[k], note.ciphertexts[svk.i_set[k]]);
    if (!pt) return std::nullopt;
    const auto vec = decode_bits(*pt, svk.n);
    if (!vec) return std::nullopt;
    vs.push_back(*vec);
  }
  for (std::size_t k = 0; k < svk.j_set.size(); ++k) {
    const auto pt =
        svk.crypto->encryption->dec(svk.w_keys[k], note.ciphertexts[half + svk.j_set[k]]);
    if (!pt) return std::nullopt;
    const auto vec = decode_bits(*pt, svk.n);
    if (!vec) return std::nullopt;
    ws.push_back(*vec);
  }
  return std::make_pair(Subspace::span_of(svk.n, vs), Subspace::span_of(svk.n, ws));
}

// Signature check, then decrypt, then the quantum pipeline. A classical
// failure rejects before the state is touched, and the reason says which
// layer rejected.
inline FullVerdict verify(const FullSvk& svk, FullBanknote note, Rng& rng) {
  if (note.ciphertexts.size() != svk.n || note.state.ambient_dim() != svk.n) {
    return {false, RejectReason::malformed, std::move(note)};
  }
  if (!svk.crypto->signature->sig_ver(svk.sig_pk, signature_message(note.ciphertexts),
                                      note.signature)) {
    return {false, RejectReason::signature, std::move(note)};
  }
  const auto spaces = decrypt_key_spaces(svk, note);
  if (!spaces) return {false, RejectReason::malformed, std::move(note)};

  QuantumVerdict verdict = quantum_verify(spaces->first, spaces->second,
                                          std::move(note.state), rng);
  note.state = std::move(verdict.note);
  return {verdict.accepted, verdict.accepted ? RejectReason::none : RejectReason::quantum,
          std::move(note)};
}

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16be(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32be(std::uint32_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 24));
    out_.push_back(static_cast<std::uint8_t>(v >> 16));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void f64le(double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (std::size_t j = 0; j < 8; ++j) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * j)));
  }
  void bytes(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Bounds-checked reads; any overrun is a ParseError naming the field.
class ByteReader {
 public:
  explicit ByteReader(const Bytes& buf, const char* context = "banknote")
      : buf_(buf), context_(context) {}

  std::uint8_t u8(const char* field) { return take(1, field)[0]; }
  std::uint16_t u16be(const char* field) {
    const std::uint8_t* p = take(2, field);
    return static_cast<std::uint16_t>((std::uint16_t{p[0]} << 8) | p[1]);
  }
  std::uint32_t u32be(const char* field) {
    const std::uint8_t* p = take(4, field);
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  }
  double f64le(const char* field) {
    const std::uint8_t* p = take(8, field);
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < 8; ++j) bits |= std::uint64_t{p[j]} << (8 * j);
    return std::bit_cast<double>(bits);
  }
  Bytes bytes(std::size_t count, const char* field) {
    const std::uint8_t* p = take(count, field);
    return Bytes(p, p + count);
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  const std::uint8_t* take(std::size_t count, const char* field) {
    if (buf_.size() - pos_ < count) {
      throw ParseError(std::string(context_) + " truncated at " + field);
    }
    const std::uint8_t* p = buf_.data() + pos_;
    pos_ += count;
    return p;
  }

  const Bytes& buf_;
  const char* context_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline constexpr std::uint8_t kNoteVersion = 1;
inline constexpr std::uint8_t kBackendSymbolic = 0;
inline constexpr std::uint8_t kBackendDense = 1;

// Wire format, bit-exact:
//   "FQM1" | version u8 | n u16 BE | backend u8 | descriptor
//   | count u16 BE (= n) | n x (u32 BE length || ciphertext)
//   | u32 BE length || signature
// Symbolic descriptor: dim u16 BE, then dim basis rows, shift, character,
// each as ceil(n/8) bytes. Dense descriptor: 2^n (re, im) float64 LE pairs.
inline Bytes serialize(const FullBanknote& note) {
  if (!note.state.usable) {
    throw std::invalid_argument("cannot serialize a note whose state was lost to measurement");
  }
  const std::size_t n = note.state.ambient_dim();
  if (n > 65535 || note.ciphertexts.size() != n) {
    throw std::invalid_argument("banknote shape does not fit the wire format");
  }
  detail::ByteWriter w;
  w.bytes({'F', 'Q', 'M', '1'});
  w.u8(kNoteVersion);
  w.u16be(static_cast<std::uint16_t>(n));
  if (note.state.is_symbolic()) {
    const CosetState& cs = std::get<CosetState>(note.state.state);
    w.u8(kBackendSymbolic);
    w.u16be(static_cast<std::uint16_t>(cs.space().dim()));
    for (std::size_t r = 0; r < cs.space().dim(); ++r) w.bytes(encode_bits(cs.space().basis_row(r)));
    w.bytes(encode_bits(cs.shift()));
    w.bytes(encode_bits(cs.character()));
  } else {
    const DenseState& st = std::get<DenseState>(note.state.state);
    w.u8(kBackendDense);
    for (const std::complex<double>& a : st.amplitudes()) {
      w.f64le(a.real());
      w.f64le(a.imag());
    }
  }
  w.u16be(static_cast<std::uint16_t>(n));
  for (const Bytes& ct : note.ciphertexts) {
    w.u32be(static_cast<std::uint32_t>(ct.size()));
    w.bytes(ct);
  }
  w.u32be(static_cast<std::uint32_t>(note.signature.size()));
  w.bytes(note.signature);
  return w.take();
}

// Strict inverse of serialize: canonical coset descriptors only, dense norms
// within 1e-9 of 1, no trailing bytes. Anything else is a ParseError.
inline FullBanknote deserialize(const Bytes& buf) {
  detail::ByteReader r(buf);
  if (r.bytes(4, "magic") != Bytes{'F', 'Q', 'M', '1'}) throw ParseError("bad magic");
  if (r.u8("version") != kNoteVersion) throw ParseError("unsupported version");
  const std::size_t n = r.u16be("n");
  if (n == 0) throw ParseError("ambient dimension must be positive");
  const std::uint8_t backend = r.u8("backend");

  FullBanknote note;
  if (backend == kBackendSymbolic) {
    const std::size_t dim = r.u16be("dim");
    if (dim > n) throw ParseError("subspace dimension exceeds ambient dimension");
    const std::size_t row_bytes = (n + 7) / 8;
    std::vector<BitVec> rows;
    rows.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const auto row = decode_bits(r.bytes(row_bytes, "basis row"), n);
      if (!row) throw ParseError("basis row has nonzero padding bits");
      rows.push_back(*row);
    }
    const auto shift = decode_bits(r.bytes(row_bytes, "shift"), n);
    const auto character = decode_bits(r.bytes(row_bytes, "character"), n);
    if (!shift || !character) throw ParseError("coset vector has nonzero padding bits");

    const Subspace space = Subspace::span_of(n, rows);
    if (space.dim() != dim) throw ParseError("basis rows are linearly dependent");
    for (std::size_t i = 0; i < dim; ++i) {
      if (space.basis_row(i) != rows[i]) throw ParseError("basis rows are not in canonical form");
    }
    const CosetState cs = CosetState::make(space, *shift, *character);
    if (cs.shift() != *shift || cs.character() != *character) {
      throw ParseError("coset representative is not in canonical form");
    }
    note.state = QuantumNote::coset(cs);
  } else if (backend == kBackendDense) {
    if (n > kDenseQubitCap) throw ParseError("dense state exceeds the dense backend cap");
    std::vector<std::complex<double>> amp(std::size_t{1} << n);
    for (auto& a : amp) {
      const double re = r.f64le("amplitude");
      const double im = r.f64le("amplitude");
      a = {re, im};
    }
    DenseState st(n, std::move(amp));
    if (std::abs(st.norm() - 1.0) > 1e-9) throw ParseError("dense state is not normalized");
    note.state = QuantumNote::dense(std::move(st));
  } else {
    throw ParseError("unknown backend tag");
  }

  if (r.u16be("count") != n) throw ParseError("ciphertext count mismatch");
  note.ciphertexts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = r.u32be("ciphertext length");
    note.ciphertexts.push_back(r.bytes(len, "ciphertext"));
  }
  const std::size_t sig_len = r.u32be("signature length");
  note.signature = r.bytes(sig_len, "signature");
  if (!r.done()) throw ParseError("trailing bytes after banknote");
  return note;
}

}  // namespace fqm
