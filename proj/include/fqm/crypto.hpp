#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fqm/error.hpp"
#include "fqm/gf2.hpp"
#include "fqm/rng.hpp"

namespace fqm {

using Bytes = std::vector<std::uint8_t>;

inline Bytes random_bytes(Rng& rng, std::size_t count) {
  Bytes out(count);
  std::size_t i = 0;
  while (i < count) {
    std::uint64_t w = rng.next_u64();
    for (std::size_t j = 0; j < 8 && i < count; ++j, ++i) {
      out[i] = static_cast<std::uint8_t>(w >> (8 * j));
    }
  }
  return out;
}

// Fixed-length byte encoding of a bit vector: ceil(n/8) bytes, coordinate
// 8k+j stored in bit j of byte k. Padding bits are zero.
inline Bytes encode_bits(const BitVec& v) {
  Bytes out((v.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.get(i)) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return out;
}

// Inverse of encode_bits. Rejects wrong length and nonzero padding bits, so
// every accepted byte string decodes to exactly one vector.
inline std::optional<BitVec> decode_bits(const Bytes& bytes, std::size_t bits) {
  if (bytes.size() != (bits + 7) / 8) return std::nullopt;
  if (bits % 8 != 0 && !bytes.empty()) {
    const std::uint8_t pad = static_cast<std::uint8_t>(0xFFu << (bits % 8));
    if (bytes.back() & pad) return std::nullopt;
  }
  BitVec v(bits);
  for (std::size_t i = 0; i < bits; ++i) {
    if (bytes[i / 8] & (1u << (i % 8))) v.set(i, true);
  }
  return v;
}

struct SigKeyPair {
  Bytes public_key;
  Bytes secret_key;
};

struct EncKey {
  Bytes key;
};

// Signature provider. sig_ver is deterministic and total: malformed keys or
// signatures yield false, never an exception.
class SignatureProvider {
 public:
  virtual ~SignatureProvider() = default;
  virtual SigKeyPair sig_keygen(unsigned lambda, Rng& rng) const = 0;
  virtual Bytes sign(const Bytes& secret_key, const Bytes& msg) const = 0;
  virtual bool sig_ver(const Bytes& public_key, const Bytes& msg,
                       const Bytes& sig) const = 0;
  virtual std::string_view name() const = 0;
};

// Secret-key encryption provider. enc is randomized (draws from rng); dec is
// deterministic and returns nullopt only for structurally malformed
// ciphertexts (shorter than the fixed overhead). A wrong key decrypts to
// garbage that downstream validation rejects.
class EncryptionProvider {
 public:
  virtual ~EncryptionProvider() = default;
  virtual EncKey enc_keygen(unsigned lambda, Rng& rng) const = 0;
  virtual Bytes enc(const EncKey& key, const Bytes& msg, Rng& rng) const = 0;
  virtual std::optional<Bytes> dec(const EncKey& key, const Bytes& ct) const = 0;
  // Ciphertext length minus message length, same for every message.
  virtual std::size_t overhead() const = 0;
  virtual std::string_view name() const = 0;
};

namespace detail {

inline std::uint64_t load_le(const std::uint8_t* p, std::size_t len) {
  std::uint64_t w = 0;
  for (std::size_t j = 0; j < len; ++j) w |= std::uint64_t(p[j]) << (8 * j);
  return w;
}

inline void store_le(std::uint8_t* p, std::uint64_t w) {
  for (std::size_t j = 0; j < 8; ++j) p[j] = static_cast<std::uint8_t>(w >> (8 * j));
}

// Keyed 64-bit digest built from the splitmix64 finalizer. Not secure; the
// test provider only needs determinism and avalanche.
inline std::uint64_t keyed_digest(std::uint64_t h, const Bytes& data) {
  std::size_t i = 0;
  for (; i + 8 <= data.size(); i += 8) h = mix64(h ^ load_le(data.data() + i, 8));
  if (i < data.size()) h = mix64(h ^ load_le(data.data() + i, data.size() - i));
  return mix64(h ^ (std::uint64_t{data.size()} * 0x9e3779b97f4a7c15ULL));
}

}  // namespace detail

// Insecure stand-in for a signature scheme: the "signature" is a keyed digest
// and the public key equals the secret key. Fast and fully deterministic,
// which is what game replays need.
class TestSignature final : public SignatureProvider {
 public:
  SigKeyPair sig_keygen(unsigned lambda, Rng& rng) const override {
    require_lambda(lambda);
    Bytes sk = random_bytes(rng, kKeyBytes);
    return {sk, sk};
  }

  Bytes sign(const Bytes& secret_key, const Bytes& msg) const override {
    std::uint64_t h = detail::keyed_digest(kDomainSig, secret_key);
    h = detail::keyed_digest(h, msg);
    Bytes sig(kSigBytes);
    for (std::size_t t = 0; t < kSigBytes / 8; ++t) {
      detail::store_le(sig.data() + 8 * t, detail::mix64(h + t));
    }
    return sig;
  }

  bool sig_ver(const Bytes& public_key, const Bytes& msg,
               const Bytes& sig) const override {
    if (sig.size() != kSigBytes) return false;
    return sign(public_key, msg) == sig;
  }

  std::string_view name() const override { return "test"; }

  static constexpr std::size_t kKeyBytes = 32;
  static constexpr std::size_t kSigBytes = 32;
  static constexpr std::uint64_t kDomainSig = 0x7369676e61747572ULL;

 private:
  static void require_lambda(unsigned lambda) {
    if (lambda == 0) throw std::invalid_argument("lambda must be positive");
  }
};

// Insecure XOR-stream cipher: ct = nonce(8) || msg ^ keystream(key, nonce).
class TestEncryption final : public EncryptionProvider {
 public:
  EncKey enc_keygen(unsigned lambda, Rng& rng) const override {
    if (lambda == 0) throw std::invalid_argument("lambda must be positive");
    return {random_bytes(rng, kKeyBytes)};
  }

  Bytes enc(const EncKey& key, const Bytes& msg, Rng& rng) const override {
    const Bytes nonce = random_bytes(rng, kNonceBytes);
    Bytes ct(kNonceBytes + msg.size());
    std::memcpy(ct.data(), nonce.data(), kNonceBytes);
    apply_stream(key, nonce, msg, ct.data() + kNonceBytes);
    return ct;
  }

  std::optional<Bytes> dec(const EncKey& key, const Bytes& ct) const override {
    if (ct.size() < kNonceBytes) return std::nullopt;
    const Bytes nonce(ct.begin(), ct.begin() + kNonceBytes);
    const Bytes body(ct.begin() + kNonceBytes, ct.end());
    Bytes msg(body.size());
    apply_stream(key, nonce, body, msg.data());
    return msg;
  }

  std::size_t overhead() const override { return kNonceBytes; }

  std::string_view name() const override { return "test"; }

  static constexpr std::size_t kKeyBytes = 32;
  static constexpr std::size_t kNonceBytes = 8;
  static constexpr std::uint64_t kDomainEnc = 0x656e6372797074ULL;

 private:
  static void apply_stream(const EncKey& key, const Bytes& nonce,
                           const Bytes& in, std::uint8_t* out) {
    const std::uint64_t state =
        detail::keyed_digest(detail::keyed_digest(kDomainEnc, key.key), nonce);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const std::uint64_t word = detail::mix64(state + i / 8);
      out[i] = in[i] ^ static_cast<std::uint8_t>(word >> (8 * (i % 8)));
    }
  }
};

namespace detail {

struct EvpPkeyFree {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct EvpMdCtxFree {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct EvpCipherCtxFree {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, EvpPkeyFree>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, EvpMdCtxFree>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, EvpCipherCtxFree>;

// EVP functions reject null data pointers even with length zero.
inline const std::uint8_t* data_or_stub(const Bytes& b) {
  static const std::uint8_t stub = 0;
  return b.empty() ? &stub : b.data();
}

}  // namespace detail

// Ed25519 signatures via OpenSSL. Key generation draws the 32-byte seed from
// the caller's rng, so keys are reproducible under a fixed seed; signing is
// deterministic by construction of Ed25519.
class Ed25519Signature final : public SignatureProvider {
 public:
  SigKeyPair sig_keygen(unsigned lambda, Rng& rng) const override {
    if (lambda == 0) throw std::invalid_argument("lambda must be positive");
    Bytes seed = random_bytes(rng, kKeyBytes);
    detail::PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                                     seed.data(), seed.size()));
    if (!key) throw std::runtime_error("ed25519 keygen failed");
    Bytes pub(kKeyBytes);
    std::size_t publen = pub.size();
    if (EVP_PKEY_get_raw_public_key(key.get(), pub.data(), &publen) != 1 ||
        publen != kKeyBytes) {
      throw std::runtime_error("ed25519 public key extraction failed");
    }
    return {pub, seed};
  }

  Bytes sign(const Bytes& secret_key, const Bytes& msg) const override {
    if (secret_key.size() != kKeyBytes) {
      throw std::invalid_argument("ed25519 secret key must be 32 bytes");
    }
    detail::PkeyPtr key(EVP_PKEY_new_raw_private_key(
        EVP_PKEY_ED25519, nullptr, secret_key.data(), secret_key.size()));
    if (!key) throw std::runtime_error("ed25519 key load failed");
    detail::MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
      throw std::runtime_error("ed25519 sign init failed");
    }
    Bytes sig(kSigBytes);
    std::size_t siglen = sig.size();
    if (EVP_DigestSign(ctx.get(), sig.data(), &siglen, detail::data_or_stub(msg),
                       msg.size()) != 1 ||
        siglen != kSigBytes) {
      throw std::runtime_error("ed25519 sign failed");
    }
    return sig;
  }

  bool sig_ver(const Bytes& public_key, const Bytes& msg,
               const Bytes& sig) const override {
    if (public_key.size() != kKeyBytes || sig.size() != kSigBytes) return false;
    detail::PkeyPtr key(EVP_PKEY_new_raw_public_key(
        EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size()));
    if (!key) return false;
    detail::MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx ||
        EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
      return false;
    }
    return EVP_DigestVerify(ctx.get(), sig.data(), sig.size(),
                            detail::data_or_stub(msg), msg.size()) == 1;
  }

  std::string_view name() const override { return "ed25519"; }

  static constexpr std::size_t kKeyBytes = 32;
  static constexpr std::size_t kSigBytes = 64;
};

// AES-256-CTR via OpenSSL: ct = iv(16) || stream. The IV is drawn from the
// caller's rng so encryption replays under a fixed seed.
class Aes256CtrEncryption final : public EncryptionProvider {
 public:
  EncKey enc_keygen(unsigned lambda, Rng& rng) const override {
    if (lambda == 0) throw std::invalid_argument("lambda must be positive");
    return {random_bytes(rng, kKeyBytes)};
  }

  Bytes enc(const EncKey& key, const Bytes& msg, Rng& rng) const override {
    require_key(key);
    const Bytes iv = random_bytes(rng, kIvBytes);
    Bytes ct(kIvBytes + msg.size());
    std::memcpy(ct.data(), iv.data(), kIvBytes);
    run_ctr(key, iv.data(), msg, ct.data() + kIvBytes);
    return ct;
  }

  std::optional<Bytes> dec(const EncKey& key, const Bytes& ct) const override {
    require_key(key);
    if (ct.size() < kIvBytes) return std::nullopt;
    const Bytes body(ct.begin() + kIvBytes, ct.end());
    Bytes msg(body.size());
    run_ctr(key, ct.data(), body, msg.data());
    return msg;
  }

  std::size_t overhead() const override { return kIvBytes; }

  std::string_view name() const override { return "aes-256-ctr"; }

  static constexpr std::size_t kKeyBytes = 32;
  static constexpr std::size_t kIvBytes = 16;

 private:
  static void require_key(const EncKey& key) {
    if (key.key.size() != kKeyBytes) {
      throw std::invalid_argument("aes-256-ctr key must be 32 bytes");
    }
  }

  // CTR mode is an XOR stream, so encryption and decryption are the same op.
  static void run_ctr(const EncKey& key, const std::uint8_t* iv, const Bytes& in,
                      std::uint8_t* out) {
    detail::CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ctr(), nullptr,
                                   key.key.data(), iv) != 1) {
      throw std::runtime_error("aes-256-ctr init failed");
    }
    int outl = 0;
    if (!in.empty() && EVP_EncryptUpdate(ctx.get(), out, &outl, in.data(),
                                         static_cast<int>(in.size())) != 1) {
      throw std::runtime_error("aes-256-ctr update failed");
    }
    int finl = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out + outl, &finl) != 1 || finl != 0 ||
        static_cast<std::size_t>(outl) != in.size()) {
      throw std::runtime_error("aes-256-ctr finalize failed");
    }
  }
};

// A matched signature + encryption pair selectable by name at runtime.
struct CryptoSuite {
  const SignatureProvider* signature;
  const EncryptionProvider* encryption;
  std::string_view name;
};

inline const CryptoSuite& test_crypto() {
  static const TestSignature sig;
  static const TestEncryption enc;
  static const CryptoSuite suite{&sig, &enc, "test"};
  return suite;
}

inline const CryptoSuite& openssl_crypto() {
  static const Ed25519Signature sig;
  static const Aes256CtrEncryption enc;
  static const CryptoSuite suite{&sig, &enc, "openssl"};
  return suite;
}

inline const CryptoSuite& crypto_by_name(std::string_view name) {
  if (name == "test") return test_crypto();
  if (name == "openssl") return openssl_crypto();
  throw ConfigError("crypto", "unknown provider '" + std::string(name) +
                                  "' (expected 'test' or 'openssl')");
}

}  // namespace fqm
