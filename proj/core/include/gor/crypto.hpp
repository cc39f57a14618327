#ifndef GOR_CRYPTO_HPP
#define GOR_CRYPTO_HPP

#include <optional>

#include "gor/bytes.hpp"

namespace gor::crypto {

// Ed25519 keypair; the same keypair is used for signing and, after
// birational conversion to X25519, as a sealed-box recipient key.
constexpr size_t kSeedSize = 32;
constexpr size_t kPublicKeySize = 32;
constexpr size_t kSecretKeySize = 64;  // libsodium ed25519 secret (seed || public)
constexpr size_t kSignatureSize = 64;

// Serialized SealedBox overhead on top of the plaintext:
// 32 (ephemeral X25519 public) + 24 (nonce) + 16 (Poly1305 tag) + 4 (ct length).
constexpr size_t kSealOverhead = 32 + 24 + 16 + 4;

struct KeyPair {
    Bytes public_key;  // 32 bytes
    Bytes secret_key;  // 64 bytes
};

struct SealedBox {
    Bytes ephemeral_public;  // 32 bytes
    Bytes nonce;             // 24 bytes
    Bytes ciphertext;        // same length as plaintext
    Bytes auth_tag;          // 16 bytes

    Bytes serialize() const;
    static SealedBox deserialize(ByteReader& r);
    static SealedBox deserialize(const Bytes& b);
};

struct Signature {
    Bytes bytes;  // 64 bytes
};

// Deterministic: the same seed always yields the same keypair.
KeyPair keygen(const Bytes& seed);
Bytes derive_public(const Bytes& secret_key);

// ECIES-style hybrid seal: fresh ephemeral X25519 key agreement with the
// recipient, then XSalsa20-Poly1305. Passing ephemeral_seed pins the
// ephemeral key for reproducible packet bytes; leave it empty in production.
SealedBox seal(const Bytes& plaintext, const Bytes& recipient_public,
               const Bytes& ephemeral_seed = {});

// Returns the plaintext, or throws std::runtime_error on any authentication
// failure or malformed box. Never returns unauthenticated data.
Bytes open(const SealedBox& box, const Bytes& secret_key);

Signature sign(const Bytes& message, const Bytes& secret_key);
bool verify(const Bytes& message, const Signature& sig, const Bytes& public_key);

// SHA-256
Digest hash(const Bytes& data);
Digest hash(const uint8_t* data, size_t len);
Digest hash_str(const std::string& s);

}  // namespace gor::crypto

#endif
