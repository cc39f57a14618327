#include "gor/crypto.hpp"

#include <sodium.h>

#include <mutex>

namespace gor::crypto {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("sodium_init failed");
    });
}

// X25519 views of an Ed25519 keypair.
Bytes curve_public(const Bytes& ed_public) {
    if (ed_public.size() != kPublicKeySize)
        throw std::invalid_argument("bad public key length");
    Bytes out(crypto_scalarmult_curve25519_BYTES);
    if (crypto_sign_ed25519_pk_to_curve25519(out.data(), ed_public.data()) != 0)
        throw std::invalid_argument("invalid public key encoding");
    return out;
}

Bytes curve_secret(const Bytes& ed_secret) {
    if (ed_secret.size() != kSecretKeySize)
        throw std::invalid_argument("bad secret key length");
    Bytes out(crypto_scalarmult_curve25519_BYTES);
    if (crypto_sign_ed25519_sk_to_curve25519(out.data(), ed_secret.data()) != 0)
        throw std::runtime_error("secret key conversion failed");
    return out;
}

}  // namespace

KeyPair keygen(const Bytes& seed) {
    ensure_sodium();
    if (seed.size() != kSeedSize)
        throw std::invalid_argument("keygen seed must be exactly 32 bytes");
    KeyPair kp;
    kp.public_key.resize(crypto_sign_ed25519_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_ed25519_SECRETKEYBYTES);
    crypto_sign_ed25519_seed_keypair(kp.public_key.data(), kp.secret_key.data(),
                                     seed.data());
    return kp;
}

Bytes derive_public(const Bytes& secret_key) {
    ensure_sodium();
    if (secret_key.size() != kSecretKeySize)
        throw std::invalid_argument("bad secret key length");
    Bytes pk(crypto_sign_ed25519_PUBLICKEYBYTES);
    if (crypto_sign_ed25519_sk_to_pk(pk.data(), secret_key.data()) != 0)
        throw std::runtime_error("derive_public failed");
    return pk;
}

Bytes SealedBox::serialize() const {
    ByteWriter w;
    w.raw(ephemeral_public);
    w.raw(nonce);
    w.raw(auth_tag);
    w.blob(ciphertext);
    return w.take();
}

SealedBox SealedBox::deserialize(ByteReader& r) {
    SealedBox box;
    box.ephemeral_public = r.raw(crypto_scalarmult_curve25519_BYTES);
    box.nonce = r.raw(crypto_box_NONCEBYTES);
    box.auth_tag = r.raw(crypto_box_MACBYTES);
    box.ciphertext = r.blob();
    return box;
}

SealedBox SealedBox::deserialize(const Bytes& b) {
    ByteReader r(b);
    SealedBox box = deserialize(r);
    if (r.remaining() != 0) throw std::runtime_error("trailing bytes after sealed box");
    return box;
}

SealedBox seal(const Bytes& plaintext, const Bytes& recipient_public,
               const Bytes& ephemeral_seed) {
    ensure_sodium();
    if (plaintext.empty()) throw std::invalid_argument("seal: empty plaintext");
    Bytes recipient_x = curve_public(recipient_public);

    Bytes eph_pk(crypto_box_PUBLICKEYBYTES);
    Bytes eph_sk(crypto_box_SECRETKEYBYTES);
    if (ephemeral_seed.empty()) {
        crypto_box_keypair(eph_pk.data(), eph_sk.data());
    } else {
        if (ephemeral_seed.size() != kSeedSize)
            throw std::invalid_argument("ephemeral seed must be 32 bytes");
        crypto_box_seed_keypair(eph_pk.data(), eph_sk.data(), ephemeral_seed.data());
    }

    // Nonce bound to both public keys; safe because the ephemeral key is
    // fresh per call (or per caller-chosen seed in deterministic mode).
    SealedBox box;
    box.ephemeral_public = eph_pk;
    box.nonce.resize(crypto_box_NONCEBYTES);
    {
        crypto_generichash_state st;
        crypto_generichash_init(&st, nullptr, 0, crypto_box_NONCEBYTES);
        crypto_generichash_update(&st, eph_pk.data(), eph_pk.size());
        crypto_generichash_update(&st, recipient_x.data(), recipient_x.size());
        crypto_generichash_final(&st, box.nonce.data(), box.nonce.size());
    }

    box.ciphertext.resize(plaintext.size());
    box.auth_tag.resize(crypto_box_MACBYTES);
    if (crypto_box_detached(box.ciphertext.data(), box.auth_tag.data(),
                            plaintext.data(), plaintext.size(), box.nonce.data(),
                            recipient_x.data(), eph_sk.data()) != 0)
        throw std::runtime_error("seal failed");
    sodium_memzero(eph_sk.data(), eph_sk.size());
    return box;
}

Bytes open(const SealedBox& box, const Bytes& secret_key) {
    ensure_sodium();
    if (box.ephemeral_public.size() != crypto_box_PUBLICKEYBYTES ||
        box.nonce.size() != crypto_box_NONCEBYTES ||
        box.auth_tag.size() != crypto_box_MACBYTES)
        throw std::runtime_error("malformed sealed box");
    Bytes sk_x = curve_secret(secret_key);
    Bytes plaintext(box.ciphertext.size());
    if (crypto_box_open_detached(plaintext.data(), box.ciphertext.data(),
                                 box.auth_tag.data(), box.ciphertext.size(),
                                 box.nonce.data(), box.ephemeral_public.data(),
                                 sk_x.data()) != 0)
        throw std::runtime_error("sealed box authentication failed");
    return plaintext;
}

Signature sign(const Bytes& message, const Bytes& secret_key) {
    ensure_sodium();
    if (secret_key.size() != kSecretKeySize)
        throw std::invalid_argument("bad secret key length");
    Signature sig;
    sig.bytes.resize(crypto_sign_ed25519_BYTES);
    crypto_sign_ed25519_detached(sig.bytes.data(), nullptr, message.data(),
                                 message.size(), secret_key.data());
    return sig;
}

bool verify(const Bytes& message, const Signature& sig, const Bytes& public_key) {
    ensure_sodium();
    if (sig.bytes.size() != kSignatureSize || public_key.size() != kPublicKeySize)
        return false;
    return crypto_sign_ed25519_verify_detached(sig.bytes.data(), message.data(),
                                               message.size(),
                                               public_key.data()) == 0;
}

Digest hash(const uint8_t* data, size_t len) {
    ensure_sodium();
    Digest d;
    crypto_hash_sha256(d.data(), data, len);
    return d;
}

Digest hash(const Bytes& data) { return hash(data.data(), data.size()); }

Digest hash_str(const std::string& s) {
    return hash(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

}  // namespace gor::crypto
