#pragma once

// Identities, signatures and result encryption. One scheme repo-wide:
// Ed25519 detached signatures over canonical bytes, SHA-256 certificate
// fingerprints, and libsodium sealed boxes (X25519 + XSalsa20-Poly1305) for
// holder-only result encryption, with the box keys derived from the
// certificate's Ed25519 key. Certificate chains have depth <= 2: configured
// self-signed anchors sign entity certificates directly.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smcgw/model/certificate.hpp"

namespace smcgw::crypto {

using smcgw::Bytes;
using smcgw::Certificate;
using smcgw::Fingerprint;
using smcgw::Signature;

// Must be called once before anything else; safe to call repeatedly.
void init();

struct SecretKey {
  Bytes bytes;  // Ed25519 secret key (64 bytes)
};

struct Identity {
  Certificate certificate;
  SecretKey secret_key;
};

Fingerprint fingerprint(const Certificate& cert);

// Self-signed when issuer is null. Throws std::invalid_argument on an empty
// validity window.
Identity generate_identity(const std::string& subject, const std::string& purpose,
                           const Identity* issuer, std::int64_t not_before,
                           std::int64_t not_after);

Signature sign(const SecretKey& key, std::string_view message);
// False on wrong key, altered message or malformed signature bytes.
bool verify(const Signature& sig, const Certificate& cert, std::string_view message);

// True iff cert's validity window contains `now` and the cert either is one
// of the anchors (self-signed) or is signed by one of them.
bool verify_chain(const Certificate& cert, const std::vector<Certificate>& anchors,
                  std::int64_t now);

// Sealed-box encryption to the certificate holder; tampering is detected on
// decrypt (nullopt).
Bytes encrypt_for(const Certificate& cert, std::string_view plaintext);
std::optional<std::string> decrypt(const SecretKey& key, const Certificate& own_cert,
                                   const Bytes& ciphertext);

// File persistence: <path>.cert.json holds the public part, <path>.key.json
// the secret key (created with owner-only permissions).
void save_identity(const Identity& id, const std::string& path_prefix);
Identity load_identity(const std::string& path_prefix);
Certificate load_certificate(const std::string& path);
void save_certificate(const Certificate& cert, const std::string& path);

}  // namespace smcgw::crypto
