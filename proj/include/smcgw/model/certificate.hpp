#pragma once

// Certificate, fingerprint and signature value types. These are plain data;
// the key operations live in smcgw/crypto. A fingerprint is the hex SHA-256
// of the certificate's full canonical serialization (signature included), so
// it pins one concrete issued certificate, not just a key.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "smcgw/model/canonical.hpp"

namespace smcgw {

using Fingerprint = std::string;  // 64 lower-case hex chars

struct Signature {
  Bytes bytes;

  bool empty() const { return bytes.empty(); }
  std::string hex() const { return to_hex(bytes); }
  static Signature from_hex_str(const std::string& h) { return Signature{from_hex(h)}; }
  bool operator==(const Signature&) const = default;
};

struct Certificate {
  Bytes public_key;        // Ed25519 public key
  std::string subject;
  std::string purpose;     // usage-purpose statement, shown to peers
  Fingerprint issuer_fpr;  // empty for self-signed trust anchors
  std::int64_t not_before = 0;
  std::int64_t not_after = 0;
  Signature sig;           // by the issuer, over signing_payload()

  bool self_signed() const { return issuer_fpr.empty(); }

  // Canonical object without the "sig" field; issuer signatures are computed
  // over these bytes.
  nlohmann::json signing_payload() const;

  bool operator==(const Certificate&) const = default;
};

void to_json(nlohmann::json& j, const Certificate& c);
void from_json(const nlohmann::json& j, Certificate& c);

}  // namespace smcgw
