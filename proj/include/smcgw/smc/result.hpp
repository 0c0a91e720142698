#pragma once

// Result protection: the reporter signs (session_id, value) and seals the
// record for the client certificate. The gateway relays the ciphertext and
// can neither read nor undetectably alter it.

#include <optional>
#include <string>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/model/fixed.hpp"
#include "smcgw/model/messages.hpp"

namespace smcgw::smc {

struct SealedResult {
  std::string session_id;
  Bytes ciphertext;
};

struct OpenedResult {
  std::string session_id;
  FixedValue value;
  Certificate reporter_cert;
};

// Signs the record with the reporter key and seals {record, sig, reporter
// cert} for the client.
SealedResult seal_result(const std::string& session_id, const FixedValue& value,
                         const crypto::Identity& reporter, const Certificate& client_cert);

// Reporter-side signature over the plain record, for accountability logs.
Signature sign_result_record(const std::string& session_id, const FixedValue& value,
                             const crypto::SecretKey& reporter_key);
bool verify_result_record(const std::string& session_id, const std::string& value,
                          const Signature& sig, const Certificate& reporter_cert);

// Client side: decrypt, check the session id binding, verify the reporter
// signature and the reporter's chain. nullopt on any failure.
std::optional<OpenedResult> open_result(const SealedResult& sealed,
                                        const crypto::Identity& client,
                                        const std::vector<Certificate>& trust_anchors,
                                        std::int64_t now);

}  // namespace smcgw::smc
