#pragma once

// Request verification shared between the gateway and the peers. The peers
// re-run exactly the checks the gateway ran (the whole point of transferable
// grants), so the check sequence lives here once.
//
// Grant requests:       certificate chain, request signature, then policy.
// Computation requests: holder binding + certificate + request signature,
//                       grant window start, grant window end, issuer
//                       signature, query inclusion -- in that order; the
//                       reported reason is always the first failure.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/model/messages.hpp"

namespace smcgw::wire {

enum class Reason {
  Ok,
  // grant request path
  BadCert,
  BadSig,
  PolicyDenied,
  // computation request path (formal checks)
  HolderMismatch,
  BadRequestSig,
  GrantNotYetValid,
  GrantExpired,
  BadGrantSig,
  QueryNotGranted,
  // peer-local policy
  ClientNotAllowed,
  PurposeNotAllowed,
  GroupTooSmall,
  StaleRequest,
  RateLimitExceeded,
  NoData,
  RangeError,
  UnsupportedProtocol,
  // transport / orchestration
  PeerVeto,
  PeerTimeout,
  RequestDropped,
  GatewaySigInvalid,
  TamperedResult,
  Internal,
};

const char* reason_code(Reason r);
std::optional<Reason> reason_from_code(const std::string& code);

struct CheckResult {
  Reason reason = Reason::Ok;
  std::string detail;  // e.g. the denied query's canonical string

  bool ok() const { return reason == Reason::Ok; }
  static CheckResult pass() { return {}; }
  static CheckResult fail(Reason r, std::string detail = "") { return {r, std::move(detail)}; }
};

struct VerifyContext {
  std::vector<Certificate> trust_anchors;
  std::vector<Certificate> grant_issuers;  // certificates trusted to sign grants
  std::int64_t now = 0;
};

// Certificate chain + request signature (the formal half of the grant
// request checks; policy is the caller's).
CheckResult check_grant_request(const GrantRequest& request, const VerifyContext& ctx);

// The full formal computation-request sequence. Stops at the first failure.
CheckResult check_computation_request(const ComputationRequest& request, const VerifyContext& ctx);

// Envelope helpers. sign_envelope fills e.sig over the canonical payload.
void sign_envelope(Envelope& e, const crypto::SecretKey& key);
bool verify_envelope(const Envelope& e, const Certificate& sender);

}  // namespace smcgw::wire
