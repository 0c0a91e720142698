#include "smcgw/wire/checks.hpp"

#include <unordered_map>

namespace smcgw::wire {

const char* reason_code(Reason r) {
  switch (r) {
    case Reason::Ok: return "OK";
    case Reason::BadCert: return "BAD_CERT";
    case Reason::BadSig: return "BAD_SIG";
    case Reason::PolicyDenied: return "POLICY_DENIED";
    case Reason::HolderMismatch: return "HOLDER_MISMATCH";
    case Reason::BadRequestSig: return "BAD_REQUEST_SIG";
    case Reason::GrantNotYetValid: return "GRANT_NOT_YET_VALID";
    case Reason::GrantExpired: return "GRANT_EXPIRED";
    case Reason::BadGrantSig: return "BAD_GRANT_SIG";
    case Reason::QueryNotGranted: return "QUERY_NOT_GRANTED";
    case Reason::ClientNotAllowed: return "CLIENT_NOT_ALLOWED";
    case Reason::PurposeNotAllowed: return "PURPOSE_NOT_ALLOWED";
    case Reason::GroupTooSmall: return "GROUP_TOO_SMALL";
    case Reason::StaleRequest: return "STALE_REQUEST";
    case Reason::RateLimitExceeded: return "RATE_LIMIT_EXCEEDED";
    case Reason::NoData: return "NO_DATA";
    case Reason::RangeError: return "RANGE_ERROR";
    case Reason::UnsupportedProtocol: return "UNSUPPORTED_PROTOCOL";
    case Reason::PeerVeto: return "PEER_VETO";
    case Reason::PeerTimeout: return "PEER_TIMEOUT";
    case Reason::RequestDropped: return "REQUEST_DROPPED";
    case Reason::GatewaySigInvalid: return "GATEWAY_SIG_INVALID";
    case Reason::TamperedResult: return "TAMPERED_RESULT";
    case Reason::Internal: return "INTERNAL";
  }
  return "INTERNAL";
}

std::optional<Reason> reason_from_code(const std::string& code) {
  static const std::unordered_map<std::string, Reason> table = [] {
    std::unordered_map<std::string, Reason> t;
    for (int i = 0; i <= static_cast<int>(Reason::Internal); ++i) {
      Reason r = static_cast<Reason>(i);
      t.emplace(reason_code(r), r);
    }
    return t;
  }();
  auto it = table.find(code);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

CheckResult check_grant_request(const GrantRequest& request, const VerifyContext& ctx) {
  if (!crypto::verify_chain(request.certificate, ctx.trust_anchors, ctx.now)) {
    return CheckResult::fail(Reason::BadCert);
  }
  std::string payload = canonical_dump(request.signing_payload());
  if (!crypto::verify(request.sig_client, request.certificate, payload)) {
    return CheckResult::fail(Reason::BadSig);
  }
  return CheckResult::pass();
}

CheckResult check_computation_request(const ComputationRequest& request, const VerifyContext& ctx) {
  // Holder binding and client authenticity.
  if (request.grant.holder != crypto::fingerprint(request.certificate)) {
    return CheckResult::fail(Reason::HolderMismatch);
  }
  if (!crypto::verify_chain(request.certificate, ctx.trust_anchors, ctx.now)) {
    return CheckResult::fail(Reason::BadCert);
  }
  std::string payload = canonical_dump(request.signing_payload());
  if (!crypto::verify(request.sig_client, request.certificate, payload)) {
    return CheckResult::fail(Reason::BadRequestSig);
  }
  // Grant validity window.
  if (!(request.grant.not_before <= ctx.now)) {
    return CheckResult::fail(Reason::GrantNotYetValid);
  }
  if (!(ctx.now <= request.grant.not_after)) {
    return CheckResult::fail(Reason::GrantExpired);
  }
  // Issuer signature under a trusted grant issuer.
  std::string grant_payload = canonical_dump(request.grant.signing_payload());
  bool issuer_ok = false;
  for (const Certificate& issuer : ctx.grant_issuers) {
    if (!crypto::verify_chain(issuer, ctx.trust_anchors, ctx.now) &&
        !(issuer.self_signed() && ctx.now >= issuer.not_before && ctx.now <= issuer.not_after)) {
      continue;
    }
    if (crypto::verify(request.grant.sig_issuer, issuer, grant_payload)) {
      issuer_ok = true;
      break;
    }
  }
  if (!issuer_ok) return CheckResult::fail(Reason::BadGrantSig);
  // Query inclusion in the permitted set.
  if (!request.grant.permits(request.query)) {
    return CheckResult::fail(Reason::QueryNotGranted, request.query.canonical_string());
  }
  return CheckResult::pass();
}

void sign_envelope(Envelope& e, const crypto::SecretKey& key) {
  e.sig = crypto::sign(key, canonical_dump(e.signing_payload()));
}

bool verify_envelope(const Envelope& e, const Certificate& sender) {
  return crypto::verify(e.sig, sender, canonical_dump(e.signing_payload()));
}

}  // namespace smcgw::wire
