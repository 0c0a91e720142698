#pragma once

// Shared builders for protocol fixtures: a two-level test PKI, the standard
// catalog query, signed grants and computation requests, and peer
// registration payloads. Everything takes an explicit `now` so tests run on
// a synthetic clock.

#include <cstdint>
#include <string>
#include <vector>

#include "smcgw/client/client.hpp"
#include "smcgw/crypto/identity.hpp"
#include "smcgw/model/messages.hpp"
#include "smcgw/model/peer_profile.hpp"

namespace testfix {

using namespace smcgw;

constexpr std::int64_t kNow = 1700000000;

struct Pki {
  crypto::Identity anchor;
  crypto::Identity gateway;
  crypto::Identity client;
  std::vector<Certificate> anchors() const { return {anchor.certificate}; }
};

inline Pki make_pki(std::int64_t now = kNow, const std::string& client_purpose = "dashboard display") {
  crypto::init();
  Pki pki;
  pki.anchor = crypto::generate_identity("test-anchor", "", nullptr, now - 86400, now + 10LL * 365 * 86400);
  pki.gateway = crypto::generate_identity("gateway", "", &pki.anchor, now - 3600, now + 365LL * 86400);
  pki.client = crypto::generate_identity("client-1", client_purpose, &pki.anchor, now - 3600,
                                         now + 365LL * 86400);
  return pki;
}

inline Query kitchen_sum_query() {
  Query q;
  q.predicate = Predicate::parse("type = heater ∧ roomtype ∈ [kitchen, meetingroom]");
  q.preselector = Preselector::Last6Hours;
  q.preprocessor = Preprocessor::Average;
  q.protocol = "sum";
  q.input = "power_consumption";
  return q;
}

inline Grant make_grant(const crypto::Identity& issuer, const Certificate& holder_cert,
                        std::vector<Query> queries, std::int64_t now = kNow,
                        std::int64_t lifetime = 3600) {
  Grant g;
  g.queries = sorted_queries(std::move(queries));
  g.holder = crypto::fingerprint(holder_cert);
  g.purpose = holder_cert.purpose;
  g.not_before = now;
  g.not_after = now + lifetime;
  g.sig_issuer = crypto::sign(issuer.secret_key, canonical_dump(g.signing_payload()));
  return g;
}

inline ComputationRequest make_request(const crypto::Identity& client, const Query& query,
                                       const Grant& grant, std::int64_t now = kNow) {
  ComputationRequest r;
  r.query = query;
  r.certificate = client.certificate;
  r.grant = grant;
  r.timestamp = now;
  r.sig_client = crypto::sign(client.secret_key, canonical_dump(r.signing_payload()));
  return r;
}

inline GrantRequest make_grant_request(const crypto::Identity& client, std::vector<Query> queries) {
  GrantRequest r;
  r.certificate = client.certificate;
  r.queries = sorted_queries(std::move(queries));
  r.sig_client = crypto::sign(client.secret_key, canonical_dump(r.signing_payload()));
  return r;
}

inline nlohmann::json make_registration(const PeerProfile& profile, const crypto::Identity& identity,
                                        const std::string& address) {
  nlohmann::json profile_json = profile;
  Signature sig = crypto::sign(identity.secret_key, canonical_dump(profile_json));
  return nlohmann::json{{"address", address}, {"profile", profile_json}, {"sig_peer", sig.hex()}};
}

inline std::vector<std::string> group_of(std::size_t n) {
  std::vector<std::string> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back("peer-" + std::to_string(i));
  return g;
}

}  // namespace testfix
