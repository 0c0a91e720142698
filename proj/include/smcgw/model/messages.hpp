#pragma once

// Signed protocol messages: authorization grants, the two client request
// types, the gateway/peer wire envelope, and accountability entries. Each
// signed structure exposes signing_payload() -- its canonical JSON with the
// structure's own signature field left out -- and signatures are computed
// over canonical_dump(signing_payload()).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smcgw/model/certificate.hpp"
#include "smcgw/model/query.hpp"

namespace smcgw {

// Query sets are serialized in canonical member order.
std::vector<Query> sorted_queries(std::vector<Query> queries);
nlohmann::json queries_to_json(const std::vector<Query>& queries);
std::vector<Query> queries_from_json(const nlohmann::json& j);

// Issuer-signed, time-bounded permission binding a set of queries to the
// fingerprint of a client certificate.
struct Grant {
  std::vector<Query> queries;
  Fingerprint holder;
  std::string purpose;
  std::int64_t not_before = 0;
  std::int64_t not_after = 0;
  Signature sig_issuer;

  nlohmann::json signing_payload() const;
  bool permits(const Query& q) const;
};

void to_json(nlohmann::json& j, const Grant& g);
void from_json(const nlohmann::json& j, Grant& g);

struct GrantRequest {
  Certificate certificate;
  std::vector<Query> queries;
  Signature sig_client;

  nlohmann::json signing_payload() const;
};

void to_json(nlohmann::json& j, const GrantRequest& r);
void from_json(const nlohmann::json& j, GrantRequest& r);

struct ComputationRequest {
  Query query;
  Certificate certificate;
  Grant grant;
  std::int64_t timestamp = 0;  // creation time, Unix seconds UTC
  Signature sig_client;

  nlohmann::json signing_payload() const;
};

void to_json(nlohmann::json& j, const ComputationRequest& r);
void from_json(const nlohmann::json& j, ComputationRequest& r);

// Transport envelope for gateway->peer and peer->peer messages. The body is
// message-specific; sig is by the sender over {body, session_id, type}. The
// JSON field name of the signature reflects the signer role ("sig_gateway"
// or "sig_peer").
struct Envelope {
  std::string type;
  std::string session_id;
  nlohmann::json body;
  Signature sig;

  nlohmann::json signing_payload() const;
};

nlohmann::json envelope_to_json(const Envelope& e, const std::string& sig_field);
Envelope envelope_from_json(const nlohmann::json& j, const std::string& sig_field);

// The record the result reporter signs; it travels to the client inside the
// sealed result ciphertext and to the participants for their logs.
struct ResultRecord {
  std::string session_id;
  std::string value;  // fixed-point decimal string

  nlohmann::json signing_payload() const;
};

// One line of a peer's append-only accountability log: the accepted request,
// the gateway's signature over it, and (when the session produced one) the
// result with the reporter's signature. The reporter additionally keeps the
// ciphertext blob it handed to the gateway.
struct AccountabilityEntry {
  std::int64_t seq = 0;
  std::string session_id;
  ComputationRequest request;
  Signature sig_gateway;  // over canonical_dump(request.signing_payload() + sig_client)
  std::optional<std::string> value;
  std::optional<Signature> sig_peer;
  std::optional<Certificate> reporter_cert;
  std::optional<Bytes> result_value;  // encrypted result blob (reporter only)
};

void to_json(nlohmann::json& j, const AccountabilityEntry& e);
void from_json(const nlohmann::json& j, AccountabilityEntry& e);

// Canonical bytes the gateway signs when accepting a computation request
// (the full request, client signature included).
std::string request_accountability_bytes(const ComputationRequest& r);

}  // namespace smcgw
