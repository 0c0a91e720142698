#include "smcgw/model/messages.hpp"

#include <algorithm>

namespace smcgw {

std::vector<Query> sorted_queries(std::vector<Query> queries) {
  std::sort(queries.begin(), queries.end(), [](const Query& a, const Query& b) {
    return a.canonical_string() < b.canonical_string();
  });
  queries.erase(std::unique(queries.begin(), queries.end()), queries.end());
  return queries;
}

nlohmann::json queries_to_json(const std::vector<Query>& queries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Query& q : sorted_queries(queries)) arr.push_back(q);
  return arr;
}

std::vector<Query> queries_from_json(const nlohmann::json& j) {
  std::vector<Query> out;
  for (const auto& item : j) out.push_back(item.get<Query>());
  return sorted_queries(std::move(out));
}

nlohmann::json Grant::signing_payload() const {
  return nlohmann::json{{"holder", holder},
                        {"not_after", not_after},
                        {"not_before", not_before},
                        {"purpose", purpose},
                        {"queries", queries_to_json(queries)}};
}

bool Grant::permits(const Query& q) const {
  return std::any_of(queries.begin(), queries.end(),
                     [&](const Query& granted) { return query_matches(granted, q); });
}

void to_json(nlohmann::json& j, const Grant& g) {
  j = g.signing_payload();
  j["sig_issuer"] = g.sig_issuer.hex();
}

void from_json(const nlohmann::json& j, Grant& g) {
  g.queries = queries_from_json(j.at("queries"));
  g.holder = j.at("holder").get<std::string>();
  g.purpose = j.at("purpose").get<std::string>();
  g.not_before = j.at("not_before").get<std::int64_t>();
  g.not_after = j.at("not_after").get<std::int64_t>();
  g.sig_issuer = Signature::from_hex_str(j.at("sig_issuer").get<std::string>());
}

nlohmann::json GrantRequest::signing_payload() const {
  return nlohmann::json{{"certificate", certificate}, {"queries", queries_to_json(queries)}};
}

void to_json(nlohmann::json& j, const GrantRequest& r) {
  j = r.signing_payload();
  j["sig_client"] = r.sig_client.hex();
}

void from_json(const nlohmann::json& j, GrantRequest& r) {
  r.certificate = j.at("certificate").get<Certificate>();
  r.queries = queries_from_json(j.at("queries"));
  r.sig_client = Signature::from_hex_str(j.at("sig_client").get<std::string>());
}

nlohmann::json ComputationRequest::signing_payload() const {
  return nlohmann::json{{"certificate", certificate},
                        {"grant", grant},
                        {"query", query},
                        {"timestamp", timestamp}};
}

void to_json(nlohmann::json& j, const ComputationRequest& r) {
  j = r.signing_payload();
  j["sig_client"] = r.sig_client.hex();
}

void from_json(const nlohmann::json& j, ComputationRequest& r) {
  r.query = j.at("query").get<Query>();
  r.certificate = j.at("certificate").get<Certificate>();
  r.grant = j.at("grant").get<Grant>();
  r.timestamp = j.at("timestamp").get<std::int64_t>();
  r.sig_client = Signature::from_hex_str(j.at("sig_client").get<std::string>());
}

nlohmann::json Envelope::signing_payload() const {
  return nlohmann::json{{"body", body}, {"session_id", session_id}, {"type", type}};
}

nlohmann::json envelope_to_json(const Envelope& e, const std::string& sig_field) {
  nlohmann::json j = e.signing_payload();
  j[sig_field] = e.sig.hex();
  return j;
}

Envelope envelope_from_json(const nlohmann::json& j, const std::string& sig_field) {
  Envelope e;
  e.type = j.at("type").get<std::string>();
  e.session_id = j.at("session_id").get<std::string>();
  e.body = j.at("body");
  e.sig = Signature::from_hex_str(j.at(sig_field).get<std::string>());
  return e;
}

nlohmann::json ResultRecord::signing_payload() const {
  return nlohmann::json{{"session_id", session_id}, {"value", value}};
}

std::string request_accountability_bytes(const ComputationRequest& r) {
  return canonical_dump(nlohmann::json(r));
}

void to_json(nlohmann::json& j, const AccountabilityEntry& e) {
  j = nlohmann::json{{"request", e.request},
                     {"seq", e.seq},
                     {"session_id", e.session_id},
                     {"sig_gateway", e.sig_gateway.hex()}};
  if (e.value) j["value"] = *e.value;
  if (e.sig_peer) j["sig_peer"] = e.sig_peer->hex();
  if (e.reporter_cert) j["reporter_cert"] = *e.reporter_cert;
  if (e.result_value) j["result_value"] = to_hex(*e.result_value);
}

void from_json(const nlohmann::json& j, AccountabilityEntry& e) {
  e.request = j.at("request").get<ComputationRequest>();
  e.seq = j.at("seq").get<std::int64_t>();
  e.session_id = j.at("session_id").get<std::string>();
  e.sig_gateway = Signature::from_hex_str(j.at("sig_gateway").get<std::string>());
  e.value.reset();
  e.sig_peer.reset();
  e.reporter_cert.reset();
  e.result_value.reset();
  if (j.contains("value")) e.value = j.at("value").get<std::string>();
  if (j.contains("sig_peer")) e.sig_peer = Signature::from_hex_str(j.at("sig_peer").get<std::string>());
  if (j.contains("reporter_cert")) e.reporter_cert = j.at("reporter_cert").get<Certificate>();
  if (j.contains("result_value")) e.result_value = from_hex(j.at("result_value").get<std::string>());
}

}  // namespace smcgw
