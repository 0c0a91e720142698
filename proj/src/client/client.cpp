#include "smcgw/client/client.hpp"

#include <sodium.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "smcgw/smc/result.hpp"
#include "smcgw/wire/http.hpp"

namespace smcgw::client {

namespace {

Failure transport_failure() {
  return Failure{wire::Reason::PeerTimeout, "gateway unreachable or timed out", 0};
}

Failure from_response(const wire::HttpResponse& resp) {
  Failure f;
  f.http_status = resp.status;
  f.detail = "gateway error";
  if (!resp.body.is_discarded() && resp.body.contains("reason")) {
    const auto& reason = resp.body.at("reason");
    if (auto r = wire::reason_from_code(reason.value("code", ""))) f.reason = *r;
    f.detail = reason.value("detail", "");
  } else if (!resp.body.is_discarded() && resp.body.contains("error")) {
    f.detail = resp.body.at("error").get<std::string>();
  }
  return f;
}

}  // namespace

GatewayClient::GatewayClient(ClientConfig config, crypto::Identity identity, Clock clock)
    : config_(std::move(config)), identity_(std::move(identity)), clock_(std::move(clock)) {
  crypto::init();
  if (!clock_) clock_ = wire::system_now_s;
  load_cache();
}

void GatewayClient::load_cache() {
  grants_.clear();
  if (config_.state_dir.empty()) return;
  std::filesystem::create_directories(config_.state_dir + "/grants");
  for (const auto& entry : std::filesystem::directory_iterator(config_.state_dir + "/grants")) {
    if (entry.path().extension() != ".json") continue;
    try {
      std::ifstream in(entry.path());
      grants_.push_back(nlohmann::json::parse(in).at("grant").get<Grant>());
    } catch (const std::exception&) {
      // Unreadable cache entries are ignored; they get rewritten on renewal.
    }
  }
}

std::string GatewayClient::cache_path(const Grant& grant) const {
  std::string joined;
  for (const Query& q : grant.queries) joined += q.canonical_string() + "\n";
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(joined.data()), joined.size());
  return config_.state_dir + "/grants/" + to_hex(digest, sizeof digest) + ".json";
}

void GatewayClient::store_grant(const Grant& grant) {
  grants_.erase(std::remove_if(grants_.begin(), grants_.end(),
                               [&](const Grant& g) {
                                 return queries_to_json(g.queries) == queries_to_json(grant.queries);
                               }),
                grants_.end());
  grants_.push_back(grant);
  if (config_.state_dir.empty()) return;
  std::ofstream out(cache_path(grant), std::ios::trunc);
  out << nlohmann::json{{"grant", grant}}.dump(2) << "\n";
}

bool GatewayClient::grant_valid(const Grant& grant, bool for_use) const {
  std::int64_t now = clock_();
  if (grant.holder != crypto::fingerprint(identity_.certificate)) return false;
  if (now < grant.not_before || now > grant.not_after) return false;
  if (for_use) {
    // Renew early: less than a tenth of the lifetime left counts as expired.
    std::int64_t lifetime = grant.not_after - grant.not_before;
    if ((grant.not_after - now) * 10 < lifetime) return false;
  }
  std::string payload = canonical_dump(grant.signing_payload());
  for (const Certificate& issuer : config_.grant_issuers) {
    if (crypto::verify(grant.sig_issuer, issuer, payload)) return true;
  }
  return false;
}

std::optional<Grant> GatewayClient::stored_grant_for(const Query& query) const {
  for (const Grant& grant : grants_) {
    if (grant.permits(query) && grant_valid(grant, true)) return grant;
  }
  return std::nullopt;
}

std::vector<Grant> GatewayClient::stored_grants() const { return grants_; }

Result<std::vector<Query>> GatewayClient::fetch_metadata() {
  auto resp = wire::http_get_json(config_.gateway_address, "/metadata", config_.timeout_ms);
  if (!resp) return {std::nullopt, transport_failure()};
  if (!resp->ok()) return {std::nullopt, from_response(*resp)};
  if (resp->body.is_discarded()) {
    return {std::nullopt,
            Failure{wire::Reason::Internal, "malformed server response (not JSON)", resp->status}};
  }
  try {
    std::vector<Query> queries;
    for (const auto& item : resp->body.at("queries")) queries.push_back(item.get<Query>());
    return {queries, {}};
  } catch (const std::exception& e) {
    return {std::nullopt, Failure{wire::Reason::Internal,
                                  std::string("malformed server response: ") + e.what(), resp->status}};
  }
}

GrantRequest GatewayClient::build_grant_request(const std::vector<Query>& queries) const {
  GrantRequest request;
  request.certificate = identity_.certificate;
  request.queries = sorted_queries(queries);
  request.sig_client =
      crypto::sign(identity_.secret_key, canonical_dump(request.signing_payload()));
  return request;
}

Result<Grant> GatewayClient::request_grant(const std::vector<Query>& queries) {
  GrantRequest request = build_grant_request(queries);
  auto resp = wire::http_post_json(config_.gateway_address, "/grants", request, config_.timeout_ms);
  if (!resp) return {std::nullopt, transport_failure()};
  if (!resp->ok()) return {std::nullopt, from_response(*resp)};
  try {
    Grant grant = resp->body.at("grant").get<Grant>();
    // A grant that does not verify locally is discarded, never stored.
    if (!grant_valid(grant, false)) {
      return {std::nullopt,
              Failure{wire::Reason::BadGrantSig, "grant failed local verification", resp->status}};
    }
    store_grant(grant);
    return {grant, {}};
  } catch (const std::exception& e) {
    return {std::nullopt, Failure{wire::Reason::Internal,
                                  std::string("malformed grant response: ") + e.what(), resp->status}};
  }
}

ComputationRequest GatewayClient::build_computation_request(const Query& query, const Grant& grant,
                                                            std::optional<std::int64_t> timestamp) const {
  ComputationRequest request;
  request.query = query;
  request.certificate = identity_.certificate;
  request.grant = grant;
  request.timestamp = timestamp.value_or(clock_());
  request.sig_client =
      crypto::sign(identity_.secret_key, canonical_dump(request.signing_payload()));
  return request;
}

Result<ComputeSuccess> GatewayClient::send_computation_request(const ComputationRequest& request) {
  auto resp = wire::http_post_json(config_.gateway_address, "/computations", request,
                                   config_.timeout_ms);
  if (!resp) return {std::nullopt, transport_failure()};
  if (!resp->ok()) return {std::nullopt, from_response(*resp)};
  try {
    smc::SealedResult sealed;
    sealed.session_id = resp->body.at("session_id").get<std::string>();
    sealed.ciphertext = from_hex(resp->body.at("result").at("ciphertext").get<std::string>());
    auto opened = smc::open_result(sealed, identity_, config_.trust_anchors, clock_());
    if (!opened) {
      return {std::nullopt,
              Failure{wire::Reason::TamperedResult,
                      "result failed decryption or signature verification", resp->status}};
    }
    return {ComputeSuccess{opened->value, opened->session_id}, {}};
  } catch (const std::exception& e) {
    return {std::nullopt, Failure{wire::Reason::Internal,
                                  std::string("malformed computation response: ") + e.what(),
                                  resp->status}};
  }
}

Result<ComputeSuccess> GatewayClient::compute(const Query& query) {
  std::optional<Grant> grant = stored_grant_for(query);
  if (!grant) {
    Result<Grant> renewed = request_grant({query});
    if (!renewed.ok()) return {std::nullopt, renewed.failure};
    grant = *renewed;
  }
  return send_computation_request(build_computation_request(query, *grant));
}

}  // namespace smcgw::client
