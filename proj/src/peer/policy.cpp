#include "smcgw/peer/policy.hpp"

#include <stdexcept>

#include "smcgw/crypto/identity.hpp"

namespace smcgw::peer {

void LocalPolicy::validate() const {
  if (min_group_size < 1) throw std::invalid_argument("min_group_size must be >= 1");
  if (max_request_age_s <= 0) throw std::invalid_argument("max_request_age_s must be positive");
  if (max_requests_per_client_per_hour <= 0) {
    throw std::invalid_argument("max_requests_per_client_per_hour must be positive");
  }
}

void to_json(nlohmann::json& j, const LocalPolicy& p) {
  j = nlohmann::json{{"min_group_size", p.min_group_size},
                     {"max_request_age_s", p.max_request_age_s},
                     {"max_requests_per_client_per_hour", p.max_requests_per_client_per_hour}};
  if (p.allowed_client_fprs) j["allowed_client_fprs"] = *p.allowed_client_fprs;
  if (p.allowed_purposes) j["allowed_purposes"] = *p.allowed_purposes;
}

void from_json(const nlohmann::json& j, LocalPolicy& p) {
  p = LocalPolicy{};
  if (j.contains("min_group_size")) p.min_group_size = j.at("min_group_size").get<int>();
  if (j.contains("max_request_age_s")) p.max_request_age_s = j.at("max_request_age_s").get<std::int64_t>();
  if (j.contains("max_requests_per_client_per_hour")) {
    p.max_requests_per_client_per_hour = j.at("max_requests_per_client_per_hour").get<int>();
  }
  if (j.contains("allowed_client_fprs")) {
    p.allowed_client_fprs = j.at("allowed_client_fprs").get<std::set<std::string>>();
  }
  if (j.contains("allowed_purposes")) {
    p.allowed_purposes = j.at("allowed_purposes").get<std::set<std::string>>();
  }
  p.validate();
}

bool RateTracker::record_and_check(const std::string& client_fpr, std::int64_t now,
                                   int max_per_hour) {
  auto& window = seen_[client_fpr];
  while (!window.empty() && window.front() <= now - 3600) window.pop_front();
  window.push_back(now);
  return static_cast<int>(window.size()) > max_per_hour;
}

Decision verify_computation_request(const ComputationRequest& request,
                                    const std::vector<std::string>& session_group,
                                    const LocalPolicy& policy, RateTracker* rate,
                                    const wire::VerifyContext& ctx) {
  // Recheck of the gateway's formal verification; a peer trusts no upstream
  // decision it can re-derive.
  wire::CheckResult formal = wire::check_computation_request(request, ctx);
  if (!formal.ok()) return Decision::veto(formal.reason, formal.detail);

  Fingerprint client = crypto::fingerprint(request.certificate);
  if (policy.allowed_client_fprs && policy.allowed_client_fprs->count(client) == 0) {
    return Decision::veto(wire::Reason::ClientNotAllowed);
  }
  if (policy.allowed_purposes && policy.allowed_purposes->count(request.grant.purpose) == 0) {
    return Decision::veto(wire::Reason::PurposeNotAllowed, request.grant.purpose);
  }
  if (session_group.size() < static_cast<std::size_t>(policy.min_group_size)) {
    return Decision::veto(wire::Reason::GroupTooSmall,
                          "group of " + std::to_string(session_group.size()));
  }
  if (ctx.now - request.timestamp > policy.max_request_age_s) {
    return Decision::veto(wire::Reason::StaleRequest,
                          "request is " + std::to_string(ctx.now - request.timestamp) + "s old");
  }
  if (rate && rate->record_and_check(client, ctx.now, policy.max_requests_per_client_per_hour)) {
    return Decision::veto(wire::Reason::RateLimitExceeded);
  }
  return Decision::accept();
}

}  // namespace smcgw::peer
