#pragma once

// Peer-local privacy policy: the last word on whether this peer's data joins
// a session. Evaluated after the formal request checks, in this order:
// client allowlist, purpose allowlist, group size, request recency, rate
// limit. Deterministic given policy + request + clock.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "smcgw/model/messages.hpp"
#include "smcgw/wire/checks.hpp"

namespace smcgw::peer {

struct LocalPolicy {
  std::optional<std::set<std::string>> allowed_client_fprs;  // absent = any client
  std::optional<std::set<std::string>> allowed_purposes;     // absent = any purpose
  int min_group_size = 3;
  std::int64_t max_request_age_s = 120;
  int max_requests_per_client_per_hour = 600;

  void validate() const;  // all limits positive
};

void to_json(nlohmann::json& j, const LocalPolicy& p);
void from_json(const nlohmann::json& j, LocalPolicy& p);

// Sliding one-hour request counter per client fingerprint.
class RateTracker {
 public:
  // Records the request and reports whether it exceeded the budget.
  bool record_and_check(const std::string& client_fpr, std::int64_t now, int max_per_hour);

 private:
  std::map<std::string, std::deque<std::int64_t>> seen_;
};

struct Decision {
  bool accepted = false;
  wire::Reason reason = wire::Reason::Ok;
  std::string detail;

  static Decision accept() { return {true, wire::Reason::Ok, ""}; }
  static Decision veto(wire::Reason r, std::string detail = "") { return {false, r, std::move(detail)}; }
};

// The peer-side re-verification: re-runs the formal request checks, then
// applies the local policy. `rate` may be null (no rate accounting).
Decision verify_computation_request(const ComputationRequest& request,
                                    const std::vector<std::string>& session_group,
                                    const LocalPolicy& policy, RateTracker* rate,
                                    const wire::VerifyContext& ctx);

}  // namespace smcgw::peer
