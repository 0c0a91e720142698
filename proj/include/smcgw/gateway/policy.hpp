#pragma once

// The gateway access-control structure Φ: an ordered set of allow rules
// evaluated against (query, client certificate, context). Deny by default.
// Context conditions cover what the gateway actually knows: the current
// time of day and how many live peers are connected.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "smcgw/model/certificate.hpp"
#include "smcgw/model/query.hpp"

namespace smcgw::gateway {

struct AccessRule {
  std::string client_fpr = "*";                 // "*" matches any client
  std::vector<std::string> queries = {"*"};     // canonical query strings, or "*"
  // Permitted window [start_hour, end_hour) in UTC; wraps past midnight.
  std::optional<std::pair<int, int>> hours_utc;
  std::optional<int> min_live_peers;
};

void to_json(nlohmann::json& j, const AccessRule& r);
void from_json(const nlohmann::json& j, AccessRule& r);

struct PhiContext {
  std::int64_t now = 0;
  std::size_t live_peers = 0;
  // When set, only queries currently published in Q are permitted.
  const std::set<std::string>* published = nullptr;
};

bool phi_permits(const std::vector<AccessRule>& rules, const Query& query,
                 const Fingerprint& client_fpr, const PhiContext& ctx);

}  // namespace smcgw::gateway
