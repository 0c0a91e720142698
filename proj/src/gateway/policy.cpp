#include "smcgw/gateway/policy.hpp"

#include <algorithm>

namespace smcgw::gateway {

void to_json(nlohmann::json& j, const AccessRule& r) {
  j = nlohmann::json{{"client_fpr", r.client_fpr}, {"queries", r.queries}};
  if (r.hours_utc) j["hours_utc"] = {r.hours_utc->first, r.hours_utc->second};
  if (r.min_live_peers) j["min_live_peers"] = *r.min_live_peers;
}

void from_json(const nlohmann::json& j, AccessRule& r) {
  r = AccessRule{};
  if (j.contains("client_fpr")) r.client_fpr = j.at("client_fpr").get<std::string>();
  if (j.contains("queries")) r.queries = j.at("queries").get<std::vector<std::string>>();
  if (j.contains("hours_utc")) {
    r.hours_utc = std::make_pair(j.at("hours_utc").at(0).get<int>(), j.at("hours_utc").at(1).get<int>());
  }
  if (j.contains("min_live_peers")) r.min_live_peers = j.at("min_live_peers").get<int>();
}

namespace {

bool hour_in_window(std::int64_t now, const std::pair<int, int>& window) {
  int hour = static_cast<int>((now / 3600) % 24);
  auto [start, end] = window;
  if (start == end) return false;  // empty window permits nothing
  if (start < end) return hour >= start && hour < end;
  return hour >= start || hour < end;  // wraps past midnight
}

}  // namespace

bool phi_permits(const std::vector<AccessRule>& rules, const Query& query,
                 const Fingerprint& client_fpr, const PhiContext& ctx) {
  std::string canonical = query.canonical_string();
  if (ctx.published && ctx.published->count(canonical) == 0) return false;
  for (const AccessRule& rule : rules) {
    if (rule.client_fpr != "*" && rule.client_fpr != client_fpr) continue;
    bool query_ok = std::any_of(rule.queries.begin(), rule.queries.end(),
                                [&](const std::string& q) { return q == "*" || q == canonical; });
    if (!query_ok) continue;
    if (rule.hours_utc && !hour_in_window(ctx.now, *rule.hours_utc)) continue;
    if (rule.min_live_peers && ctx.live_peers < static_cast<std::size_t>(*rule.min_live_peers)) continue;
    return true;
  }
  return false;
}

}  // namespace smcgw::gateway
