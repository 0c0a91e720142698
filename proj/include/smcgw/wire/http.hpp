#pragma once

// Thin wrapper around cpp-httplib for JSON POST/GET with per-call timeouts.
// Addresses are "host:port" or full "http://..." URLs.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace smcgw::wire {

struct HttpResponse {
  int status = 0;
  nlohmann::json body;  // discarded() when the body was not JSON
  bool ok() const { return status >= 200 && status < 300; }
};

// nullopt on transport failure (unreachable, timeout).
std::optional<HttpResponse> http_post_json(const std::string& address, const std::string& path,
                                           const nlohmann::json& body, int timeout_ms);
std::optional<HttpResponse> http_get_json(const std::string& address, const std::string& path,
                                          int timeout_ms);

std::int64_t system_now_s();
std::int64_t steady_now_us();

}  // namespace smcgw::wire
