#include "smcgw/wire/http.hpp"

#include <chrono>
#include <memory>

#include <httplib.h>

namespace smcgw::wire {

namespace {

std::unique_ptr<httplib::Client> make_client(const std::string& address, int timeout_ms) {
  auto client = address.rfind("http", 0) == 0 ? std::make_unique<httplib::Client>(address)
                                              : std::make_unique<httplib::Client>("http://" + address);
  client->set_connection_timeout(0, timeout_ms * 1000LL);
  client->set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000LL);
  client->set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000LL);
  return client;
}

HttpResponse to_response(const httplib::Result& res) {
  HttpResponse out;
  out.status = res->status;
  out.body = nlohmann::json::parse(res->body, nullptr, false);
  return out;
}

}  // namespace

std::optional<HttpResponse> http_post_json(const std::string& address, const std::string& path,
                                           const nlohmann::json& body, int timeout_ms) {
  auto client = make_client(address, timeout_ms);
  auto res = client->Post(path, body.dump(), "application/json");
  if (!res) return std::nullopt;
  return to_response(res);
}

std::optional<HttpResponse> http_get_json(const std::string& address, const std::string& path,
                                          int timeout_ms) {
  auto client = make_client(address, timeout_ms);
  auto res = client->Get(path);
  if (!res) return std::nullopt;
  return to_response(res);
}

std::int64_t system_now_s() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::int64_t steady_now_us() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace smcgw::wire
