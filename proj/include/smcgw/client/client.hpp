#pragma once

// Reference client: fetch the catalog, obtain grants, issue computation
// requests, verify and decrypt results. A computation request is only ever
// sent with a stored, locally re-validated grant covering the exact query;
// grants renew automatically when less than a tenth of their lifetime is
// left.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/model/fixed.hpp"
#include "smcgw/model/messages.hpp"
#include "smcgw/wire/checks.hpp"

namespace smcgw::client {

using Clock = std::function<std::int64_t()>;

struct ClientConfig {
  std::string gateway_address;  // "host:port" or http URL
  std::vector<Certificate> trust_anchors;
  std::vector<Certificate> grant_issuers;  // certificates trusted to sign grants
  std::string state_dir;                   // grant cache; empty = in-memory only
  int timeout_ms = 30000;
};

struct Failure {
  wire::Reason reason = wire::Reason::Internal;
  std::string detail;
  int http_status = 0;
};

template <typename T>
struct Result {
  std::optional<T> value;
  Failure failure;
  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  const T* operator->() const { return &*value; }
};

struct ComputeSuccess {
  FixedValue value;
  std::string session_id;
};

class GatewayClient {
 public:
  GatewayClient(ClientConfig config, crypto::Identity identity, Clock clock = {});

  Result<std::vector<Query>> fetch_metadata();
  // All-or-nothing grant for the given query set; caches on success.
  Result<Grant> request_grant(const std::vector<Query>& queries);
  // Uses a cached valid grant or renews one, then runs the computation and
  // opens the sealed result.
  Result<ComputeSuccess> compute(const Query& query);

  // Local grant handling (exposed for tests and the CLI).
  std::optional<Grant> stored_grant_for(const Query& query) const;
  bool grant_valid(const Grant& grant, bool for_use) const;
  void store_grant(const Grant& grant);
  std::vector<Grant> stored_grants() const;

  GrantRequest build_grant_request(const std::vector<Query>& queries) const;
  ComputationRequest build_computation_request(const Query& query, const Grant& grant,
                                               std::optional<std::int64_t> timestamp = {}) const;
  // Sends a prebuilt request without touching the grant cache; used by the
  // CLI plumbing and by attack-scenario tests.
  Result<ComputeSuccess> send_computation_request(const ComputationRequest& request);

  const crypto::Identity& identity() const { return identity_; }

 private:
  std::string cache_path(const Grant& grant) const;
  void load_cache();

  ClientConfig config_;
  crypto::Identity identity_;
  Clock clock_;
  std::vector<Grant> grants_;
};

}  // namespace smcgw::client
