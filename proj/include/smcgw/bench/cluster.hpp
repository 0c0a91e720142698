#pragma once

// In-process deployment harness: one gateway plus n peer daemons on
// loopback, with a generated two-level PKI and seeded reading stores. Used
// by the load harness and the integration/acceptance suites; the CLI tools
// assemble the same pieces from config files instead.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "smcgw/client/client.hpp"
#include "smcgw/gateway/service.hpp"
#include "smcgw/peer/daemon.hpp"

namespace smcgw::bench {

// The catalog query every cluster publishes: sum of 6-hour averages of
// power consumption across heater peers in kitchens and meeting rooms.
Query standard_query();

struct ClusterOptions {
  int peer_count = 10;
  std::string backend = "additive";  // "mock" | "additive"
  int min_group = 3;
  std::size_t queue_capacity = 100;
  int workers = 8;
  int peer_timeout_ms = 10000;
  std::string client_purpose = "dashboard display";
  // Seeds each peer with hourly readings inside the last six hours so the
  // standard query always has data. Disable to seed manually.
  bool seed_default_readings = true;
  std::function<void(gateway::GatewayConfig&)> gateway_tweak;
  std::function<void(int, peer::PeerConfig&)> peer_tweak;
};

class Cluster {
 public:
  explicit Cluster(ClusterOptions options);
  ~Cluster();

  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  gateway::GatewayService& gateway() { return *gateway_; }
  peer::PeerDaemon& peer(std::size_t i) { return *peers_[i]; }
  std::size_t peer_count() const { return peers_.size(); }

  const crypto::Identity& anchor() const { return anchor_; }
  const crypto::Identity& client_identity() const { return client_identity_; }
  client::ClientConfig client_config(const std::string& state_dir = "") const;
  client::GatewayClient make_client(const std::string& state_dir = "") const;

  // Direct recomputation of the expected result for `query` from the seeded
  // stores; the independent oracle for end-to-end checks.
  FixedValue expected_result(const Query& query, std::int64_t now) const;

 private:
  crypto::Identity anchor_;
  crypto::Identity client_identity_;
  std::unique_ptr<gateway::GatewayService> gateway_;
  std::vector<std::unique_ptr<peer::PeerDaemon>> peers_;
};

}  // namespace smcgw::bench
