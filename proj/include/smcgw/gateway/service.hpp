#pragma once

// The SMC gateway: publishes the query catalog, issues grants, verifies and
// orchestrates computation requests, fans the session out to the selected
// peers and relays the sealed result. Holds (Q, Phi) plus the peer registry
// and never sees raw readings or plaintext results.
//
// HTTP surface:
//   GET  /metadata               query catalog
//   POST /grants                 GrantRequest -> Grant | failure
//   POST /computations           ComputationRequest -> accept + result | failure
//   GET  /computations/{id}      poll fallback
//   GET  /stats                  queue + worker counters
//   POST /stats/reset
//   POST /peers/register         pairing
//   POST /internal/results       reporter result delivery
//
// Grant and computation requests are admitted through one bounded queue
// (default capacity 100); overflow is rejected immediately.

#include <atomic>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/gateway/policy.hpp"
#include "smcgw/gateway/queue.hpp"
#include "smcgw/model/messages.hpp"
#include "smcgw/model/peer_profile.hpp"
#include "smcgw/smc/backend.hpp"
#include "smcgw/wire/checks.hpp"

namespace httplib {
class Server;
}

namespace smcgw::gateway {

using Clock = std::function<std::int64_t()>;

struct EnumerationTemplate {
  std::string input;
  std::string protocol = "sum";
  Preselector preselector = Preselector::Last6Hours;
  Preprocessor preprocessor = Preprocessor::Average;
};

struct GatewayConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 0;
  std::vector<Certificate> trust_anchors;
  std::vector<Query> manual_queries;
  std::vector<AccessRule> phi_rules;
  bool phi_requires_published = true;
  // Optional auto-derivation of one "k = v" query per label pair, crossed
  // with these templates.
  bool enumerate_label_queries = false;
  std::vector<EnumerationTemplate> enumeration_templates;
  std::size_t queue_capacity = 100;
  int workers = 8;
  int peer_timeout_ms = 10000;
  std::int64_t grant_lifetime_s = 3600;
  int min_publishable_group = 3;
  std::int64_t liveness_window_s = 60;
  int health_probe_interval_s = 15;
  std::string backend = "additive";  // "mock" | "additive"
  int http_threads = 320;
};

struct PeerDecision {
  std::string peer_id;
  bool ok = false;
  wire::Reason reason = wire::Reason::Ok;
  std::string detail;
  double latency_ms = 0;
};

struct GrantOutcome {
  bool ok = false;
  Grant grant;
  wire::Reason reason = wire::Reason::Ok;
  std::string detail;
};

struct ComputationOutcome {
  bool ok = false;
  std::string session_id;
  Bytes result_ciphertext;
  wire::Reason reason = wire::Reason::Ok;
  std::string detail;
  std::vector<PeerDecision> decisions;  // per-peer verify decisions + latencies
};

// Observes (and may mutate, for tamper experiments) the result ciphertext
// as it enters the gateway.
using ResultTap = std::function<void(const std::string& session_id, Bytes& ciphertext)>;

class GatewayService {
 public:
  GatewayService(GatewayConfig config, crypto::Identity identity,
                 std::optional<crypto::Identity> grant_authority = std::nullopt, Clock clock = {});
  ~GatewayService();

  GatewayService(const GatewayService&) = delete;
  GatewayService& operator=(const GatewayService&) = delete;

  void start();
  void stop();
  int port() const { return port_; }
  std::string address() const { return config_.listen_host + ":" + std::to_string(port_); }
  const Certificate& certificate() const { return identity_.certificate; }

  // Direct-call surfaces (the HTTP layer goes through these).
  nlohmann::json metadata() const;
  GrantOutcome handle_grant_request(const GrantRequest& request);
  ComputationOutcome handle_computation_request(const ComputationRequest& request);
  nlohmann::json register_peer(const nlohmann::json& payload);  // throws std::invalid_argument
  void refresh_queries();

  std::vector<Query> published_queries() const;
  std::size_t live_peer_count() const;
  BoundedQueue::Stats queue_stats() const { return queue_.stats(); }
  void reset_stats() { queue_.reset_stats(); }

  // Selects live registered peers matching the query (predicate, input,
  // protocol). Returns the plan skeleton participants.
  std::vector<smc::SessionParticipant> translate_request(const Query& query, std::string* error) const;

  void set_result_tap(ResultTap tap);

 private:
  struct RegistryEntry {
    PeerProfile profile;
    std::string address;
    std::int64_t last_seen = 0;
  };
  struct PendingSession {
    Certificate reporter_cert;
    std::shared_ptr<std::promise<Bytes>> result;
  };

  wire::VerifyContext verify_context() const;
  std::vector<RegistryEntry> live_peers_snapshot() const;
  Envelope make_envelope(const std::string& type, const std::string& session_id,
                         nlohmann::json body) const;
  std::vector<PeerDecision> fan_out(const std::vector<smc::SessionParticipant>& participants,
                                    const std::string& session_id, const std::string& type,
                                    const std::function<nlohmann::json(const std::string&)>& body_for,
                                    bool expect_signed_ack) const;
  void abort_session(const std::vector<smc::SessionParticipant>& participants,
                     const std::string& session_id, const std::string& reason) const;
  void probe_loop();
  void store_outcome(const ComputationOutcome& outcome);

  GatewayConfig config_;
  crypto::Identity identity_;
  crypto::Identity authority_;
  Clock clock_;

  mutable std::mutex state_mutex_;
  std::map<std::string, RegistryEntry> registry_;
  std::vector<Query> published_;          // sorted by canonical string
  std::set<std::string> published_keys_;  // canonical strings
  std::map<std::string, PendingSession> pending_;
  struct StoredOutcome {
    std::string status;  // "done" | "failed"
    std::string reason;
    std::string detail;
    std::string ciphertext_hex;
    std::int64_t stored_at = 0;
  };
  std::map<std::string, StoredOutcome> outcomes_;
  ResultTap result_tap_;

  BoundedQueue queue_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::thread probe_thread_;
  std::atomic<bool> probing_{false};
  int port_ = 0;
};

}  // namespace smcgw::gateway
