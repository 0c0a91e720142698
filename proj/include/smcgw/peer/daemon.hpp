#pragma once

// The sensor-platform agent. Stores readings, registers with a gateway,
// re-verifies forwarded computation requests before contributing, runs its
// side of the computation backends, and keeps the accountability log.
//
// HTTP surface:
//   POST /sessions/verify      forwarded request + group + gateway signature
//   POST /sessions/{id}/share  backend/orchestration messages (enveloped)
//   GET  /health
//   POST /ingest               test ingestion, mirrors `peer ingest`
//
// The daemon never sends a raw reading anywhere: under the additive backend
// only uniformly random shares and share sums leave the process. The mock
// backend ships contributions in clear to the reporter and is for protocol
// evaluation only.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/model/peer_profile.hpp"
#include "smcgw/peer/audit_log.hpp"
#include "smcgw/peer/policy.hpp"
#include "smcgw/peer/store.hpp"
#include "smcgw/smc/backend.hpp"

namespace httplib {
class Server;
}

namespace smcgw::peer {

using Clock = std::function<std::int64_t()>;

struct PeerConfig {
  std::string peer_id;
  std::string listen_host = "127.0.0.1";
  int listen_port = 0;  // 0 picks an ephemeral port
  LabelSet labels;
  std::set<std::string> inputs;
  std::set<std::string> protocols{"sum"};
  LocalPolicy policy;
  std::vector<Certificate> trust_anchors;
  // Certificates trusted to sign grants; when empty the pinned gateway
  // certificate acts as the grant issuer.
  std::vector<Certificate> grant_issuers;
  std::string data_dir;  // empty = fully in-memory
  int http_threads = 6;
};

// Observes every outgoing HTTP request the daemon makes (address, path,
// body); used by tests to assert what leaves the peer.
using EgressTap = std::function<void(const std::string&, const std::string&, const std::string&)>;

class PeerDaemon {
 public:
  PeerDaemon(PeerConfig config, crypto::Identity identity, Clock clock = {});
  ~PeerDaemon();

  PeerDaemon(const PeerDaemon&) = delete;
  PeerDaemon& operator=(const PeerDaemon&) = delete;

  void start();
  void stop();
  int port() const { return port_; }
  std::string address() const { return config_.listen_host + ":" + std::to_string(port_); }

  PeerProfile profile() const;
  const crypto::Identity& identity() const { return identity_; }
  const PeerConfig& config() const { return config_; }

  // Pairing: POSTs the profile to <gateway>/peers/register and pins the
  // returned gateway certificate. Retries transport failures with backoff;
  // throws std::runtime_error when the gateway rejects the registration.
  bool register_with_gateway(const std::string& gateway_address, int attempts = 3);

  void pin_gateway_cert(const Certificate& cert);
  std::optional<Certificate> pinned_gateway_cert() const;

  ReadingStore& store() { return store_; }
  AccountabilityLog& audit_log() { return *audit_log_; }

  void ingest(const std::string& input, const FixedValue& value,
              std::optional<std::int64_t> timestamp = std::nullopt);

  // Direct-call entry points for the HTTP handlers (also used by tests).
  nlohmann::json handle_verify(const nlohmann::json& envelope_json);
  nlohmann::json handle_session_message(const std::string& session_id,
                                        const nlohmann::json& envelope_json);

  void set_egress_tap(EgressTap tap);
  // Fault injection: delays every verify response by the given amount.
  void set_verify_delay_ms(int ms) { verify_delay_ms_ = ms; }

 private:
  struct Session {
    ComputationRequest request;
    std::vector<std::string> group;
    Signature request_sig_gateway;
    std::int64_t created_at = 0;
    // set by "start"
    std::string backend;
    std::string result_url;
    std::vector<smc::SessionParticipant> participants;
    std::string reporter_id;
    bool prepared = false;
    std::int64_t contribution = 0;  // milli-units
    // additive share state
    bool shares_sent = false;
    std::uint64_t kept_share = 0;
    std::map<std::string, std::uint64_t> received_shares;
    bool revealed = false;
    // reporter state
    std::map<std::string, std::uint64_t> reveals;
    std::map<std::string, std::int64_t> mock_contributions;
    bool finalized = false;
  };

  struct Outbox {
    std::string address;
    std::string path;
    nlohmann::json body;
  };

  nlohmann::json veto_response(const std::string& session_id, wire::Reason reason,
                               const std::string& detail = "");
  nlohmann::json ack_response(const std::string& type, const std::string& session_id,
                              nlohmann::json body);
  wire::VerifyContext verify_context() const;

  nlohmann::json on_start(Session& s, const std::string& session_id, const nlohmann::json& body);
  nlohmann::json on_exchange(Session& s, const std::string& session_id, std::vector<Outbox>& outbox);
  nlohmann::json on_share(Session& s, const std::string& session_id, const nlohmann::json& body,
                          std::vector<Outbox>& outbox);
  nlohmann::json on_reveal(Session& s, const std::string& session_id, const nlohmann::json& body,
                           std::vector<Outbox>& outbox);
  nlohmann::json on_contribution(Session& s, const std::string& session_id,
                                 const nlohmann::json& body, std::vector<Outbox>& outbox);
  nlohmann::json on_result_record(Session& s, const std::string& session_id,
                                  const nlohmann::json& body);

  void maybe_reveal(Session& s, const std::string& session_id, std::vector<Outbox>& outbox);
  void maybe_finalize(Session& s, const std::string& session_id, std::vector<Outbox>& outbox);
  void record_own_reveal(Session& s);
  void send_outbox(const std::vector<Outbox>& outbox);
  bool verify_peer_envelope(const Session& s, const Envelope& env, const std::string& from) const;

  std::size_t participant_index(const Session& s, const std::string& peer_id) const;

  PeerConfig config_;
  crypto::Identity identity_;
  Clock clock_;
  ReadingStore store_;
  std::unique_ptr<AccountabilityLog> audit_log_;
  RateTracker rate_;

  mutable std::mutex mutex_;  // sessions, pinned cert, rate tracker
  std::map<std::string, Session> sessions_;
  std::optional<Certificate> gateway_cert_;

  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  int port_ = 0;
  EgressTap egress_tap_;
  int verify_delay_ms_ = 0;
  int peer_timeout_ms_ = 10000;
};

}  // namespace smcgw::peer
