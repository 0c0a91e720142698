#include "smcgw/gateway/service.hpp"

#include <sodium.h>

#include <algorithm>
#include <chrono>

#include <httplib.h>

#include "smcgw/wire/http.hpp"

namespace smcgw::gateway {

namespace {

constexpr std::int64_t kOutcomeTtlSeconds = 300;

std::string random_session_id() {
  unsigned char raw[16];
  randombytes_buf(raw, sizeof raw);
  return to_hex(raw, sizeof raw);
}

nlohmann::json failure_json(wire::Reason reason, const std::string& detail, int http_status) {
  return nlohmann::json{{"status", "failed"},
                        {"reason", {{"code", wire::reason_code(reason)}, {"detail", detail}}},
                        {"_http_status", http_status}};
}

std::string describe(const Query& q) {
  return preprocessor_token(q.preprocessor) + " of " + q.input + " (" +
         preselector_token(q.preselector) + ") via " + q.protocol + " across peers where " +
         q.predicate.canonical();
}

}  // namespace

GatewayService::GatewayService(GatewayConfig config, crypto::Identity identity,
                               std::optional<crypto::Identity> grant_authority, Clock clock)
    : config_(std::move(config)),
      identity_(std::move(identity)),
      authority_(grant_authority ? std::move(*grant_authority) : identity_),
      clock_(std::move(clock)),
      queue_(config_.queue_capacity) {
  crypto::init();
  if (!clock_) clock_ = wire::system_now_s;
  refresh_queries();
}

GatewayService::~GatewayService() { stop(); }

wire::VerifyContext GatewayService::verify_context() const {
  wire::VerifyContext ctx;
  ctx.trust_anchors = config_.trust_anchors;
  ctx.grant_issuers = {authority_.certificate};
  ctx.now = clock_();
  return ctx;
}

std::vector<GatewayService::RegistryEntry> GatewayService::live_peers_snapshot() const {
  std::int64_t cutoff = clock_() - config_.liveness_window_s;
  std::vector<RegistryEntry> out;
  for (const auto& [_, entry] : registry_) {
    if (entry.last_seen >= cutoff) out.push_back(entry);
  }
  return out;
}

std::size_t GatewayService::live_peer_count() const {
  std::lock_guard lock(state_mutex_);
  return live_peers_snapshot().size();
}

void GatewayService::refresh_queries() {
  std::lock_guard lock(state_mutex_);
  std::vector<RegistryEntry> live = live_peers_snapshot();

  auto group_size = [&](const Query& q) {
    std::size_t n = 0;
    for (const auto& entry : live) {
      if (q.predicate.matches(entry.profile.labels) && entry.profile.inputs.count(q.input) &&
          entry.profile.protocols.count(q.protocol)) {
        ++n;
      }
    }
    return n;
  };

  std::vector<Query> candidates = config_.manual_queries;
  if (config_.enumerate_label_queries) {
    std::vector<LabelSet> label_sets;
    for (const auto& entry : live) label_sets.push_back(entry.profile.labels);
    for (const Label& label : label_superset(label_sets)) {
      for (const EnumerationTemplate& tmpl : config_.enumeration_templates) {
        Query q;
        q.predicate = Predicate::equals(label.key, label.value);
        q.preselector = tmpl.preselector;
        q.preprocessor = tmpl.preprocessor;
        q.protocol = tmpl.protocol;
        q.input = tmpl.input;
        candidates.push_back(q);
      }
    }
  }

  std::vector<Query> next;
  std::set<std::string> keys;
  for (const Query& q : candidates) {
    if (group_size(q) < static_cast<std::size_t>(config_.min_publishable_group)) continue;
    if (keys.insert(q.canonical_string()).second) next.push_back(q);
  }
  std::sort(next.begin(), next.end(), [](const Query& a, const Query& b) {
    return a.canonical_string() < b.canonical_string();
  });
  published_ = std::move(next);
  published_keys_ = std::move(keys);
}

std::vector<Query> GatewayService::published_queries() const {
  std::lock_guard lock(state_mutex_);
  return published_;
}

nlohmann::json GatewayService::metadata() const {
  nlohmann::json queries = nlohmann::json::array();
  for (const Query& q : published_queries()) {
    nlohmann::json item = q;
    item["canonical"] = q.canonical_string();
    item["description"] = describe(q);
    queries.push_back(std::move(item));
  }
  return nlohmann::json{{"queries", std::move(queries)}};
}

GrantOutcome GatewayService::handle_grant_request(const GrantRequest& request) {
  GrantOutcome out;
  wire::VerifyContext ctx = verify_context();
  wire::CheckResult formal = wire::check_grant_request(request, ctx);
  if (!formal.ok()) {
    out.reason = formal.reason;
    out.detail = formal.detail;
    return out;
  }
  if (request.queries.empty()) {
    out.reason = wire::Reason::PolicyDenied;
    out.detail = "empty query set";
    return out;
  }

  Fingerprint client = crypto::fingerprint(request.certificate);
  {
    std::lock_guard lock(state_mutex_);
    PhiContext phi_ctx;
    phi_ctx.now = ctx.now;
    phi_ctx.live_peers = live_peers_snapshot().size();
    phi_ctx.published = config_.phi_requires_published ? &published_keys_ : nullptr;
    // All-or-nothing: one denied query fails the whole request.
    for (const Query& q : request.queries) {
      if (!phi_permits(config_.phi_rules, q, client, phi_ctx)) {
        out.reason = wire::Reason::PolicyDenied;
        out.detail = q.canonical_string();
        return out;
      }
    }
  }

  Grant grant;
  grant.queries = sorted_queries(request.queries);
  grant.holder = client;
  grant.purpose = request.certificate.purpose;
  grant.not_before = ctx.now;
  grant.not_after = ctx.now + config_.grant_lifetime_s;
  grant.sig_issuer = crypto::sign(authority_.secret_key, canonical_dump(grant.signing_payload()));
  out.ok = true;
  out.grant = std::move(grant);
  return out;
}

std::vector<smc::SessionParticipant> GatewayService::translate_request(const Query& query,
                                                                       std::string* error) const {
  std::vector<smc::SessionParticipant> participants;
  {
    std::lock_guard lock(state_mutex_);
    for (const auto& entry : live_peers_snapshot()) {
      if (!query.predicate.matches(entry.profile.labels)) continue;
      if (entry.profile.inputs.count(query.input) == 0) continue;
      if (entry.profile.protocols.count(query.protocol) == 0) continue;
      participants.push_back({entry.profile.peer_id, entry.address, entry.profile.certificate});
    }
  }
  std::sort(participants.begin(), participants.end(),
            [](const auto& a, const auto& b) { return a.peer_id < b.peer_id; });
  if (participants.size() < static_cast<std::size_t>(config_.min_publishable_group)) {
    if (error) {
      *error = "matching live group of " + std::to_string(participants.size()) +
               " is below the minimum of " + std::to_string(config_.min_publishable_group);
    }
    participants.clear();
  }
  return participants;
}

Envelope GatewayService::make_envelope(const std::string& type, const std::string& session_id,
                                       nlohmann::json body) const {
  Envelope e;
  e.type = type;
  e.session_id = session_id;
  e.body = std::move(body);
  wire::sign_envelope(e, identity_.secret_key);
  return e;
}

std::vector<PeerDecision> GatewayService::fan_out(
    const std::vector<smc::SessionParticipant>& participants, const std::string& session_id,
    const std::string& type, const std::function<nlohmann::json(const std::string&)>& body_for,
    bool expect_signed_ack) const {
  std::vector<PeerDecision> decisions(participants.size());
  std::vector<std::thread> threads;
  threads.reserve(participants.size());
  // One thread per peer: all peers wait on us in parallel, like the
  // prototype's per-peer fan-out threads.
  for (std::size_t i = 0; i < participants.size(); ++i) {
    threads.emplace_back([&, i] {
      const auto& participant = participants[i];
      PeerDecision& decision = decisions[i];
      decision.peer_id = participant.peer_id;

      Envelope env = make_envelope(type, session_id, body_for(participant.peer_id));
      std::string path = type == "verify" ? "/sessions/verify" : "/sessions/" + session_id + "/share";
      std::int64_t t0 = wire::steady_now_us();
      auto resp = wire::http_post_json(participant.address, path, envelope_to_json(env, "sig_gateway"),
                                       config_.peer_timeout_ms);
      decision.latency_ms = (wire::steady_now_us() - t0) / 1000.0;
      if (!resp) {
        decision.reason = wire::Reason::PeerTimeout;
        decision.detail = "peer unreachable or timed out";
        return;
      }

      const nlohmann::json& payload = resp->body;
      if (payload.is_discarded()) {
        decision.reason = wire::Reason::PeerVeto;
        decision.detail = "unparseable peer response";
        return;
      }
      nlohmann::json body;
      if (expect_signed_ack && payload.contains("sig_peer")) {
        try {
          Envelope ack = envelope_from_json(payload, "sig_peer");
          if (!wire::verify_envelope(ack, participant.certificate)) {
            decision.reason = wire::Reason::PeerVeto;
            decision.detail = "peer ack signature invalid";
            return;
          }
          body = ack.body;
        } catch (const std::exception&) {
          decision.reason = wire::Reason::PeerVeto;
          decision.detail = "malformed peer ack";
          return;
        }
      } else {
        body = payload;
      }

      std::string status = body.value("status", body.value("decision", ""));
      if (status == "accept" || status == "ready" || status == "ok") {
        decision.ok = true;
        return;
      }
      decision.reason = wire::Reason::PeerVeto;
      if (body.contains("reason")) {
        if (auto r = wire::reason_from_code(body.at("reason").get<std::string>())) {
          decision.reason = *r;
        }
        decision.detail = body.value("detail", "");
      } else {
        decision.detail = body.value("error", "peer rejected the message");
      }
    });
  }
  for (auto& t : threads) t.join();
  return decisions;
}

void GatewayService::abort_session(const std::vector<smc::SessionParticipant>& participants,
                                   const std::string& session_id, const std::string& reason) const {
  for (const auto& participant : participants) {
    Envelope env = make_envelope("abort", session_id, {{"reason", reason}, {"to", participant.peer_id}});
    wire::http_post_json(participant.address, "/sessions/" + session_id + "/share",
                         envelope_to_json(env, "sig_gateway"), 2000);
  }
}

ComputationOutcome GatewayService::handle_computation_request(const ComputationRequest& request) {
  ComputationOutcome out;

  wire::CheckResult formal = wire::check_computation_request(request, verify_context());
  if (!formal.ok()) {
    out.reason = formal.reason;
    out.detail = formal.detail;
    return out;
  }

  std::string translate_error;
  std::vector<smc::SessionParticipant> participants =
      translate_request(request.query, &translate_error);
  if (participants.empty()) {
    out.reason = wire::Reason::GroupTooSmall;
    out.detail = translate_error;
    return out;
  }

  std::string session_id = random_session_id();
  out.session_id = session_id;
  std::vector<std::string> group;
  for (const auto& p : participants) group.push_back(p.peer_id);
  Signature sig_request =
      crypto::sign(identity_.secret_key, request_accountability_bytes(request));
  nlohmann::json request_json = request;

  // Inform peers: full request + group + our signature, one thread per peer.
  auto verify_body = [&](const std::string& peer_id) {
    return nlohmann::json{{"group", group},
                          {"request", request_json},
                          {"sig_request", sig_request.hex()},
                          {"to", peer_id}};
  };
  out.decisions = fan_out(participants, session_id, "verify", verify_body, true);

  auto failed = std::find_if(out.decisions.begin(), out.decisions.end(),
                             [](const PeerDecision& d) { return !d.ok; });
  if (failed != out.decisions.end()) {
    abort_session(participants, session_id, wire::reason_code(failed->reason));
    if (failed->reason == wire::Reason::PeerTimeout) {
      out.reason = wire::Reason::PeerTimeout;
      out.detail = "a peer did not answer within the timeout";
    } else {
      // Only the reason class leaves the gateway; never which peer vetoed.
      out.reason = wire::Reason::PeerVeto;
      out.detail = wire::reason_code(failed->reason);
    }
    store_outcome(out);
    return out;
  }

  // Session plan: group, reporter, addresses. Contributions stay peer-side.
  std::size_t reporter = 0;
  for (std::size_t i = 1; i < participants.size(); ++i) {
    if (participants[i].peer_id < participants[reporter].peer_id) reporter = i;
  }
  nlohmann::json participants_json = nlohmann::json::array();
  for (const auto& p : participants) participants_json.push_back(p);

  auto result_promise = std::make_shared<std::promise<Bytes>>();
  auto result_future = result_promise->get_future();
  {
    std::lock_guard lock(state_mutex_);
    pending_[session_id] = PendingSession{participants[reporter].certificate, result_promise};
  }
  auto cleanup_pending = [&] {
    std::lock_guard lock(state_mutex_);
    pending_.erase(session_id);
  };

  auto start_body = [&](const std::string& peer_id) {
    return nlohmann::json{{"backend", config_.backend},
                          {"gateway_address", address()},
                          {"participants", participants_json},
                          {"reporter", participants[reporter].peer_id},
                          {"to", peer_id}};
  };
  std::vector<PeerDecision> start_acks = fan_out(participants, session_id, "start", start_body, true);
  failed = std::find_if(start_acks.begin(), start_acks.end(),
                        [](const PeerDecision& d) { return !d.ok; });
  if (failed != start_acks.end()) {
    abort_session(participants, session_id, wire::reason_code(failed->reason));
    cleanup_pending();
    out.reason = failed->reason == wire::Reason::PeerTimeout ? wire::Reason::PeerTimeout
                                                             : wire::Reason::PeerVeto;
    out.detail = failed->reason == wire::Reason::PeerTimeout ? "a peer did not answer within the timeout"
                                                             : wire::reason_code(failed->reason);
    store_outcome(out);
    return out;
  }

  auto exchange_body = [&](const std::string& peer_id) { return nlohmann::json{{"to", peer_id}}; };
  std::vector<PeerDecision> exchange_acks =
      fan_out(participants, session_id, "exchange", exchange_body, false);
  failed = std::find_if(exchange_acks.begin(), exchange_acks.end(),
                        [](const PeerDecision& d) { return !d.ok; });
  if (failed != exchange_acks.end()) {
    abort_session(participants, session_id, wire::reason_code(failed->reason));
    cleanup_pending();
    out.reason = wire::Reason::PeerTimeout;
    out.detail = "exchange fan-out failed";
    store_outcome(out);
    return out;
  }

  if (result_future.wait_for(std::chrono::milliseconds(config_.peer_timeout_ms)) !=
      std::future_status::ready) {
    abort_session(participants, session_id, "RESULT_TIMEOUT");
    cleanup_pending();
    out.reason = wire::Reason::PeerTimeout;
    out.detail = "result not delivered within the timeout";
    store_outcome(out);
    return out;
  }
  out.result_ciphertext = result_future.get();
  cleanup_pending();
  out.ok = true;
  store_outcome(out);
  return out;
}

void GatewayService::store_outcome(const ComputationOutcome& outcome) {
  std::lock_guard lock(state_mutex_);
  std::int64_t now = clock_();
  for (auto it = outcomes_.begin(); it != outcomes_.end();) {
    it = (now - it->second.stored_at > kOutcomeTtlSeconds) ? outcomes_.erase(it) : std::next(it);
  }
  StoredOutcome stored;
  stored.status = outcome.ok ? "done" : "failed";
  stored.reason = outcome.ok ? "" : wire::reason_code(outcome.reason);
  stored.detail = outcome.detail;
  stored.ciphertext_hex = outcome.ok ? to_hex(outcome.result_ciphertext) : "";
  stored.stored_at = now;
  outcomes_[outcome.session_id] = std::move(stored);
}

nlohmann::json GatewayService::register_peer(const nlohmann::json& payload) {
  PeerProfile profile = payload.at("profile").get<PeerProfile>();
  profile.validate();  // throws std::invalid_argument
  std::string peer_address = payload.at("address").get<std::string>();
  Signature sig = Signature::from_hex_str(payload.at("sig_peer").get<std::string>());

  std::int64_t now = clock_();
  if (!crypto::verify_chain(profile.certificate, config_.trust_anchors, now)) {
    throw std::runtime_error("peer certificate does not chain to a configured trust anchor");
  }
  if (!crypto::verify(sig, profile.certificate, canonical_dump(profile.signing_payload()))) {
    throw std::runtime_error("profile signature invalid");
  }

  {
    std::lock_guard lock(state_mutex_);
    registry_[profile.peer_id] = RegistryEntry{profile, peer_address, now};
  }
  refresh_queries();
  return nlohmann::json{{"gateway_certificate", identity_.certificate}, {"status", "ok"}};
}

void GatewayService::set_result_tap(ResultTap tap) {
  std::lock_guard lock(state_mutex_);
  result_tap_ = std::move(tap);
}

void GatewayService::probe_loop() {
  while (probing_) {
    for (int i = 0; i < config_.health_probe_interval_s * 10 && probing_; ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    if (!probing_) return;
    std::vector<std::pair<std::string, std::string>> targets;
    {
      std::lock_guard lock(state_mutex_);
      for (const auto& [id, entry] : registry_) targets.emplace_back(id, entry.address);
    }
    for (const auto& [id, address] : targets) {
      auto resp = wire::http_get_json(address, "/health", 2000);
      if (resp && resp->ok()) {
        std::lock_guard lock(state_mutex_);
        auto it = registry_.find(id);
        if (it != registry_.end()) it->second.last_seen = clock_();
      }
    }
    refresh_queries();
  }
}

void GatewayService::start() {
  if (server_) return;
  queue_.start(config_.workers);
  server_ = std::make_unique<httplib::Server>();
  int threads = config_.http_threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

  auto respond = [](httplib::Response& res, nlohmann::json out) {
    int status = 200;
    if (out.contains("_http_status")) {
      status = out.at("_http_status").get<int>();
      out.erase("_http_status");
    }
    res.status = status;
    res.set_content(out.dump(), "application/json");
  };

  // Admission through the bounded queue; overflow is answered immediately.
  auto admit = [this, respond](std::function<nlohmann::json()> work, httplib::Response& res) {
    auto task = std::make_shared<std::packaged_task<nlohmann::json()>>(std::move(work));
    auto future = task->get_future();
    if (!queue_.try_enqueue([task] { (*task)(); })) {
      respond(res, failure_json(wire::Reason::RequestDropped, "request queue is full", 503));
      return;
    }
    respond(res, future.get());
  };

  server_->Get("/metadata", [this, respond](const httplib::Request&, httplib::Response& res) {
    respond(res, metadata());
  });

  server_->Post("/grants", [this, admit](const httplib::Request& req, httplib::Response& res) {
    admit(
        [this, body = req.body]() -> nlohmann::json {
          GrantRequest request;
          try {
            request = nlohmann::json::parse(body).get<GrantRequest>();
          } catch (const std::exception& e) {
            return nlohmann::json{{"status", "failed"},
                                  {"reason", {{"code", "BAD_REQUEST"}, {"detail", e.what()}}},
                                  {"_http_status", 400}};
          }
          GrantOutcome outcome = handle_grant_request(request);
          if (!outcome.ok) return failure_json(outcome.reason, outcome.detail, 403);
          return nlohmann::json{{"status", "ok"}, {"grant", outcome.grant}};
        },
        res);
  });

  server_->Post("/computations", [this, admit](const httplib::Request& req, httplib::Response& res) {
    admit(
        [this, body = req.body]() -> nlohmann::json {
          ComputationRequest request;
          try {
            request = nlohmann::json::parse(body).get<ComputationRequest>();
          } catch (const std::exception& e) {
            return nlohmann::json{{"status", "failed"},
                                  {"reason", {{"code", "BAD_REQUEST"}, {"detail", e.what()}}},
                                  {"_http_status", 400}};
          }
          ComputationOutcome outcome = handle_computation_request(request);
          if (!outcome.ok) {
            int status = outcome.reason == wire::Reason::PeerTimeout   ? 504
                         : outcome.reason == wire::Reason::PeerVeto    ? 409
                         : outcome.reason == wire::Reason::GroupTooSmall ? 409
                                                                         : 403;
            nlohmann::json out = failure_json(outcome.reason, outcome.detail, status);
            if (!outcome.session_id.empty()) out["session_id"] = outcome.session_id;
            return out;
          }
          return nlohmann::json{{"accepted", true},
                                {"result", {{"ciphertext", to_hex(outcome.result_ciphertext)}}},
                                {"session_id", outcome.session_id},
                                {"status", "ok"}};
        },
        res);
  });

  server_->Get(R"(/computations/([0-9a-f]+))",
               [this, respond](const httplib::Request& req, httplib::Response& res) {
                 std::string id = req.matches[1];
                 std::lock_guard lock(state_mutex_);
                 if (auto it = outcomes_.find(id); it != outcomes_.end()) {
                   nlohmann::json out{{"session_id", id}, {"status", it->second.status}};
                   if (it->second.status == "done") {
                     out["result"] = {{"ciphertext", it->second.ciphertext_hex}};
                   } else {
                     out["reason"] = {{"code", it->second.reason}, {"detail", it->second.detail}};
                   }
                   respond(res, out);
                 } else if (pending_.count(id)) {
                   respond(res, nlohmann::json{{"session_id", id}, {"status", "pending"}});
                 } else {
                   respond(res, nlohmann::json{{"error", "unknown session"}, {"_http_status", 404}});
                 }
               });

  server_->Get("/stats", [this, respond](const httplib::Request&, httplib::Response& res) {
    BoundedQueue::Stats s = queue_.stats();
    respond(res, nlohmann::json{{"capacity", s.capacity},
                                {"completed", s.completed},
                                {"drops", s.drops},
                                {"live_peers", live_peer_count()},
                                {"peak_outstanding", s.peak_outstanding},
                                {"queue_depth", s.depth},
                                {"outstanding", s.outstanding},
                                {"workers_busy", s.workers_busy}});
  });

  server_->Post("/stats/reset", [this, respond](const httplib::Request&, httplib::Response& res) {
    queue_.reset_stats();
    respond(res, nlohmann::json{{"status", "ok"}});
  });

  server_->Post("/peers/register", [this, respond](const httplib::Request& req, httplib::Response& res) {
    try {
      nlohmann::json payload = nlohmann::json::parse(req.body);
      respond(res, register_peer(payload));
    } catch (const std::invalid_argument& e) {
      respond(res, nlohmann::json{{"error", e.what()}, {"_http_status", 400}});
    } catch (const std::exception& e) {
      respond(res, nlohmann::json{{"error", e.what()}, {"_http_status", 403}});
    }
  });

  server_->Post("/internal/results", [this, respond](const httplib::Request& req, httplib::Response& res) {
    try {
      nlohmann::json payload = nlohmann::json::parse(req.body);
      Envelope env = envelope_from_json(payload, "sig_peer");
      Bytes ciphertext = from_hex(env.body.at("ciphertext").get<std::string>());

      std::shared_ptr<std::promise<Bytes>> promise;
      ResultTap tap;
      {
        std::lock_guard lock(state_mutex_);
        auto it = pending_.find(env.session_id);
        if (it == pending_.end()) {
          respond(res, nlohmann::json{{"error", "no pending session"}, {"_http_status", 404}});
          return;
        }
        if (!wire::verify_envelope(env, it->second.reporter_cert)) {
          respond(res, nlohmann::json{{"error", "reporter signature invalid"}, {"_http_status", 403}});
          return;
        }
        promise = it->second.result;
        pending_.erase(it);
        tap = result_tap_;
      }
      if (tap) tap(env.session_id, ciphertext);
      promise->set_value(std::move(ciphertext));
      respond(res, nlohmann::json{{"status", "ok"}});
    } catch (const std::exception& e) {
      respond(res, nlohmann::json{{"error", e.what()}, {"_http_status", 400}});
    }
  });

  if (config_.listen_port == 0) {
    port_ = server_->bind_to_any_port(config_.listen_host);
  } else {
    if (!server_->bind_to_port(config_.listen_host, config_.listen_port)) {
      throw std::runtime_error("cannot bind " + config_.listen_host + ":" +
                               std::to_string(config_.listen_port));
    }
    port_ = config_.listen_port;
  }
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();

  probing_ = true;
  probe_thread_ = std::thread([this] { probe_loop(); });
}

void GatewayService::stop() {
  probing_ = false;
  if (probe_thread_.joinable()) probe_thread_.join();
  if (server_) {
    server_->stop();
    if (server_thread_.joinable()) server_thread_.join();
    server_.reset();
  }
  queue_.stop();
}

}  // namespace smcgw::gateway
