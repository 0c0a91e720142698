#include "smcgw/peer/daemon.hpp"

#include <sodium.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include <httplib.h>

#include "smcgw/smc/result.hpp"
#include "smcgw/wire/http.hpp"

namespace smcgw::peer {

namespace {

constexpr std::int64_t kSessionTtlSeconds = 600;

bool is_gateway_message(const std::string& type) {
  return type == "verify" || type == "start" || type == "exchange" || type == "abort";
}

smc::Rng64 sodium_rng() {
  return [] {
    std::uint64_t v;
    randombytes_buf(&v, sizeof v);
    return v;
  };
}

}  // namespace

PeerDaemon::PeerDaemon(PeerConfig config, crypto::Identity identity, Clock clock)
    : config_(std::move(config)), identity_(std::move(identity)), clock_(std::move(clock)) {
  crypto::init();
  if (!clock_) clock_ = wire::system_now_s;
  config_.policy.validate();
  if (!config_.data_dir.empty()) {
    std::filesystem::create_directories(config_.data_dir);
    store_ = ReadingStore(config_.data_dir + "/readings.jsonl");
    audit_log_ = std::make_unique<AccountabilityLog>(config_.data_dir + "/audit_log.jsonl");
    std::string pairing = config_.data_dir + "/pairing.json";
    if (std::filesystem::exists(pairing)) {
      std::ifstream in(pairing);
      nlohmann::json j = nlohmann::json::parse(in);
      gateway_cert_ = j.at("gateway_certificate").get<Certificate>();
    }
  } else {
    audit_log_ = std::make_unique<AccountabilityLog>();
  }
}

PeerDaemon::~PeerDaemon() { stop(); }

PeerProfile PeerDaemon::profile() const {
  PeerProfile p;
  p.peer_id = config_.peer_id;
  p.certificate = identity_.certificate;
  p.labels = config_.labels;
  p.inputs = config_.inputs;
  p.protocols = config_.protocols;
  return p;
}

void PeerDaemon::start() {
  if (server_) return;
  server_ = std::make_unique<httplib::Server>();
  int threads = config_.http_threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

  server_->Post("/sessions/verify", [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json in = nlohmann::json::parse(req.body, nullptr, false);
    if (in.is_discarded()) {
      res.status = 400;
      res.set_content(R"({"error":"bad json"})", "application/json");
      return;
    }
    res.set_content(handle_verify(in).dump(), "application/json");
  });

  server_->Post(R"(/sessions/([^/]+)/share)", [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json in = nlohmann::json::parse(req.body, nullptr, false);
    if (in.is_discarded()) {
      res.status = 400;
      res.set_content(R"({"error":"bad json"})", "application/json");
      return;
    }
    nlohmann::json out = handle_session_message(req.matches[1], in);
    if (out.contains("error")) res.status = 409;
    res.set_content(out.dump(), "application/json");
  });

  server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::json out{{"peer_id", config_.peer_id},
                       {"status", "ok"},
                       {"log_healthy", audit_log_->healthy()}};
    res.set_content(out.dump(), "application/json");
  });

  server_->Post("/ingest", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      nlohmann::json in = nlohmann::json::parse(req.body);
      std::optional<std::int64_t> ts;
      if (in.contains("timestamp")) ts = in.at("timestamp").get<std::int64_t>();
      ingest(in.at("input").get<std::string>(), FixedValue::parse(in.at("value").get<std::string>()), ts);
      res.set_content(R"({"status":"ok"})", "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
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
}

void PeerDaemon::stop() {
  if (!server_) return;
  server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  server_.reset();
}

void PeerDaemon::set_egress_tap(EgressTap tap) {
  std::lock_guard lock(mutex_);
  egress_tap_ = std::move(tap);
}

void PeerDaemon::pin_gateway_cert(const Certificate& cert) {
  std::lock_guard lock(mutex_);
  gateway_cert_ = cert;
  if (!config_.data_dir.empty()) {
    std::ofstream out(config_.data_dir + "/pairing.json", std::ios::trunc);
    out << nlohmann::json{{"gateway_certificate", cert}}.dump(2) << "\n";
  }
}

std::optional<Certificate> PeerDaemon::pinned_gateway_cert() const {
  std::lock_guard lock(mutex_);
  return gateway_cert_;
}

bool PeerDaemon::register_with_gateway(const std::string& gateway_address, int attempts) {
  PeerProfile p = profile();
  p.validate();
  nlohmann::json profile_json = p;
  Signature sig = crypto::sign(identity_.secret_key, canonical_dump(profile_json));
  nlohmann::json payload{{"address", address()}, {"profile", profile_json}, {"sig_peer", sig.hex()}};

  for (int attempt = 0; attempt < attempts; ++attempt) {
    {
      std::lock_guard lock(mutex_);
      if (egress_tap_) egress_tap_(gateway_address, "/peers/register", payload.dump());
    }
    auto resp = wire::http_post_json(gateway_address, "/peers/register", payload, 5000);
    if (!resp) {
      std::this_thread::sleep_for(std::chrono::milliseconds(300 << attempt));
      continue;
    }
    if (resp->ok()) {
      Certificate cert = resp->body.at("gateway_certificate").get<Certificate>();
      if (!crypto::verify_chain(cert, config_.trust_anchors, clock_())) {
        throw std::runtime_error("gateway certificate does not chain to a configured trust anchor");
      }
      pin_gateway_cert(cert);
      return true;
    }
    throw std::runtime_error("registration rejected: " + resp->body.dump());
  }
  return false;
}

void PeerDaemon::ingest(const std::string& input, const FixedValue& value,
                        std::optional<std::int64_t> timestamp) {
  if (config_.inputs.count(input) == 0) {
    throw std::invalid_argument("input '" + input + "' is not provided by this peer");
  }
  store_.append(Reading{input, value, timestamp.value_or(clock_())});
}

wire::VerifyContext PeerDaemon::verify_context() const {
  wire::VerifyContext ctx;
  ctx.trust_anchors = config_.trust_anchors;
  ctx.grant_issuers = config_.grant_issuers;
  if (ctx.grant_issuers.empty() && gateway_cert_) ctx.grant_issuers = {*gateway_cert_};
  ctx.now = clock_();
  return ctx;
}

nlohmann::json PeerDaemon::veto_response(const std::string& session_id, wire::Reason reason,
                                         const std::string& detail) {
  nlohmann::json body{{"decision", "veto"},
                      {"detail", detail},
                      {"peer_id", config_.peer_id},
                      {"reason", wire::reason_code(reason)},
                      {"to", "gateway"}};
  return ack_response("verify_ack", session_id, std::move(body));
}

nlohmann::json PeerDaemon::ack_response(const std::string& type, const std::string& session_id,
                                        nlohmann::json body) {
  Envelope e;
  e.type = type;
  e.session_id = session_id;
  e.body = std::move(body);
  wire::sign_envelope(e, identity_.secret_key);
  return envelope_to_json(e, "sig_peer");
}

nlohmann::json PeerDaemon::handle_verify(const nlohmann::json& envelope_json) {
  if (verify_delay_ms_ > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(verify_delay_ms_));
  }
  Envelope env;
  try {
    env = envelope_from_json(envelope_json, "sig_gateway");
  } catch (const std::exception&) {
    return veto_response("", wire::Reason::GatewaySigInvalid, "malformed envelope");
  }

  std::lock_guard lock(mutex_);
  if (!gateway_cert_) {
    return veto_response(env.session_id, wire::Reason::GatewaySigInvalid, "no gateway pairing");
  }
  if (!wire::verify_envelope(env, *gateway_cert_)) {
    return veto_response(env.session_id, wire::Reason::GatewaySigInvalid, "envelope signature");
  }

  ComputationRequest request;
  std::vector<std::string> group;
  Signature request_sig;
  try {
    if (env.body.at("to").get<std::string>() != config_.peer_id) {
      return veto_response(env.session_id, wire::Reason::GatewaySigInvalid, "addressee mismatch");
    }
    request = env.body.at("request").get<ComputationRequest>();
    group = env.body.at("group").get<std::vector<std::string>>();
    request_sig = Signature::from_hex_str(env.body.at("sig_request").get<std::string>());
  } catch (const std::exception& e) {
    return veto_response(env.session_id, wire::Reason::GatewaySigInvalid,
                         std::string("malformed verify body: ") + e.what());
  }
  if (!crypto::verify(request_sig, *gateway_cert_, request_accountability_bytes(request))) {
    return veto_response(env.session_id, wire::Reason::GatewaySigInvalid, "request signature");
  }

  Decision decision = verify_computation_request(request, group, config_.policy, &rate_, verify_context());
  if (!decision.accepted) {
    return veto_response(env.session_id, decision.reason, decision.detail);
  }

  // Expired sessions are reaped lazily.
  std::int64_t now = clock_();
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    it = (now - it->second.created_at > kSessionTtlSeconds) ? sessions_.erase(it) : std::next(it);
  }

  Session s;
  s.request = std::move(request);
  s.group = std::move(group);
  s.request_sig_gateway = std::move(request_sig);
  s.created_at = now;
  sessions_[env.session_id] = std::move(s);

  nlohmann::json body{{"decision", "accept"}, {"peer_id", config_.peer_id}, {"to", "gateway"}};
  return ack_response("verify_ack", env.session_id, std::move(body));
}

std::size_t PeerDaemon::participant_index(const Session& s, const std::string& peer_id) const {
  for (std::size_t i = 0; i < s.participants.size(); ++i) {
    if (s.participants[i].peer_id == peer_id) return i;
  }
  return s.participants.size();
}

bool PeerDaemon::verify_peer_envelope(const Session& s, const Envelope& env,
                                      const std::string& from) const {
  std::size_t idx = participant_index(s, from);
  if (idx >= s.participants.size()) return false;
  return wire::verify_envelope(env, s.participants[idx].certificate);
}

nlohmann::json PeerDaemon::handle_session_message(const std::string& session_id,
                                                  const nlohmann::json& envelope_json) {
  std::string type = envelope_json.value("type", "");
  std::string sig_field = is_gateway_message(type) ? "sig_gateway" : "sig_peer";
  Envelope env;
  try {
    env = envelope_from_json(envelope_json, sig_field);
  } catch (const std::exception&) {
    return {{"error", "malformed envelope"}};
  }
  if (env.session_id != session_id) return {{"error", "session id mismatch"}};

  std::vector<Outbox> outbox;
  nlohmann::json response;
  {
    std::lock_guard lock(mutex_);
    if (is_gateway_message(type)) {
      if (!gateway_cert_ || !wire::verify_envelope(env, *gateway_cert_)) {
        return {{"error", "gateway signature invalid"}};
      }
    }
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return {{"error", "unknown session"}};
    Session& s = it->second;

    if (type == "abort") {
      sessions_.erase(it);
      return {{"status", "ok"}};
    }
    if (type == "start") {
      response = on_start(s, session_id, env.body);
    } else if (type == "exchange") {
      response = on_exchange(s, session_id, outbox);
    } else {
      std::string from = env.body.value("from", "");
      if (!verify_peer_envelope(s, env, from)) {
        return {{"error", "peer signature invalid"}};
      }
      if (type == "share") {
        response = on_share(s, session_id, env.body, outbox);
      } else if (type == "reveal") {
        response = on_reveal(s, session_id, env.body, outbox);
      } else if (type == "contribution") {
        response = on_contribution(s, session_id, env.body, outbox);
      } else if (type == "result_record") {
        response = on_result_record(s, session_id, env.body);
      } else {
        response = {{"error", "unknown message type"}};
      }
    }
  }
  send_outbox(outbox);
  return response;
}

nlohmann::json PeerDaemon::on_start(Session& s, const std::string& session_id,
                                    const nlohmann::json& body) {
  try {
    s.backend = body.at("backend").get<std::string>();
    s.participants = body.at("participants").get<std::vector<smc::SessionParticipant>>();
    s.reporter_id = body.at("reporter").get<std::string>();
    s.result_url = body.at("gateway_address").get<std::string>();
  } catch (const std::exception& e) {
    return {{"error", std::string("malformed start body: ") + e.what()}};
  }
  if (participant_index(s, config_.peer_id) >= s.participants.size()) {
    return {{"error", "this peer is not part of the session plan"}};
  }

  const Query& query = s.request.query;
  if (query.protocol != "sum" || config_.protocols.count(query.protocol) == 0) {
    return {{"status", "veto"}, {"reason", wire::reason_code(wire::Reason::UnsupportedProtocol)}};
  }
  store_.refresh();
  try {
    auto series = store_.preselect(query.input, query.preselector, clock_());
    s.contribution = preprocess(series, query.preprocessor).millis();
  } catch (const EmptyWindowError&) {
    return {{"status", "veto"}, {"reason", wire::reason_code(wire::Reason::NoData)}};
  }
  if (s.backend == "additive") {
    try {
      smc::encode_millis(s.contribution);  // range-check before any share exists
    } catch (const smc::FieldRangeError&) {
      return {{"status", "veto"}, {"reason", wire::reason_code(wire::Reason::RangeError)}};
    }
  }
  s.prepared = true;
  nlohmann::json ack{{"peer_id", config_.peer_id}, {"status", "ready"}, {"to", "gateway"}};
  return ack_response("start_ack", session_id, std::move(ack));
}

nlohmann::json PeerDaemon::on_exchange(Session& s, const std::string& session_id,
                                       std::vector<Outbox>& outbox) {
  if (!s.prepared) return {{"error", "session not prepared"}};
  if (s.backend == "mock") {
    std::string value = FixedValue::from_millis(s.contribution).str();
    if (config_.peer_id == s.reporter_id) {
      s.mock_contributions[config_.peer_id] = s.contribution;
      maybe_finalize(s, session_id, outbox);
    } else {
      std::size_t r = participant_index(s, s.reporter_id);
      Envelope e;
      e.type = "contribution";
      e.session_id = session_id;
      // Plaintext by design: the mock backend measures protocol overhead
      // only and is labeled evaluation-only.
      e.body = {{"eval_only", true},
                {"from", config_.peer_id},
                {"to", s.reporter_id},
                {"value", value}};
      wire::sign_envelope(e, identity_.secret_key);
      outbox.push_back({s.participants[r].address, "/sessions/" + session_id + "/share",
                        envelope_to_json(e, "sig_peer")});
    }
    return {{"status", "ok"}};
  }

  if (s.shares_sent) return {{"status", "ok"}};
  std::size_t n = s.participants.size();
  std::size_t me = participant_index(s, config_.peer_id);
  auto shares = smc::split_shares(smc::encode_millis(s.contribution), n, sodium_rng());
  s.kept_share = shares[me];
  s.shares_sent = true;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == me) continue;
    Envelope e;
    e.type = "share";
    e.session_id = session_id;
    e.body = {{"from", config_.peer_id},
              {"share", smc::hex_element(shares[j])},
              {"to", s.participants[j].peer_id}};
    wire::sign_envelope(e, identity_.secret_key);
    outbox.push_back({s.participants[j].address, "/sessions/" + session_id + "/share",
                      envelope_to_json(e, "sig_peer")});
  }
  maybe_reveal(s, session_id, outbox);
  return {{"status", "ok"}};
}

nlohmann::json PeerDaemon::on_share(Session& s, const std::string& session_id,
                                    const nlohmann::json& body, std::vector<Outbox>& outbox) {
  std::string from = body.at("from").get<std::string>();
  std::uint64_t share;
  try {
    share = smc::element_from_hex(body.at("share").get<std::string>());
  } catch (const std::exception& e) {
    return {{"error", e.what()}};
  }
  s.received_shares.emplace(from, share);  // first delivery wins
  maybe_reveal(s, session_id, outbox);
  return {{"status", "ok"}};
}

void PeerDaemon::maybe_reveal(Session& s, const std::string& session_id,
                              std::vector<Outbox>& outbox) {
  if (!s.shares_sent || s.revealed) return;
  if (s.received_shares.size() + 1 < s.participants.size()) return;
  std::uint64_t column = s.kept_share;
  for (const auto& [_, share] : s.received_shares) column = smc::add_mod(column, share);
  s.revealed = true;
  if (config_.peer_id == s.reporter_id) {
    s.reveals[config_.peer_id] = column;
    maybe_finalize(s, session_id, outbox);
    return;
  }
  std::size_t r = participant_index(s, s.reporter_id);
  Envelope e;
  e.type = "reveal";
  e.session_id = session_id;
  e.body = {{"from", config_.peer_id},
            {"sum", smc::hex_element(column)},
            {"to", s.reporter_id}};
  wire::sign_envelope(e, identity_.secret_key);
  outbox.push_back({s.participants[r].address, "/sessions/" + session_id + "/share",
                    envelope_to_json(e, "sig_peer")});
}

nlohmann::json PeerDaemon::on_reveal(Session& s, const std::string& session_id,
                                     const nlohmann::json& body, std::vector<Outbox>& outbox) {
  if (config_.peer_id != s.reporter_id) return {{"error", "not the session reporter"}};
  std::uint64_t sum;
  try {
    sum = smc::element_from_hex(body.at("sum").get<std::string>());
  } catch (const std::exception& e) {
    return {{"error", e.what()}};
  }
  s.reveals.emplace(body.at("from").get<std::string>(), sum);
  maybe_finalize(s, session_id, outbox);
  return {{"status", "ok"}};
}

nlohmann::json PeerDaemon::on_contribution(Session& s, const std::string& session_id,
                                           const nlohmann::json& body, std::vector<Outbox>& outbox) {
  if (config_.peer_id != s.reporter_id) return {{"error", "not the session reporter"}};
  if (s.backend != "mock") return {{"error", "plaintext contributions only exist in the mock backend"}};
  try {
    s.mock_contributions.emplace(body.at("from").get<std::string>(),
                                 FixedValue::parse(body.at("value").get<std::string>()).millis());
  } catch (const std::exception& e) {
    return {{"error", e.what()}};
  }
  maybe_finalize(s, session_id, outbox);
  return {{"status", "ok"}};
}

void PeerDaemon::maybe_finalize(Session& s, const std::string& session_id,
                                std::vector<Outbox>& outbox) {
  if (s.finalized || config_.peer_id != s.reporter_id) return;
  std::size_t n = s.participants.size();
  FixedValue value;
  if (s.backend == "mock") {
    if (s.mock_contributions.size() < n) return;
    std::int64_t total = 0;
    for (const auto& [_, millis] : s.mock_contributions) {
      if (__builtin_add_overflow(total, millis, &total)) return;  // cannot represent, drop session
    }
    value = FixedValue::from_millis(total);
  } else {
    if (s.reveals.size() < n) return;
    std::uint64_t total = 0;
    for (const auto& [_, column] : s.reveals) total = smc::add_mod(total, column);
    value = FixedValue::from_millis(smc::decode_millis(total));
  }
  s.finalized = true;

  smc::SealedResult sealed = smc::seal_result(session_id, value, identity_, s.request.certificate);
  Signature sig_result = smc::sign_result_record(session_id, value, identity_.secret_key);

  AccountabilityEntry entry;
  entry.session_id = session_id;
  entry.request = s.request;
  entry.sig_gateway = s.request_sig_gateway;
  entry.value = value.str();
  entry.sig_peer = sig_result;
  entry.reporter_cert = identity_.certificate;
  entry.result_value = sealed.ciphertext;
  audit_log_->append(std::move(entry));

  // Participants get the signed result record for their own logs.
  for (const auto& participant : s.participants) {
    if (participant.peer_id == config_.peer_id) continue;
    Envelope e;
    e.type = "result_record";
    e.session_id = session_id;
    e.body = {{"from", config_.peer_id},
              {"sig_result", sig_result.hex()},
              {"to", participant.peer_id},
              {"value", value.str()}};
    wire::sign_envelope(e, identity_.secret_key);
    outbox.push_back({participant.address, "/sessions/" + session_id + "/share",
                      envelope_to_json(e, "sig_peer")});
  }

  // The gateway only ever sees the ciphertext.
  Envelope result;
  result.type = "result";
  result.session_id = session_id;
  result.body = {{"ciphertext", to_hex(sealed.ciphertext)},
                 {"from", config_.peer_id},
                 {"to", "gateway"}};
  wire::sign_envelope(result, identity_.secret_key);
  outbox.push_back({s.result_url, "/internal/results", envelope_to_json(result, "sig_peer")});
}

nlohmann::json PeerDaemon::on_result_record(Session& s, const std::string& session_id,
                                            const nlohmann::json& body) {
  std::string from = body.at("from").get<std::string>();
  if (from != s.reporter_id) return {{"error", "result record not from the session reporter"}};
  std::size_t r = participant_index(s, s.reporter_id);
  std::string value = body.at("value").get<std::string>();
  Signature sig_result = Signature::from_hex_str(body.at("sig_result").get<std::string>());
  const Certificate& reporter_cert = s.participants[r].certificate;
  if (!smc::verify_result_record(session_id, value, sig_result, reporter_cert)) {
    return {{"error", "result record signature invalid"}};
  }

  AccountabilityEntry entry;
  entry.session_id = session_id;
  entry.request = s.request;
  entry.sig_gateway = s.request_sig_gateway;
  entry.value = value;
  entry.sig_peer = sig_result;
  entry.reporter_cert = reporter_cert;
  audit_log_->append(std::move(entry));
  return {{"status", "ok"}};
}

void PeerDaemon::send_outbox(const std::vector<Outbox>& outbox) {
  EgressTap tap;
  {
    std::lock_guard lock(mutex_);
    tap = egress_tap_;
  }
  for (const Outbox& msg : outbox) {
    std::string body = msg.body.dump();
    if (tap) tap(msg.address, msg.path, body);
    wire::http_post_json(msg.address, msg.path, msg.body, peer_timeout_ms_);
  }
}

}  // namespace smcgw::peer
