#include "smcgw/bench/cluster.hpp"

#include <stdexcept>

#include "smcgw/wire/http.hpp"

namespace smcgw::bench {

Query standard_query() {
  Query q;
  q.predicate = Predicate::parse("type = heater ∧ roomtype ∈ [kitchen, meetingroom]");
  q.preselector = Preselector::Last6Hours;
  q.preprocessor = Preprocessor::Average;
  q.protocol = "sum";
  q.input = "power_consumption";
  return q;
}

Cluster::Cluster(ClusterOptions options) {
  crypto::init();
  std::int64_t now = wire::system_now_s();
  anchor_ = crypto::generate_identity("cluster-anchor", "", nullptr, now - 3600, now + 30 * 86400);
  client_identity_ = crypto::generate_identity("client-1", options.client_purpose, &anchor_,
                                               now - 3600, now + 30 * 86400);

  gateway::GatewayConfig gw;
  gw.trust_anchors = {anchor_.certificate};
  gw.manual_queries = {standard_query()};
  gw.phi_rules = {gateway::AccessRule{}};
  gw.phi_requires_published = false;
  gw.min_publishable_group = options.min_group;
  gw.queue_capacity = options.queue_capacity;
  gw.workers = options.workers;
  gw.peer_timeout_ms = options.peer_timeout_ms;
  gw.backend = options.backend;
  if (options.gateway_tweak) options.gateway_tweak(gw);

  auto gateway_identity =
      crypto::generate_identity("gateway", "", &anchor_, now - 3600, now + 30 * 86400);
  gateway_ = std::make_unique<gateway::GatewayService>(gw, gateway_identity);
  gateway_->start();

  for (int i = 0; i < options.peer_count; ++i) {
    std::string id = "peer-" + std::to_string(i);
    peer::PeerConfig cfg;
    cfg.peer_id = id;
    cfg.labels = {{"type", "heater"},
                  {"roomtype", i % 2 == 0 ? "kitchen" : "meetingroom"},
                  {"level", std::to_string(i % 3)}};
    cfg.inputs = {"power_consumption"};
    cfg.policy.min_group_size = options.min_group;
    cfg.trust_anchors = {anchor_.certificate};
    if (options.peer_tweak) options.peer_tweak(i, cfg);

    auto identity = crypto::generate_identity(id, "", &anchor_, now - 3600, now + 30 * 86400);
    auto daemon = std::make_unique<peer::PeerDaemon>(cfg, identity);
    daemon->start();
    if (options.seed_default_readings) {
      // Hourly readings over the last five hours, newest one minute ago;
      // values differ per peer and per slot.
      for (int k = 5; k >= 1; --k) {
        std::string value = std::to_string(10 * (i + 1) + k) + "." + std::to_string((i * 7 + k) % 10);
        daemon->ingest("power_consumption", FixedValue::parse(value), now - k * 3600 + 3540);
      }
    }
    if (!daemon->register_with_gateway(gateway_->address())) {
      throw std::runtime_error("peer registration failed for " + id);
    }
    peers_.push_back(std::move(daemon));
  }
}

Cluster::~Cluster() {
  // Peers first: their result posts target the gateway.
  for (auto& p : peers_) p->stop();
  if (gateway_) gateway_->stop();
}

client::ClientConfig Cluster::client_config(const std::string& state_dir) const {
  client::ClientConfig cfg;
  cfg.gateway_address = gateway_->address();
  cfg.trust_anchors = {anchor_.certificate};
  cfg.grant_issuers = {gateway_->certificate()};
  cfg.state_dir = state_dir;
  return cfg;
}

client::GatewayClient Cluster::make_client(const std::string& state_dir) const {
  return client::GatewayClient(client_config(state_dir), client_identity_);
}

FixedValue Cluster::expected_result(const Query& query, std::int64_t now) const {
  if (query.protocol != "sum") throw std::invalid_argument("oracle supports only the sum protocol");
  std::int64_t total = 0;
  for (const auto& daemon : peers_) {
    const peer::PeerConfig& cfg = daemon->config();
    if (!query.predicate.matches(cfg.labels)) continue;
    if (cfg.inputs.count(query.input) == 0) continue;
    auto series = daemon->store().preselect(query.input, query.preselector, now);
    total += peer::preprocess(series, query.preprocessor).millis();
  }
  return FixedValue::from_millis(total);
}

}  // namespace smcgw::bench
