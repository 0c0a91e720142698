// Gateway daemon entry point.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

#include "common.hpp"
#include "smcgw/gateway/service.hpp"

using namespace smcgw;

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smcgw-gateway: SMC gateway service"};
  std::string config_path;
  app.add_option("--config", config_path, "gateway config file (JSON)")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json cfg = tools::load_json_file(config_path);

    gateway::GatewayConfig gc;
    gc.listen_host = cfg.value("listen_host", gc.listen_host);
    gc.listen_port = cfg.value("listen_port", 0);
    gc.trust_anchors = tools::load_certificates(cfg.at("trust_anchors"));
    if (cfg.contains("queries")) {
      for (const auto& q : cfg.at("queries")) gc.manual_queries.push_back(q.get<Query>());
    }
    if (cfg.contains("phi_rules")) {
      for (const auto& r : cfg.at("phi_rules")) gc.phi_rules.push_back(r.get<gateway::AccessRule>());
    }
    gc.phi_requires_published = cfg.value("phi_requires_published", true);
    gc.enumerate_label_queries = cfg.value("enumerate_label_queries", false);
    if (cfg.contains("enumeration_templates")) {
      for (const auto& t : cfg.at("enumeration_templates")) {
        gateway::EnumerationTemplate tmpl;
        tmpl.input = t.at("input").get<std::string>();
        tmpl.protocol = t.value("protocol", "sum");
        tmpl.preselector = parse_preselector(t.value("preselector", "last_value"));
        tmpl.preprocessor = parse_preprocessor(t.value("preprocessor", "average"));
        gc.enumeration_templates.push_back(tmpl);
      }
    }
    gc.queue_capacity = cfg.value("queue_capacity", 100);
    gc.workers = cfg.value("workers", 8);
    gc.peer_timeout_ms = cfg.value("peer_timeout_ms", 10000);
    gc.grant_lifetime_s = cfg.value("grant_lifetime_s", 3600);
    gc.min_publishable_group = cfg.value("min_publishable_group", 3);
    gc.liveness_window_s = cfg.value("liveness_window_s", 60);
    gc.health_probe_interval_s = cfg.value("health_probe_interval_s", 15);
    gc.backend = cfg.value("backend", "additive");

    auto identity = crypto::load_identity(cfg.at("identity").get<std::string>());
    std::optional<crypto::Identity> authority;
    if (cfg.contains("grant_authority_identity")) {
      authority = crypto::load_identity(cfg.at("grant_authority_identity").get<std::string>());
    }

    gateway::GatewayService service(gc, identity, authority);
    service.start();
    std::cout << "gateway listening on " << service.address() << " (backend " << gc.backend
              << ", queue capacity " << gc.queue_capacity << ", workers " << gc.workers << ")\n";

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    service.stop();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
