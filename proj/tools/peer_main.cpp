// Peer daemon entry point plus the local maintenance commands:
//   serve                     run the daemon and pair with the gateway
//   ingest <input> <value>    append a reading (test ingestion)
//   log list                  print the accountability log
//   log verify                re-verify every persisted entry

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

#include "common.hpp"
#include "smcgw/peer/daemon.hpp"
#include "smcgw/wire/http.hpp"

using namespace smcgw;

namespace {

std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }

peer::PeerConfig load_config(const nlohmann::json& cfg) {
  peer::PeerConfig pc;
  pc.peer_id = cfg.at("peer_id").get<std::string>();
  pc.listen_host = cfg.value("listen_host", pc.listen_host);
  pc.listen_port = cfg.value("listen_port", 0);
  pc.labels = tools::parse_labels(cfg.at("labels"));
  pc.inputs = cfg.at("inputs").get<std::set<std::string>>();
  if (cfg.contains("protocols")) pc.protocols = cfg.at("protocols").get<std::set<std::string>>();
  if (cfg.contains("policy")) pc.policy = cfg.at("policy").get<peer::LocalPolicy>();
  pc.trust_anchors = tools::load_certificates(cfg.at("trust_anchors"));
  if (cfg.contains("grant_issuers")) pc.grant_issuers = tools::load_certificates(cfg.at("grant_issuers"));
  pc.data_dir = cfg.value("data_dir", "");
  return pc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smcgw-peer: sensor platform daemon"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "peer config file (JSON)")->required();

  auto* serve = app.add_subcommand("serve", "run the daemon and register with the gateway");

  auto* ingest = app.add_subcommand("ingest", "append a reading to the local store");
  std::string input, value;
  std::int64_t timestamp = 0;
  ingest->add_option("input", input)->required();
  ingest->add_option("value", value)->required();
  ingest->add_option("--timestamp", timestamp, "Unix seconds UTC (default: now)");

  auto* log = app.add_subcommand("log", "accountability log inspection");
  log->require_subcommand(1);
  auto* log_list = log->add_subcommand("list", "print every entry");
  auto* log_verify = log->add_subcommand("verify", "re-verify every entry");

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json cfg = tools::load_json_file(config_path);
    peer::PeerConfig pc = load_config(cfg);

    if (serve->parsed()) {
      auto identity = crypto::load_identity(cfg.at("identity").get<std::string>());
      peer::PeerDaemon daemon(pc, identity);
      daemon.start();
      std::cout << "peer " << pc.peer_id << " listening on " << daemon.address() << "\n";
      std::string gateway_url = cfg.at("gateway_url").get<std::string>();
      if (!daemon.register_with_gateway(gateway_url, 5)) {
        std::cerr << "error: gateway " << gateway_url << " unreachable\n";
        return 1;
      }
      std::cout << "paired with gateway " << gateway_url << "\n";
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
      daemon.stop();
      return 0;
    }

    if (ingest->parsed()) {
      if (pc.data_dir.empty()) throw std::runtime_error("ingest needs data_dir in the config");
      if (pc.inputs.count(input) == 0) throw std::runtime_error("input not provided by this peer");
      std::filesystem::create_directories(pc.data_dir);
      peer::ReadingStore store(pc.data_dir + "/readings.jsonl");
      std::int64_t ts = timestamp != 0 ? timestamp : wire::system_now_s();
      store.append(peer::Reading{input, FixedValue::parse(value), ts});
      std::cout << "ingested " << input << " = " << FixedValue::parse(value).str() << " @ " << ts
                << "\n";
      return 0;
    }

    std::string log_path = pc.data_dir + "/audit_log.jsonl";
    if (log_list->parsed()) {
      peer::AccountabilityLog audit(log_path);
      for (const auto& entry : audit.entries()) {
        std::cout << entry.seq << "  session=" << entry.session_id
                  << "  client=" << entry.request.grant.holder.substr(0, 16)
                  << "  query=\"" << entry.request.query.canonical_string() << "\""
                  << "  value=" << (entry.value ? *entry.value : "-") << "\n";
      }
      std::cout << audit.size() << " entries\n";
      return 0;
    }

    if (log_verify->parsed()) {
      std::string pairing = pc.data_dir + "/pairing.json";
      Certificate gateway_cert =
          tools::load_json_file(pairing).at("gateway_certificate").get<Certificate>();
      auto statuses = peer::AccountabilityLog::verify_file(log_path, gateway_cert, pc.trust_anchors,
                                                           wire::system_now_s());
      int bad = 0;
      for (const auto& s : statuses) {
        if (s.ok) {
          std::cout << s.seq << "  ok\n";
        } else {
          ++bad;
          std::cout << s.seq << "  CORRUPT: " << s.error << "\n";
        }
      }
      std::cout << statuses.size() << " entries, " << bad << " corrupt\n";
      return bad == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
