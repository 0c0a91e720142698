// Reference client CLI: fetch the catalog, obtain grants, run computations.
// Queries are selected by catalog index or by a prefix of their canonical
// string. Exit codes: 0 success, 2 failure notice from the gateway or a
// peer veto, 3 local/transport error, 4 tampered or unverifiable result.

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <thread>

#include "common.hpp"
#include "smcgw/client/client.hpp"
#include "smcgw/wire/http.hpp"

using namespace smcgw;

namespace {

constexpr int kExitFailureNotice = 2;
constexpr int kExitLocalError = 3;
constexpr int kExitTampered = 4;

client::GatewayClient make_client(const nlohmann::json& cfg) {
  client::ClientConfig cc;
  cc.gateway_address = cfg.at("gateway_url").get<std::string>();
  cc.trust_anchors = tools::load_certificates(cfg.at("trust_anchors"));
  if (cfg.contains("grant_issuers")) cc.grant_issuers = tools::load_certificates(cfg.at("grant_issuers"));
  cc.state_dir = cfg.value("state_dir", "");
  auto identity = crypto::load_identity(cfg.at("identity").get<std::string>());
  return client::GatewayClient(cc, identity);
}

void print_query(std::size_t index, const Query& q, bool json_mode) {
  if (json_mode) return;  // handled by the caller
  std::cout << "[" << index << "] " << q.canonical_string() << "\n"
            << "    predicate:    " << q.predicate.canonical() << "\n"
            << "    preselector:  " << preselector_token(q.preselector) << "\n"
            << "    preprocessor: " << preprocessor_token(q.preprocessor) << "\n"
            << "    protocol:     " << q.protocol << "\n"
            << "    input:        " << q.input << "\n";
}

// Selector: catalog index or canonical-string prefix.
std::optional<Query> resolve(const std::vector<Query>& catalog, const std::string& selector) {
  try {
    std::size_t pos = 0;
    unsigned long idx = std::stoul(selector, &pos);
    if (pos == selector.size() && idx < catalog.size()) return catalog[idx];
  } catch (const std::exception&) {
  }
  for (const Query& q : catalog) {
    if (q.canonical_string().rfind(selector, 0) == 0) return q;
  }
  return std::nullopt;
}

int failure_exit(const client::Failure& f) {
  std::cerr << "failed: " << wire::reason_code(f.reason) << (f.detail.empty() ? "" : " (" + f.detail + ")")
            << "\n";
  if (f.reason == wire::Reason::TamperedResult) return kExitTampered;
  if (f.http_status == 0) return kExitLocalError;
  return kExitFailureNotice;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smcgw-client: query aggregate results through the gateway"};
  app.require_subcommand(1);
  std::string config_path;
  bool json_mode = false;
  app.add_option("--config", config_path, "client config file (JSON)")->required();
  app.add_flag("--json", json_mode, "machine-readable output");

  auto* metadata = app.add_subcommand("metadata", "list the published queries");

  auto* grant = app.add_subcommand("grant", "obtain an authorization grant");
  std::vector<std::string> selectors;
  grant->add_option("selector", selectors, "catalog index or canonical-string prefix")->required();

  auto* compute = app.add_subcommand("compute", "run a computation request");
  std::string selector;
  double poll_hz = 0;
  int poll_duration_s = 0;
  compute->add_option("selector", selector)->required();
  compute->add_option("--poll", poll_hz, "repeat at this frequency [Hz]");
  compute->add_option("--duration", poll_duration_s, "polling duration [s]");

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json cfg = tools::load_json_file(config_path);
    client::GatewayClient client = make_client(cfg);

    auto catalog = client.fetch_metadata();
    if (!catalog.ok()) return failure_exit(catalog.failure);

    if (metadata->parsed()) {
      if (json_mode) {
        nlohmann::json out = nlohmann::json::array();
        for (const Query& q : *catalog) out.push_back(q);
        std::cout << out.dump(2) << "\n";
      } else {
        for (std::size_t i = 0; i < catalog->size(); ++i) print_query(i, (*catalog)[i], false);
        std::cout << catalog->size() << " queries\n";
      }
      return 0;
    }

    if (grant->parsed()) {
      std::vector<Query> queries;
      for (const std::string& sel : selectors) {
        auto q = resolve(*catalog, sel);
        if (!q) {
          std::cerr << "error: no catalog query matches selector '" << sel << "'\n";
          return kExitLocalError;
        }
        queries.push_back(*q);
      }
      auto result = client.request_grant(queries);
      if (!result.ok()) return failure_exit(result.failure);
      if (json_mode) {
        std::cout << nlohmann::json(*result).dump(2) << "\n";
      } else {
        std::cout << "grant stored: holder " << result->holder.substr(0, 16) << "..., valid until "
                  << result->not_after << ", " << result->queries.size() << " queries\n";
      }
      return 0;
    }

    // compute
    auto q = resolve(*catalog, selector);
    if (!q) {
      std::cerr << "error: no catalog query matches selector '" << selector << "'\n";
      return kExitLocalError;
    }
    auto run_once = [&]() -> int {
      auto result = client.compute(*q);
      if (!result.ok()) return failure_exit(result.failure);
      if (json_mode) {
        std::cout << nlohmann::json{{"session_id", result->session_id},
                                    {"value", result->value.str()}}
                         .dump()
                  << "\n";
      } else {
        std::cout << result->value.str() << "  (session " << result->session_id << ")\n";
      }
      return 0;
    };

    if (poll_hz <= 0) return run_once();
    auto t_end = std::chrono::steady_clock::now() + std::chrono::seconds(poll_duration_s);
    int rc = 0;
    std::size_t i = 0;
    auto t0 = std::chrono::steady_clock::now();
    while (std::chrono::steady_clock::now() < t_end) {
      int one = run_once();
      if (one != 0) rc = one;
      ++i;
      std::this_thread::sleep_until(t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                             std::chrono::duration<double>(i / poll_hz)));
    }
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLocalError;
  }
}
