// Acceptance suite. Each criterion prints exactly one [PASS]/[FAIL] line;
// the process exits nonzero if any selected criterion fails.
//
//   acceptance                 run all seven criteria
//   acceptance --criterion 5   run one
//
// Criteria:
//   1  verification-check fixtures (grant + computation paths)
//   2  end-to-end oracle against independently recomputed sums
//   3  additive/mock backend equivalence + share-transcript privacy
//   4  attack-mitigation scenarios (forged request, curious/tampering
//      gateway, ungranted query, replay)
//   5  queue saturation behavior + desk-scale latency properties
//   6  accountability logs re-verify after 100 sessions
//   7  core-model property tests (>= 1000 generated cases each)

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "smcgw/bench/cluster.hpp"
#include "smcgw/bench/harness.hpp"
#include "smcgw/gateway/service.hpp"
#include "smcgw/peer/daemon.hpp"
#include "smcgw/smc/backend.hpp"
#include "smcgw/wire/http.hpp"
#include "support/fixtures.hpp"

using namespace smcgw;
using testfix::kNow;

namespace {

struct Criterion {
  std::vector<std::string> failures;
  int checks = 0;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Criterion 1: one fixture per verification check, plus the golden
// all-pass fixture end-to-end. Reasons must name the failing check.

void criterion1(Criterion& c) {
  testfix::Pki pki = testfix::make_pki();
  Query query = testfix::kitchen_sum_query();

  gateway::GatewayConfig gc;
  gc.trust_anchors = pki.anchors();
  gc.manual_queries = {query};
  gc.phi_rules = {gateway::AccessRule{}};
  gc.phi_requires_published = false;
  gateway::GatewayService gw(gc, pki.gateway, std::nullopt, [] { return kNow; });

  // Grant path.
  {
    auto rogue_anchor = crypto::generate_identity("rogue", "", nullptr, kNow - 10, kNow + 86400);
    auto rogue = crypto::generate_identity("client-x", "p", &rogue_anchor, kNow - 10, kNow + 3600);
    auto outcome = gw.handle_grant_request(testfix::make_grant_request(rogue, {query}));
    c.expect(!outcome.ok && outcome.reason == wire::Reason::BadCert,
             "grant certificate check should fail BAD_CERT");
  }
  {
    auto other = crypto::generate_identity("other", "p", &pki.anchor, kNow - 10, kNow + 3600);
    GrantRequest request = testfix::make_grant_request(pki.client, {query});
    request.sig_client = crypto::sign(other.secret_key, canonical_dump(request.signing_payload()));
    auto outcome = gw.handle_grant_request(request);
    c.expect(!outcome.ok && outcome.reason == wire::Reason::BadSig,
             "grant signature check should fail BAD_SIG");
  }
  {
    gateway::GatewayConfig denied = gc;
    denied.phi_rules.clear();
    gateway::GatewayService deny_gw(denied, pki.gateway, std::nullopt, [] { return kNow; });
    auto outcome = deny_gw.handle_grant_request(testfix::make_grant_request(pki.client, {query}));
    c.expect(!outcome.ok && outcome.reason == wire::Reason::PolicyDenied,
             "grant policy check should fail POLICY_DENIED");
  }

  // Computation path. Failures must surface before any peer contact, so the
  // empty registry never matters for these.
  auto grant = [&](std::int64_t nb, std::int64_t na) {
    return testfix::make_grant(pki.gateway, pki.client.certificate, {query}, nb, na - nb);
  };
  {
    auto other = crypto::generate_identity("other", "p", &pki.anchor, kNow - 10, kNow + 3600);
    Grant foreign = testfix::make_grant(pki.gateway, other.certificate, {query});
    auto outcome = gw.handle_computation_request(testfix::make_request(pki.client, query, foreign));
    c.expect(!outcome.ok && outcome.reason == wire::Reason::HolderMismatch,
             "holder binding should fail HOLDER_MISMATCH");
  }
  {
    auto outcome =
        gw.handle_computation_request(testfix::make_request(pki.client, query, grant(kNow + 60, kNow + 3600)));
    c.expect(!outcome.ok && outcome.reason == wire::Reason::GrantNotYetValid,
             "window start check should fail GRANT_NOT_YET_VALID");
  }
  {
    auto outcome =
        gw.handle_computation_request(testfix::make_request(pki.client, query, grant(kNow - 3600, kNow - 60)));
    c.expect(!outcome.ok && outcome.reason == wire::Reason::GrantExpired,
             "window end check should fail GRANT_EXPIRED");
  }
  {
    auto rogue = crypto::generate_identity("rogue-authority", "", nullptr, kNow - 10, kNow + 86400);
    Grant g = testfix::make_grant(pki.gateway, pki.client.certificate, {query});
    g.sig_issuer = crypto::sign(rogue.secret_key, canonical_dump(g.signing_payload()));
    auto outcome = gw.handle_computation_request(testfix::make_request(pki.client, query, g));
    c.expect(!outcome.ok && outcome.reason == wire::Reason::BadGrantSig,
             "issuer check should fail BAD_GRANT_SIG");
  }
  {
    Query other = query;
    other.preselector = Preselector::LastHour;
    Grant g = testfix::make_grant(pki.gateway, pki.client.certificate, {query});
    auto outcome = gw.handle_computation_request(testfix::make_request(pki.client, other, g));
    c.expect(!outcome.ok && outcome.reason == wire::Reason::QueryNotGranted,
             "inclusion check should fail QUERY_NOT_GRANTED");
  }
  {
    // Peer-local policy: the same request a gateway would accept is vetoed
    // by a peer whose group minimum is higher.
    peer::LocalPolicy policy;
    policy.min_group_size = 3;
    peer::RateTracker rate;
    wire::VerifyContext ctx{pki.anchors(), {pki.gateway.certificate}, kNow};
    Grant g = testfix::make_grant(pki.gateway, pki.client.certificate, {query});
    auto decision = peer::verify_computation_request(testfix::make_request(pki.client, query, g),
                                                     {"peer-0", "peer-1"}, policy, &rate, ctx);
    c.expect(!decision.accepted && decision.reason == wire::Reason::GroupTooSmall,
             "local policy should veto GROUP_TOO_SMALL");
  }

  // Golden all-pass fixture, end to end over HTTP.
  {
    bench::ClusterOptions opts;
    opts.peer_count = 3;
    opts.backend = "additive";
    bench::Cluster cluster(opts);
    auto client = cluster.make_client();
    auto result = client.compute(bench::standard_query());
    std::int64_t now = wire::system_now_s();
    c.expect(result.ok() && result->value.millis() ==
                                cluster.expected_result(bench::standard_query(), now).millis(),
             "golden fixture should succeed end-to-end");
  }
}

// ---------------------------------------------------------------------------
// Criterion 2: 10 seeded peers, catalog query, result equals an
// independent recomputation from the seeding plan. Zero tolerance.

void criterion2(Criterion& c) {
  bench::ClusterOptions opts;
  opts.peer_count = 10;
  opts.backend = "additive";
  opts.seed_default_readings = false;
  bench::Cluster cluster(opts);

  std::int64_t now = wire::system_now_s();
  // The seeding plan is the oracle's only input: per peer, in-window values
  // in milli-units. Peers 8 and 9 get averages that need rounding.
  std::map<int, std::vector<std::int64_t>> in_window;
  for (int i = 0; i < 10; ++i) {
    std::vector<std::int64_t> values;
    if (i < 8) {
      // Four readings whose mean is exact: i+1, i+2, i+3, i+6 units.
      values = {(i + 1) * 1000LL, (i + 2) * 1000LL, (i + 3) * 1000LL, (i + 6) * 1000LL};
    } else {
      // Three readings with a non-terminating mean: rounding must match.
      values = {1000, 1000, 2000};  // mean 4000/3 -> 1333.33... -> 1333
    }
    in_window[i] = values;

    auto& daemon = cluster.peer(i);
    // A decoy outside the six-hour window first; preselection must drop it.
    daemon.ingest("power_consumption", FixedValue::parse("999"), now - 7 * 3600);
    std::int64_t t = now - 5 * 3600;
    for (std::int64_t millis : values) {
      daemon.ingest("power_consumption", FixedValue::from_millis(millis), t);
      t += 3600;
    }
  }

  // Independent oracle: mean per peer (round half to even on the exact
  // rational), summed. Recomputed here from the plan, not from peer code.
  std::int64_t expected = 0;
  for (const auto& [peer, values] : in_window) {
    (void)peer;
    long long sum = 0;
    for (auto v : values) sum += v;
    long long n = static_cast<long long>(values.size());
    long long q = sum / n, r = sum % n;  // non-negative seeds
    long long avg = q;
    if (2 * r > n) {
      avg = q + 1;
    } else if (2 * r == n) {
      avg = (q % 2 == 0) ? q : q + 1;
    }
    expected += avg;
  }

  auto client = cluster.make_client();
  auto catalog = client.fetch_metadata();
  c.expect(catalog.ok() && catalog->size() == 1, "catalog should publish the seeded query");
  if (!catalog.ok()) return;

  auto grant = client.request_grant({(*catalog)[0]});
  c.expect(grant.ok(), "grant issuance should succeed");
  if (!grant.ok()) return;

  auto result = client.compute((*catalog)[0]);
  c.expect(result.ok(), "computation should succeed: " + result.failure.detail);
  if (!result.ok()) return;
  c.expect(result->value.millis() == expected,
           "decrypted value " + result->value.str() + " != oracle " +
               FixedValue::from_millis(expected).str());
}

// ---------------------------------------------------------------------------
// Criterion 3: additive sharing equals the plaintext mock on randomized
// plans, and no raw contribution ever appears in the share transcript.

void criterion3(Criterion& c) {
  std::mt19937_64 rng(20240817);
  std::uniform_int_distribution<std::int64_t> value_millis(0, 999'999'999);  // < 10^6 units
  std::uniform_int_distribution<std::size_t> peer_count(2, 30);

  smc::MockSumBackend mock;
  auto shared_rng = std::make_shared<std::mt19937_64>(7);
  smc::AdditiveShareBackend additive([shared_rng] { return (*shared_rng)(); });

  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = peer_count(rng);
    smc::SessionPlan plan;
    plan.session_id = "trial-" + std::to_string(trial);
    plan.protocol = "sum";
    for (std::size_t i = 0; i < n; ++i) {
      plan.participants.push_back({"peer-" + std::to_string(i), "", Certificate{}});
      plan.contributions.push_back(value_millis(rng));
    }

    smc::Transcript transcript;
    FixedValue shared = additive.compute(plan, &transcript);
    FixedValue plain = mock.compute(plan, nullptr);
    if (shared.millis() != plain.millis()) {
      c.expect(false, "trial " + std::to_string(trial) + ": additive " + shared.str() +
                          " != mock " + plain.str());
      return;
    }

    // Transcript privacy: only share/reveal messages, never self-addressed,
    // and no payload equals any contribution in either encoding.
    for (const auto& msg : transcript) {
      bool type_ok = msg.type == "share" || msg.type == "reveal";
      c.expect(type_ok, "unexpected transcript message type " + msg.type);
      if (msg.from == msg.to) {
        c.expect(false, "self-addressed transcript message");
        return;
      }
      for (std::int64_t contribution : plan.contributions) {
        if (msg.payload == smc::hex_element(smc::encode_millis(contribution)) ||
            msg.payload == FixedValue::from_millis(contribution).str()) {
          c.expect(false, "raw contribution leaked into the transcript");
          return;
        }
      }
    }
    c.expect(transcript.size() == n * (n - 1) + (n - 1), "transcript message count");
  }
}

// ---------------------------------------------------------------------------
// Criterion 4: the attack scenarios from the threat analysis.

void criterion4(Criterion& c) {
  // (A3) A malicious gateway cannot forge computation requests: even with a
  // valid transport envelope, the peer re-checks the client signature.
  {
    testfix::Pki pki = testfix::make_pki();
    Query query = testfix::kitchen_sum_query();

    peer::PeerConfig cfg;
    cfg.peer_id = "peer-0";
    cfg.labels = {{"type", "heater"}, {"roomtype", "kitchen"}};
    cfg.inputs = {"power_consumption"};
    cfg.policy.min_group_size = 1;
    cfg.trust_anchors = pki.anchors();
    peer::PeerDaemon peer(cfg, crypto::generate_identity("peer-0", "", &pki.anchor, kNow - 10,
                                                         kNow + 86400),
                          [] { return kNow; });
    peer.pin_gateway_cert(pki.gateway.certificate);

    // The gateway holds a legitimate grant from earlier traffic but signs
    // the fabricated request with its own key.
    Grant grant = testfix::make_grant(pki.gateway, pki.client.certificate, {query});
    ComputationRequest forged;
    forged.query = query;
    forged.certificate = pki.client.certificate;
    forged.grant = grant;
    forged.timestamp = kNow;
    forged.sig_client = crypto::sign(pki.gateway.secret_key, canonical_dump(forged.signing_payload()));

    Envelope env;
    env.type = "verify";
    env.session_id = "forged-session";
    env.body = {{"group", {"peer-0", "peer-1", "peer-2"}},
                {"request", forged},
                {"sig_request", crypto::sign(pki.gateway.secret_key,
                                             request_accountability_bytes(forged))
                                    .hex()},
                {"to", "peer-0"}};
    wire::sign_envelope(env, pki.gateway.secret_key);

    nlohmann::json ack = peer.handle_verify(envelope_to_json(env, "sig_gateway"));
    bool vetoed = ack.at("body").at("decision") == "veto" &&
                  ack.at("body").at("reason") == "BAD_REQUEST_SIG";
    c.expect(vetoed, "A3: peer should veto a gateway-forged request with BAD_REQUEST_SIG");

    // The genuine article passes the same check.
    ComputationRequest real = testfix::make_request(pki.client, query, grant);
    env.body["request"] = real;
    env.body["sig_request"] =
        crypto::sign(pki.gateway.secret_key, request_accountability_bytes(real)).hex();
    wire::sign_envelope(env, pki.gateway.secret_key);
    ack = peer.handle_verify(envelope_to_json(env, "sig_gateway"));
    c.expect(ack.at("body").at("decision") == "accept", "A3 control: genuine request accepted");
  }

  // (A4) The gateway never holds plaintext results: instrument everything
  // that reaches it during a successful additive session.
  {
    bench::ClusterOptions opts;
    opts.peer_count = 4;
    opts.backend = "additive";
    opts.seed_default_readings = false;
    bench::Cluster cluster(opts);
    std::int64_t now = wire::system_now_s();
    std::vector<std::string> reading_strings;
    for (std::size_t i = 0; i < cluster.peer_count(); ++i) {
      FixedValue v = FixedValue::parse(std::to_string(17 + 3 * i) + ".125");
      reading_strings.push_back(v.str());
      cluster.peer(i).ingest("power_consumption", v, now - 60);
    }

    std::mutex tap_mutex;
    std::vector<std::string> to_gateway;
    std::string gateway_address = cluster.gateway().address();
    for (std::size_t i = 0; i < cluster.peer_count(); ++i) {
      cluster.peer(i).set_egress_tap([&, gateway_address](const std::string& address,
                                                          const std::string& path,
                                                          const std::string& body) {
        if (address.find(gateway_address) != std::string::npos) {
          std::lock_guard lock(tap_mutex);
          to_gateway.push_back(path + " " + body);
        }
      });
    }
    std::vector<Bytes> result_bytes;
    cluster.gateway().set_result_tap([&](const std::string&, Bytes& ciphertext) {
      std::lock_guard lock(tap_mutex);
      result_bytes.push_back(ciphertext);
    });

    auto client = cluster.make_client();
    auto result = client.compute(bench::standard_query());
    c.expect(result.ok(), "A4: session should succeed");
    if (result.ok()) {
      std::lock_guard lock(tap_mutex);
      c.expect(result_bytes.size() == 1, "A4: exactly one result entered the gateway");
      std::string value_str = result->value.str();
      bool leaked = false;
      for (const std::string& body : to_gateway) {
        if (body.find(value_str) != std::string::npos) leaked = true;
        for (const std::string& r : reading_strings) {
          if (body.find(r) != std::string::npos) leaked = true;
        }
      }
      // The ciphertext itself must not contain the rendered value either.
      for (const Bytes& ct : result_bytes) {
        std::string as_string(ct.begin(), ct.end());
        if (as_string.find(value_str) != std::string::npos) leaked = true;
      }
      c.expect(!leaked, "A4: plaintext value or readings reached the gateway");
    }
  }

  // (A5) Any single-byte corruption of the forwarded ciphertext is caught
  // by the client.
  {
    bench::ClusterOptions opts;
    opts.peer_count = 3;
    bench::Cluster cluster(opts);
    std::mt19937_64 rng(99);
    cluster.gateway().set_result_tap([&](const std::string&, Bytes& ciphertext) {
      ciphertext[rng() % ciphertext.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    });
    auto client = cluster.make_client();
    auto result = client.compute(bench::standard_query());
    c.expect(!result.ok() && result.failure.reason == wire::Reason::TamperedResult,
             "A5: corrupted ciphertext should fail as TAMPERED_RESULT");
  }

  // (A6) No grant, no data: a request for a query outside the granted set
  // fails the inclusion check.
  {
    bench::ClusterOptions opts;
    opts.peer_count = 3;
    bench::Cluster cluster(opts);
    auto client = cluster.make_client();
    auto grant = client.request_grant({bench::standard_query()});
    c.expect(grant.ok(), "A6 setup: grant issuance");
    if (grant.ok()) {
      Query other = bench::standard_query();
      other.preprocessor = Preprocessor::Sum;
      auto result = client.send_computation_request(client.build_computation_request(other, *grant));
      c.expect(!result.ok() && result.failure.reason == wire::Reason::QueryNotGranted,
               "A6: ungranted query should fail QUERY_NOT_GRANTED");
    }
  }

  // (Replay) A stale captured request is vetoed by the peers.
  {
    bench::ClusterOptions opts;
    opts.peer_count = 3;
    bench::Cluster cluster(opts);
    auto client = cluster.make_client();
    auto grant = client.request_grant({bench::standard_query()});
    c.expect(grant.ok(), "replay setup: grant issuance");
    if (grant.ok()) {
      auto replayed = client.build_computation_request(bench::standard_query(), *grant,
                                                       wire::system_now_s() - 600);
      auto result = client.send_computation_request(replayed);
      c.expect(!result.ok() && result.failure.reason == wire::Reason::PeerVeto &&
                   result.failure.detail == "STALE_REQUEST",
               "replay: stale request should be vetoed as STALE_REQUEST");
    }
  }
}

// ---------------------------------------------------------------------------
// Criterion 5: queue behavior and the desk-scale latency substitutes.

void criterion5(Criterion& c, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto check_run = [&](const bench::RunReport& r, const std::string& label) {
    c.expect(r.conservation_ok(), label + ": conservation offered=" + std::to_string(r.offered) +
                                      " != ok+drop+fail");
    bool coupling = (r.dropped > 0) == (r.queue_peak >= r.queue_capacity);
    c.expect(coupling, label + ": drops (" + std::to_string(r.dropped) +
                           ") must coincide with queue saturation (peak " +
                           std::to_string(r.queue_peak) + "/" + std::to_string(r.queue_capacity) + ")");
  };

  // (a) Saturation sweep: computation protocol against one worker, queue
  // capacity 100, offered load far beyond service capacity.
  bench::LoadScenario base;
  base.protocol = "computation";
  base.peer_count = 20;
  base.duration_s = 60;
  base.gateway_workers = 1;
  base.queue_capacity = 100;
  base.backend = "mock";
  std::vector<double> rates{5, 60, 120};
  auto reports = bench::sweep(rates, base, 5, out_dir + "/saturation");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    check_run(reports[i], "saturation rate " + std::to_string(rates[i]));
  }
  c.expect(reports[0].dropped == 0, "low offered load must not drop");
  c.expect(reports[1].dropped > 0 && reports[2].dropped > 0,
           "overload rates must drop (got " + std::to_string(reports[1].dropped) + ", " +
               std::to_string(reports[2].dropped) + ")");
  std::size_t first_drop = reports.size(), first_saturated = reports.size();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (first_drop == reports.size() && reports[i].dropped > 0) first_drop = i;
    if (first_saturated == reports.size() && reports[i].queue_peak >= reports[i].queue_capacity) {
      first_saturated = i;
    }
  }
  c.expect(first_drop == first_saturated,
           "drops must begin at the same offered rate at which the queue first saturates");
  double plateau_base = reports[1].throughput_rps;
  double plateau_next = reports[2].throughput_rps;
  c.expect(plateau_next <= 1.35 * plateau_base && plateau_next >= 0.65 * plateau_base,
           "throughput must plateau past saturation (" + std::to_string(plateau_base) + " -> " +
               std::to_string(plateau_next) + ")");
  c.expect(plateau_next < 0.8 * rates[2],
           "post-saturation throughput must stay below the offered rate");

  // (b) Computation latency is monotone non-decreasing in peer count at a
  // fixed low rate (the 50 ms/peer constant is hardware-bound, the shape is
  // not).
  bench::LoadScenario scaling = base;
  scaling.gateway_workers = 8;
  scaling.request_rate = 2;
  std::vector<bench::RunReport> scaling_reports;
  for (int peers : {5, 10, 20, 30}) {
    scaling.peer_count = peers;
    scaling_reports.push_back(bench::run_scenario(scaling));
    check_run(scaling_reports.back(), "peer scaling n=" + std::to_string(peers));
    bench::write_report_json(scaling_reports.back(),
                             out_dir + "/scaling_peers_" + std::to_string(peers) + ".json");
  }
  bench::write_peer_scaling_plot(scaling_reports, out_dir + "/latency_vs_peers.svg");
  for (std::size_t i = 0; i + 1 < scaling_reports.size(); ++i) {
    c.expect(scaling_reports[i].median_ms <= scaling_reports[i + 1].median_ms,
             "median latency must not decrease from " +
                 std::to_string(scaling_reports[i].scenario.peer_count) + " to " +
                 std::to_string(scaling_reports[i + 1].scenario.peer_count) + " peers (" +
                 std::to_string(scaling_reports[i].median_ms) + " -> " +
                 std::to_string(scaling_reports[i + 1].median_ms) + " ms)");
  }

  // (c) Grant latency is independent of the peer count: no peer interaction
  // in that protocol. Pinned at < 20% median difference.
  bench::LoadScenario grant_scenario;
  grant_scenario.protocol = "grant";
  grant_scenario.request_rate = 50;
  grant_scenario.duration_s = 30;
  std::vector<bench::RunReport> grant_reports;
  for (int peers : {5, 30}) {
    grant_scenario.peer_count = peers;
    grant_reports.push_back(bench::run_scenario(grant_scenario));
    check_run(grant_reports.back(), "grant independence n=" + std::to_string(peers));
    bench::write_report_json(grant_reports.back(),
                             out_dir + "/grant_peers_" + std::to_string(peers) + ".json");
  }
  double m5 = grant_reports[0].median_ms, m30 = grant_reports[1].median_ms;
  double rel = std::abs(m5 - m30) / ((m5 + m30) / 2.0);
  c.expect(rel < 0.20, "grant medians for 5 vs 30 peers differ by " +
                           std::to_string(rel * 100) + "% (>= 20%): " + std::to_string(m5) +
                           " vs " + std::to_string(m30) + " ms");
}

// ---------------------------------------------------------------------------
// Criterion 6: accountability across 100 sessions.

void criterion6(Criterion& c) {
  namespace fs = std::filesystem;
  std::string root = "acceptance-audit-logs";
  fs::remove_all(root);

  bench::ClusterOptions opts;
  opts.peer_count = 5;
  opts.backend = "mock";  // session mechanics identical, much faster
  opts.peer_tweak = [&](int i, peer::PeerConfig& cfg) {
    cfg.data_dir = root + "/peer-" + std::to_string(i);
  };
  bench::Cluster cluster(opts);
  auto client = cluster.make_client();

  std::vector<std::string> session_order;
  for (int i = 0; i < 100; ++i) {
    auto result = client.compute(bench::standard_query());
    if (!result.ok()) {
      c.expect(false, "session " + std::to_string(i) + " failed: " + result.failure.detail);
      return;
    }
    session_order.push_back(result->session_id);
  }

  std::int64_t now = wire::system_now_s();
  for (std::size_t p = 0; p < cluster.peer_count(); ++p) {
    auto entries = cluster.peer(p).audit_log().entries();
    c.expect(entries.size() == 100,
             "peer " + std::to_string(p) + " has " + std::to_string(entries.size()) + " entries");
    if (entries.size() == 100) {
      bool ordered = true;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].session_id != session_order[i] || entries[i].seq != static_cast<std::int64_t>(i)) {
          ordered = false;
        }
      }
      c.expect(ordered, "peer " + std::to_string(p) + " entries are in session order");
    }
    auto statuses = peer::AccountabilityLog::verify_file(
        root + "/peer-" + std::to_string(p) + "/audit_log.jsonl", cluster.gateway().certificate(),
        {cluster.anchor().certificate}, now);
    bool all_ok = statuses.size() == 100 &&
                  std::all_of(statuses.begin(), statuses.end(), [](const auto& s) { return s.ok; });
    c.expect(all_ok, "peer " + std::to_string(p) + " log re-verifies completely");
  }

  // Deliberate corruption of one persisted entry is flagged, and only it.
  std::string victim = root + "/peer-2/audit_log.jsonl";
  std::ifstream in(victim);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  in.close();
  auto pos = lines[57].find("\"timestamp\":");
  c.expect(pos != std::string::npos, "corruption target field present");
  lines[57][pos + 13] = lines[57][pos + 13] == '9' ? '8' : '9';
  std::ofstream out(victim, std::ios::trunc);
  for (const auto& l : lines) out << l << "\n";
  out.close();

  auto statuses = peer::AccountabilityLog::verify_file(victim, cluster.gateway().certificate(),
                                                       {cluster.anchor().certificate}, now);
  int corrupt = 0;
  for (const auto& s : statuses) {
    if (!s.ok) ++corrupt;
  }
  c.expect(corrupt == 1 && !statuses[57].ok, "exactly the corrupted entry is flagged");
}

// ---------------------------------------------------------------------------
// Criterion 7: core-model properties, >= 1000 generated cases each.

std::string random_token(std::mt19937_64& rng, std::size_t max_len = 8) {
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789_";
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(alphabet) - 2);
  std::string s;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) s += alphabet[pick(rng)];
  return s;
}

Predicate random_predicate(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> natoms(1, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> nvals(1, 4);
  std::string text;
  int n = natoms(rng);
  for (int i = 0; i < n; ++i) {
    if (i > 0) text += " ∧ ";
    if (coin(rng) == 0) {
      text += random_token(rng) + " = " + random_token(rng);
    } else {
      text += random_token(rng) + " ∈ [";
      int m = nvals(rng);
      for (int j = 0; j < m; ++j) text += (j ? ", " : "") + random_token(rng);
      text += "]";
    }
  }
  return Predicate::parse(text);
}

Query random_query(std::mt19937_64& rng) {
  Query q;
  q.predicate = random_predicate(rng);
  q.preselector = static_cast<Preselector>(rng() % 4);
  q.preprocessor = static_cast<Preprocessor>(rng() % 4);
  q.protocol = random_token(rng, 5);
  q.input = random_token(rng, 10);
  return q;
}

void criterion7(Criterion& c) {
  std::mt19937_64 rng(424242);

  // Predicate parse/canonical round trip.
  for (int i = 0; i < 1000; ++i) {
    Predicate p = random_predicate(rng);
    if (!(Predicate::parse(p.canonical()) == p)) {
      c.expect(false, "round trip failed for: " + p.canonical());
      return;
    }
  }
  c.expect(true, "predicate round trip");

  // Monotonicity of evaluation under label growth.
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < 1000; ++i) {
    Predicate p = random_predicate(rng);
    LabelSet small;
    for (int j = 0; j < 4; ++j) small.insert(Label{random_token(rng), random_token(rng)});
    if (coin(rng)) {
      for (const Atom& atom : p.atoms()) small.insert(Label{atom.key, atom.values.front()});
    }
    LabelSet big = small;
    for (int j = 0; j < 3; ++j) big.insert(Label{random_token(rng), random_token(rng)});
    if (p.matches(small) && !p.matches(big)) {
      c.expect(false, "monotonicity violated for: " + p.canonical());
      return;
    }
  }
  c.expect(true, "evaluation monotonicity");

  // Superset permutation invariance.
  for (int i = 0; i < 1000; ++i) {
    std::vector<LabelSet> peers(1 + rng() % 6);
    for (auto& ls : peers) {
      for (int j = 0, n = 1 + rng() % 5; j < n; ++j) {
        ls.insert(Label{random_token(rng, 3), random_token(rng, 3)});
      }
    }
    LabelSet expected = label_superset(peers);
    std::shuffle(peers.begin(), peers.end(), rng);
    if (label_superset(peers) != expected) {
      c.expect(false, "superset permutation invariance violated");
      return;
    }
  }
  c.expect(true, "label superset permutation invariance");

  // query_matches is an equivalence relation. The pool reuses values so
  // genuinely equal pairs occur.
  std::vector<Query> pool;
  for (int i = 0; i < 60; ++i) pool.push_back(random_query(rng));
  auto pick = [&]() -> const Query& { return pool[rng() % pool.size()]; };
  for (int i = 0; i < 1000; ++i) {
    const Query &a = pick(), &b = pick(), &d = pick();
    if (!query_matches(a, a)) {
      c.expect(false, "reflexivity violated");
      return;
    }
    if (query_matches(a, b) != query_matches(b, a)) {
      c.expect(false, "symmetry violated");
      return;
    }
    if (query_matches(a, b) && query_matches(b, d) && !query_matches(a, d)) {
      c.expect(false, "transitivity violated");
      return;
    }
  }
  c.expect(true, "query equivalence laws");

  // Canonical serialization: determinism, injectivity, and exclusion of the
  // signature field from its own signing input.
  testfix::Pki pki = testfix::make_pki();
  std::map<std::string, std::string> seen;  // canonical bytes -> canonical query string
  bool serialization_ok = true;
  for (int i = 0; i < 1000 && serialization_ok; ++i) {
    Query q = random_query(rng);
    Grant g = testfix::make_grant(pki.gateway, pki.client.certificate, {q}, kNow + (rng() % 1000));
    ComputationRequest r = testfix::make_request(pki.client, q, g, kNow + (rng() % 1000));

    nlohmann::json j = r;
    std::string bytes = canonical_dump(j);
    if (bytes != canonical_dump(nlohmann::json(r))) {
      c.expect(false, "canonical serialization is not deterministic");
      serialization_ok = false;
      break;
    }
    ComputationRequest back = j.get<ComputationRequest>();
    if (canonical_dump(nlohmann::json(back)) != bytes) {
      c.expect(false, "canonical serialization does not survive a round trip");
      serialization_ok = false;
      break;
    }
    auto [it, inserted] = seen.emplace(bytes, q.canonical_string());
    if (!inserted && it->second != q.canonical_string()) {
      c.expect(false, "canonical serialization collision across distinct values");
      serialization_ok = false;
      break;
    }
    // Mutating the signature changes the message but not its signing input.
    ComputationRequest mutated = r;
    mutated.sig_client = Signature{Bytes(64, 0xab)};
    if (canonical_dump(mutated.signing_payload()) != canonical_dump(r.signing_payload()) ||
        canonical_dump(nlohmann::json(mutated)) == bytes) {
      c.expect(false, "signature field not excluded from its own signing input");
      serialization_ok = false;
      break;
    }
  }
  if (serialization_ok) c.expect(true, "canonical serialization properties");
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::string bench_out = "acceptance-bench-out";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    if (std::strcmp(argv[i], "--bench-out") == 0 && i + 1 < argc) bench_out = argv[++i];
  }

  struct Entry {
    int number;
    const char* name;
    std::function<void(Criterion&)> run;
  };
  std::vector<Entry> entries{
      {1, "verification-check fixtures: grant path, computation path, golden fixture",
       [](Criterion& c) { criterion1(c); }},
      {2, "end-to-end oracle: 10 peers, 6-hour averages, exact recomputed sum",
       [](Criterion& c) { criterion2(c); }},
      {3, "backend equivalence on 100 random plans + transcript privacy",
       [](Criterion& c) { criterion3(c); }},
      {4, "attack mitigations: forged request, curious gateway, tampering, ungranted query, replay",
       [](Criterion& c) { criterion4(c); }},
      {5, "queue saturation, throughput plateau, latency shape properties",
       [&](Criterion& c) { criterion5(c, bench_out); }},
      {6, "accountability: 100 sessions re-verify, corruption flagged",
       [](Criterion& c) { criterion6(c); }},
      {7, "core property tests, >= 1000 generated cases each",
       [](Criterion& c) { criterion7(c); }},
  };

  bool all_ok = true;
  for (auto& entry : entries) {
    if (only != 0 && entry.number != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      entry.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    double dt = seconds_since(t0);
    std::ostringstream line;
    line << (c.ok() ? "[PASS]" : "[FAIL]") << " criterion " << entry.number << ": " << entry.name
         << "  (" << c.checks << " checks, " << std::fixed << std::setprecision(1) << dt << "s)";
    std::cout << line.str() << std::endl;
    if (!c.ok()) {
      all_ok = false;
      for (const auto& f : c.failures) std::cout << "       - " << f << std::endl;
    }
  }
  return all_ok ? 0 : 1;
}
