#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "smcgw/peer/audit_log.hpp"
#include "smcgw/peer/daemon.hpp"
#include "smcgw/peer/policy.hpp"
#include "smcgw/peer/store.hpp"
#include "smcgw/smc/result.hpp"
#include "support/fixtures.hpp"

using namespace smcgw;
using namespace smcgw::peer;
using testfix::kNow;

TEST_CASE("preselect windows") {
  ReadingStore store;
  // Hourly readings for 8 hours, newest at t0 + 7h.
  std::int64_t t0 = 1700000000;
  for (int k = 0; k < 8; ++k) {
    store.append(Reading{"power_consumption", FixedValue::parse(std::to_string(k)), t0 + k * 3600});
  }
  std::int64_t now = t0 + 7 * 3600;

  auto last = store.preselect("power_consumption", Preselector::LastValue, now);
  REQUIRE(last.size() == 1);
  CHECK(last[0].timestamp == t0 + 7 * 3600);

  auto six = store.preselect("power_consumption", Preselector::Last6Hours, now);
  CHECK(six.size() == 6);  // (now-6h, now] keeps k=2..7
  CHECK(six.front().timestamp == t0 + 2 * 3600);
  CHECK(six.back().timestamp == t0 + 7 * 3600);

  auto hour = store.preselect("power_consumption", Preselector::LastHour, now);
  CHECK(hour.size() == 1);

  auto day = store.preselect("power_consumption", Preselector::Last24Hours, now);
  CHECK(day.size() == 8);

  CHECK_THROWS_AS(store.preselect("temperature", Preselector::LastValue, now), EmptyWindowError);
  CHECK_THROWS_AS(store.preselect("power_consumption", Preselector::LastHour, now + 9 * 3600),
                  EmptyWindowError);

  ReadingStore empty;
  CHECK_THROWS_AS(empty.preselect("power_consumption", Preselector::LastValue, now), EmptyWindowError);
}

TEST_CASE("reading timestamps must strictly increase per stream") {
  ReadingStore store;
  store.append(Reading{"a", FixedValue::parse("1"), 100});
  CHECK_THROWS_AS(store.append(Reading{"a", FixedValue::parse("2"), 100}), std::invalid_argument);
  CHECK_THROWS_AS(store.append(Reading{"a", FixedValue::parse("2"), 50}), std::invalid_argument);
  store.append(Reading{"b", FixedValue::parse("2"), 50});  // other stream unaffected
  store.append(Reading{"a", FixedValue::parse("2"), 101});
  CHECK(store.size("a") == 2);
}

TEST_CASE("retention drops readings older than 30 days") {
  ReadingStore store;
  std::int64_t t0 = 1700000000;
  store.append(Reading{"a", FixedValue::parse("1"), t0});
  store.append(Reading{"a", FixedValue::parse("2"), t0 + 31 * 86400});
  CHECK(store.size("a") == 1);
}

TEST_CASE("reading store persists and refreshes") {
  std::string path = "/tmp/smcgw_test_readings.jsonl";
  std::filesystem::remove(path);
  {
    ReadingStore store(path);
    store.append(Reading{"a", FixedValue::parse("1.5"), 100});
    store.append(Reading{"a", FixedValue::parse("2.25"), 200});
  }
  ReadingStore reloaded(path);
  CHECK(reloaded.size("a") == 2);
  auto series = reloaded.preselect("a", Preselector::LastValue, 300);
  CHECK(series[0].value.str() == "2.250");

  // Another writer appends; refresh picks it up.
  {
    ReadingStore writer(path);
    writer.append(Reading{"a", FixedValue::parse("7"), 300});
  }
  reloaded.refresh();
  CHECK(reloaded.size("a") == 3);
}

TEST_CASE("preprocess aggregates") {
  auto series = [](std::initializer_list<const char*> values) {
    std::vector<Reading> out;
    std::int64_t t = 0;
    for (const char* v : values) out.push_back(Reading{"x", FixedValue::parse(v), ++t});
    return out;
  };
  CHECK(preprocess(series({"2", "4", "6"}), Preprocessor::Average).str() == "4.000");
  CHECK(preprocess(series({"7"}), Preprocessor::Min).str() == "7.000");
  CHECK(preprocess(series({"1.5", "2.25"}), Preprocessor::Sum).str() == "3.750");
  CHECK(preprocess(series({"3", "-1", "9"}), Preprocessor::Min).str() == "-1.000");
  CHECK(preprocess(series({"3", "-1", "9"}), Preprocessor::Max).str() == "9.000");
  // Average rounds half to even at the third decimal.
  CHECK(preprocess(series({"0.001", "0.002"}), Preprocessor::Average).str() == "0.002");
  CHECK(preprocess(series({"0.003", "0.002"}), Preprocessor::Average).str() == "0.002");
  CHECK_THROWS(preprocess({}, Preprocessor::Sum));
}

namespace {

struct VetoRig {
  testfix::Pki pki = testfix::make_pki();
  Query query = testfix::kitchen_sum_query();
  LocalPolicy policy;
  RateTracker rate;
  wire::VerifyContext ctx;

  VetoRig() {
    policy.min_group_size = 3;
    policy.max_request_age_s = 120;
    policy.max_requests_per_client_per_hour = 600;
    ctx.trust_anchors = pki.anchors();
    ctx.grant_issuers = {pki.gateway.certificate};
    ctx.now = kNow;
  }

  Grant grant(std::int64_t nb = kNow - 60, std::int64_t na = kNow + 3600) const {
    Grant g;
    g.queries = {query};
    g.holder = crypto::fingerprint(pki.client.certificate);
    g.purpose = pki.client.certificate.purpose;
    g.not_before = nb;
    g.not_after = na;
    g.sig_issuer = crypto::sign(pki.gateway.secret_key, canonical_dump(g.signing_payload()));
    return g;
  }

  ComputationRequest request() const { return testfix::make_request(pki.client, query, grant(), kNow); }

  Decision run(const ComputationRequest& r, std::size_t group_size = 10) {
    return verify_computation_request(r, testfix::group_of(group_size), policy, &rate, ctx);
  }
};

}  // namespace

TEST_CASE("peer re-verification: all-pass fixture is accepted") {
  VetoRig rig;
  Decision d = rig.run(rig.request());
  CHECK(d.accepted);
}

TEST_CASE("peer re-verification: one fixture per failure cause") {
  VetoRig rig;

  SUBCASE("holder mismatch") {
    auto other = crypto::generate_identity("other", "p", &rig.pki.anchor, kNow - 10, kNow + 3600);
    Grant g = rig.grant();
    g.holder = crypto::fingerprint(other.certificate);
    g.sig_issuer = crypto::sign(rig.pki.gateway.secret_key, canonical_dump(g.signing_payload()));
    auto r = testfix::make_request(rig.pki.client, rig.query, g, kNow);
    Decision d = rig.run(r);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::HolderMismatch);
  }
  SUBCASE("client certificate from an unrelated anchor") {
    auto rogue_anchor = crypto::generate_identity("rogue", "", nullptr, kNow - 10, kNow + 86400);
    auto rogue = crypto::generate_identity("client-1", "p", &rogue_anchor, kNow - 10, kNow + 3600);
    Grant g = rig.grant();
    g.holder = crypto::fingerprint(rogue.certificate);
    g.sig_issuer = crypto::sign(rig.pki.gateway.secret_key, canonical_dump(g.signing_payload()));
    auto r = testfix::make_request(rogue, rig.query, g, kNow);
    Decision d = rig.run(r);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::BadCert);
  }
  SUBCASE("request signature invalid") {
    auto r = rig.request();
    r.timestamp += 1;  // altered after signing
    Decision d = rig.run(r);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::BadRequestSig);
  }
  SUBCASE("grant not yet valid") {
    auto r = testfix::make_request(rig.pki.client, rig.query, rig.grant(kNow + 100, kNow + 3600), kNow);
    Decision d = rig.run(r);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::GrantNotYetValid);
  }
  SUBCASE("grant expired") {
    auto r = testfix::make_request(rig.pki.client, rig.query, rig.grant(kNow - 3600, kNow - 1), kNow);
    Decision d = rig.run(r);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::GrantExpired);
  }
  SUBCASE("grant signed by an untrusted issuer") {
    auto rogue = crypto::generate_identity("rogue-authority", "", nullptr, kNow - 10, kNow + 86400);
    Grant g = rig.grant();
    g.sig_issuer = crypto::sign(rogue.secret_key, canonical_dump(g.signing_payload()));
    auto r = testfix::make_request(rig.pki.client, rig.query, g, kNow);
    Decision d = rig.run(r);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::BadGrantSig);
  }
  SUBCASE("query not in the granted set") {
    Query other = rig.query;
    other.preselector = Preselector::LastHour;
    auto r = testfix::make_request(rig.pki.client, other, rig.grant(), kNow);
    Decision d = rig.run(r);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::QueryNotGranted);
  }
  SUBCASE("client not in the local allowlist") {
    rig.policy.allowed_client_fprs = {"someone-else"};
    Decision d = rig.run(rig.request());
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::ClientNotAllowed);
  }
  SUBCASE("purpose not in the local allowlist") {
    rig.policy.allowed_purposes = {"billing"};
    Decision d = rig.run(rig.request());
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::PurposeNotAllowed);
  }
  SUBCASE("group below the local minimum") {
    Decision d = rig.run(rig.request(), 2);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::GroupTooSmall);
  }
  SUBCASE("stale request") {
    auto r = testfix::make_request(rig.pki.client, rig.query, rig.grant(), kNow - 600);
    Decision d = rig.run(r);
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::StaleRequest);
  }
  SUBCASE("rate limit exceeded") {
    rig.policy.max_requests_per_client_per_hour = 2;
    CHECK(rig.run(rig.request()).accepted);
    CHECK(rig.run(rig.request()).accepted);
    Decision d = rig.run(rig.request());
    CHECK_FALSE(d.accepted);
    CHECK(d.reason == wire::Reason::RateLimitExceeded);
  }
}

TEST_CASE("verification order: each check is reported when all later ones also fail") {
  VetoRig rig;
  Query wrong_query = rig.query;
  wrong_query.preprocessor = Preprocessor::Max;  // never granted below

  // Expired grant, wrong query, tiny group: window end wins over inclusion
  // and policy.
  {
    auto r = testfix::make_request(rig.pki.client, wrong_query, rig.grant(kNow - 3600, kNow - 1), kNow);
    CHECK(rig.run(r, 1).reason == wire::Reason::GrantExpired);
  }
  // Not-yet-valid beats expired-style later failures and inclusion.
  {
    auto r = testfix::make_request(rig.pki.client, wrong_query, rig.grant(kNow + 10, kNow + 20), kNow);
    CHECK(rig.run(r, 1).reason == wire::Reason::GrantNotYetValid);
  }
  // Untrusted issuer beats inclusion and policy.
  {
    auto rogue = crypto::generate_identity("rogue", "", nullptr, kNow - 10, kNow + 3600);
    Grant g = rig.grant();
    g.sig_issuer = crypto::sign(rogue.secret_key, canonical_dump(g.signing_payload()));
    auto r = testfix::make_request(rig.pki.client, wrong_query, g, kNow);
    CHECK(rig.run(r, 1).reason == wire::Reason::BadGrantSig);
  }
  // Inclusion beats policy.
  {
    auto r = testfix::make_request(rig.pki.client, wrong_query, rig.grant(), kNow);
    CHECK(rig.run(r, 1).reason == wire::Reason::QueryNotGranted);
  }
  // Holder binding beats everything.
  {
    auto other = crypto::generate_identity("other", "p", &rig.pki.anchor, kNow - 10, kNow + 3600);
    Grant g = rig.grant(kNow - 3600, kNow - 1);
    g.holder = crypto::fingerprint(other.certificate);
    g.sig_issuer = crypto::sign(rig.pki.gateway.secret_key, canonical_dump(g.signing_payload()));
    auto r = testfix::make_request(rig.pki.client, wrong_query, g, kNow);
    CHECK(rig.run(r, 1).reason == wire::Reason::HolderMismatch);
  }
}

TEST_CASE("verification reports the first failing check") {
  VetoRig rig;
  // Expired grant AND missing query AND too-small group: the window check
  // (first in order among these) must win.
  Query other = rig.query;
  other.preprocessor = Preprocessor::Max;
  auto r = testfix::make_request(rig.pki.client, other, rig.grant(kNow - 3600, kNow - 1), kNow);
  Decision d = rig.run(r, 1);
  CHECK(d.reason == wire::Reason::GrantExpired);

  // Tampered request beats everything behind the signature check.
  auto r2 = testfix::make_request(rig.pki.client, other, rig.grant(kNow - 3600, kNow - 1), kNow);
  r2.timestamp += 1;
  Decision d2 = rig.run(r2, 1);
  CHECK(d2.reason == wire::Reason::BadRequestSig);
}

TEST_CASE("rate tracker uses a sliding hour window") {
  RateTracker rate;
  CHECK_FALSE(rate.record_and_check("c", 1000, 2));
  CHECK_FALSE(rate.record_and_check("c", 1010, 2));
  CHECK(rate.record_and_check("c", 1020, 2));
  // Other clients are tracked independently.
  CHECK_FALSE(rate.record_and_check("d", 1020, 2));
  // An hour after the last request the window has drained.
  CHECK_FALSE(rate.record_and_check("c", 1020 + 3601, 2));
}

TEST_CASE("accountability log appends, reloads and verifies") {
  testfix::Pki pki = testfix::make_pki();
  Query query = testfix::kitchen_sum_query();
  Grant grant = testfix::make_grant(pki.gateway, pki.client.certificate, {query});
  ComputationRequest request = testfix::make_request(pki.client, query, grant);

  auto reporter = crypto::generate_identity("peer-0", "", &pki.anchor, kNow - 10, kNow + 86400);
  std::string path = "/tmp/smcgw_test_audit.jsonl";
  std::filesystem::remove(path);

  {
    AccountabilityLog log(path);
    for (int i = 0; i < 3; ++i) {
      AccountabilityEntry entry;
      entry.session_id = "session-" + std::to_string(i);
      entry.request = request;
      entry.sig_gateway =
          crypto::sign(pki.gateway.secret_key, request_accountability_bytes(request));
      FixedValue value = FixedValue::parse(std::to_string(10 + i));
      entry.value = value.str();
      entry.sig_peer = smc::sign_result_record(entry.session_id, value, reporter.secret_key);
      entry.reporter_cert = reporter.certificate;
      log.append(std::move(entry));
    }
    CHECK(log.size() == 3);
    CHECK(log.entries()[2].seq == 2);
  }

  auto statuses = AccountabilityLog::verify_file(path, pki.gateway.certificate, pki.anchors(), kNow);
  REQUIRE(statuses.size() == 3);
  for (const auto& s : statuses) CHECK(s.ok);

  // Reload keeps order and the next append continues the sequence.
  AccountabilityLog reloaded(path);
  CHECK(reloaded.size() == 3);

  // Tampering with a persisted entry's request bytes flags the entry.
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  auto pos = lines[1].find("\"timestamp\":");
  REQUIRE(pos != std::string::npos);
  lines[1][pos + 13] = lines[1][pos + 13] == '9' ? '8' : '9';
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : lines) out << l << "\n";
  out.close();

  statuses = AccountabilityLog::verify_file(path, pki.gateway.certificate, pki.anchors(), kNow);
  REQUIRE(statuses.size() == 3);
  CHECK(statuses[0].ok);
  CHECK_FALSE(statuses[1].ok);
  CHECK(statuses[2].ok);

  // A syntactically destroyed line is flagged too.
  lines[2] = "{not json";
  std::ofstream out2(path, std::ios::trunc);
  for (const auto& l : lines) out2 << l << "\n";
  out2.close();
  statuses = AccountabilityLog::verify_file(path, pki.gateway.certificate, pki.anchors(), kNow);
  CHECK_FALSE(statuses[2].ok);
}

TEST_CASE("preselect and preprocess are deterministic given store and clock") {
  ReadingStore store;
  std::int64_t t0 = 1700000000;
  for (int k = 0; k < 7; ++k) {
    store.append(Reading{"x", FixedValue::parse(std::to_string(k) + ".337"), t0 + k * 977});
  }
  std::int64_t now = t0 + 7 * 977;
  auto first = preprocess(store.preselect("x", Preselector::LastHour, now), Preprocessor::Average);
  for (int i = 0; i < 10; ++i) {
    auto again = preprocess(store.preselect("x", Preselector::LastHour, now), Preprocessor::Average);
    CHECK(again.millis() == first.millis());
    CHECK(again.str() == first.str());
  }
}

TEST_CASE("policy and daemon defaults") {
  LocalPolicy policy;
  CHECK(policy.min_group_size == 3);
  CHECK(policy.max_request_age_s == 120);
  CHECK(policy.max_requests_per_client_per_hour == 600);
  CHECK(ReadingStore::kRetentionSeconds == 30 * 86400);
}

TEST_CASE("registration against an unreachable gateway retries then gives up") {
  testfix::Pki pki = testfix::make_pki();
  PeerConfig cfg;
  cfg.peer_id = "peer-x";
  cfg.labels = {{"type", "heater"}};
  cfg.inputs = {"power_consumption"};
  cfg.trust_anchors = pki.anchors();
  PeerDaemon daemon(cfg, crypto::generate_identity("peer-x", "", &pki.anchor, kNow - 10, kNow + 3600));
  CHECK_FALSE(daemon.register_with_gateway("127.0.0.1:9", 2));  // discard port, refused instantly
}

TEST_CASE("local policy json round trip") {
  LocalPolicy p;
  p.allowed_purposes = {"dashboard display"};
  p.min_group_size = 5;
  nlohmann::json j = p;
  LocalPolicy back = j.get<LocalPolicy>();
  CHECK(back.min_group_size == 5);
  REQUIRE(back.allowed_purposes);
  CHECK(back.allowed_purposes->count("dashboard display") == 1);
  CHECK_FALSE(back.allowed_client_fprs);

  nlohmann::json bad{{"min_group_size", 0}};
  CHECK_THROWS(bad.get<LocalPolicy>());
}
