#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/smc/backend.hpp"
#include "smcgw/smc/result.hpp"

using namespace smcgw;
using namespace smcgw::smc;

namespace {

SessionPlan plan_with(std::vector<std::int64_t> contributions_millis) {
  SessionPlan plan;
  plan.session_id = "s";
  plan.protocol = "sum";
  for (std::size_t i = 0; i < contributions_millis.size(); ++i) {
    plan.participants.push_back({"peer-" + std::to_string(i), "", Certificate{}});
  }
  plan.contributions = std::move(contributions_millis);
  return plan;
}

Rng64 seeded_rng(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng] { return (*rng)(); };
}

}  // namespace

TEST_CASE("field encoding is centered") {
  CHECK(decode_millis(encode_millis(0)) == 0);
  CHECK(decode_millis(encode_millis(12345)) == 12345);
  CHECK(decode_millis(encode_millis(-12345)) == -12345);
  CHECK(decode_millis(encode_millis(kMaxContributionMillis)) == kMaxContributionMillis);
  CHECK(decode_millis(encode_millis(-kMaxContributionMillis)) == -kMaxContributionMillis);
  CHECK_THROWS_AS(encode_millis(kMaxContributionMillis + 1), FieldRangeError);
  CHECK_THROWS_AS(encode_millis(-kMaxContributionMillis - 1), FieldRangeError);
}

TEST_CASE("share splitting reconstructs") {
  auto rng = seeded_rng(5);
  for (std::size_t n : {std::size_t{2}, std::size_t{3}, std::size_t{17}}) {
    std::uint64_t value = encode_millis(424242);
    auto shares = split_shares(value, n, rng);
    REQUIRE(shares.size() == n);
    std::uint64_t sum = 0;
    for (auto s : shares) sum = add_mod(sum, s);
    CHECK(sum == value);
  }
  CHECK_THROWS(split_shares(1, 1, rng));
}

TEST_CASE("mock backend sums contributions") {
  MockSumBackend mock;
  CHECK(mock.compute(plan_with({1000, 2000, 3000}), nullptr).str() == "6.000");
  CHECK(mock.compute(plan_with({7000}), nullptr).str() == "7.000");

  SessionPlan bad = plan_with({1000});
  bad.protocol = "median";
  CHECK_THROWS_AS(mock.compute(bad, nullptr), UnsupportedProtocolError);
}

TEST_CASE("additive backend equals mock backend") {
  MockSumBackend mock;
  AdditiveShareBackend additive(seeded_rng(31));

  CHECK(additive.compute(plan_with({5000, 9000}), nullptr).str() == "14.000");
  CHECK(additive.compute(plan_with({0, 0, 0}), nullptr).str() == "0.000");

  // Negative contributions decode through the centered embedding.
  CHECK(additive.compute(plan_with({-2500, 1000}), nullptr).str() == "-1.500");

  std::mt19937_64 rng(37);
  std::uniform_int_distribution<std::int64_t> value(0, 999'999'999);  // < 10^6 units in millis
  std::uniform_int_distribution<std::size_t> count(2, 30);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::int64_t> contributions(count(rng));
    for (auto& c : contributions) c = value(rng);
    SessionPlan plan = plan_with(contributions);
    CHECK(additive.compute(plan, nullptr).millis() == mock.compute(plan, nullptr).millis());
  }
}

TEST_CASE("additive backend range checks before any share is emitted") {
  AdditiveShareBackend additive(seeded_rng(41));
  SessionPlan plan = plan_with({kMaxContributionMillis + 1, 1000});
  Transcript transcript;
  CHECK_THROWS_AS(additive.compute(plan, &transcript), FieldRangeError);
  CHECK(transcript.empty());
}

TEST_CASE("additive transcript never carries a raw contribution") {
  AdditiveShareBackend additive(seeded_rng(43));
  std::vector<std::int64_t> contributions{1500, 2250, 4000, 123456};
  SessionPlan plan = plan_with(contributions);
  Transcript transcript;
  additive.compute(plan, &transcript);

  // n*(n-1) share messages plus n-1 reveals.
  CHECK(transcript.size() == 4 * 3 + 3);
  for (const auto& msg : transcript) {
    CHECK(msg.from != msg.to);
    for (std::int64_t c : contributions) {
      CHECK(msg.payload != FixedValue::from_millis(c).str());
      CHECK(msg.payload != hex_element(encode_millis(c)));
      CHECK(msg.payload.find('.') == std::string::npos);
    }
  }
}

TEST_CASE("individual shares look uniform (chi-squared, 16 buckets)") {
  // 10k splits of a fixed value; every share position must pass a coarse
  // uniformity test. chi^2 critical value for 15 dof at significance 0.001.
  constexpr double kCritical = 37.697;
  constexpr int kTrials = 10000;
  constexpr std::size_t kParties = 3;
  auto rng = seeded_rng(47);
  std::uint64_t value = encode_millis(777000);

  std::array<std::array<int, 16>, kParties> buckets{};
  for (int t = 0; t < kTrials; ++t) {
    auto shares = split_shares(value, kParties, rng);
    for (std::size_t i = 0; i < kParties; ++i) {
      auto b = static_cast<std::size_t>((static_cast<unsigned __int128>(shares[i]) * 16) / kFieldPrime);
      buckets[i][b]++;
    }
  }
  for (std::size_t i = 0; i < kParties; ++i) {
    double expected = double(kTrials) / 16.0;
    double chi2 = 0;
    for (int count : buckets[i]) {
      double d = count - expected;
      chi2 += d * d / expected;
    }
    INFO("share position ", i, " chi2=", chi2);
    CHECK(chi2 < kCritical);
  }
}

TEST_CASE("reporter is the lexicographically smallest peer id") {
  SessionPlan plan = plan_with({1000, 2000, 3000});
  plan.participants[0].peer_id = "zulu";
  plan.participants[1].peer_id = "alpha";
  plan.participants[2].peer_id = "mike";
  CHECK(plan.reporter_index() == 1);
}

TEST_CASE("sealed results round trip and reject tampering") {
  crypto::init();
  constexpr std::int64_t now = 1700000000;
  auto anchor = crypto::generate_identity("anchor", "", nullptr, now - 10, now + 86400);
  auto reporter = crypto::generate_identity("peer-1", "", &anchor, now - 10, now + 86400);
  auto client = crypto::generate_identity("client", "display", &anchor, now - 10, now + 86400);
  std::vector<Certificate> anchors{anchor.certificate};

  SealedResult sealed = seal_result("session-9", FixedValue::parse("14"), reporter, client.certificate);
  auto opened = open_result(sealed, client, anchors, now);
  REQUIRE(opened);
  CHECK(opened->value.str() == "14.000");
  CHECK(opened->session_id == "session-9");
  CHECK(crypto::fingerprint(opened->reporter_cert) == crypto::fingerprint(reporter.certificate));

  // Any single-byte corruption is detected.
  for (std::size_t pos : {std::size_t{0}, sealed.ciphertext.size() / 2, sealed.ciphertext.size() - 1}) {
    SealedResult bad = sealed;
    bad.ciphertext[pos] ^= 0x01;
    CHECK_FALSE(open_result(bad, client, anchors, now));
  }

  // Session id substitution is detected.
  SealedResult wrong_session = sealed;
  wrong_session.session_id = "session-10";
  CHECK_FALSE(open_result(wrong_session, client, anchors, now));

  // A reporter outside the trust anchors is rejected.
  auto rogue_anchor = crypto::generate_identity("rogue", "", nullptr, now - 10, now + 86400);
  auto rogue = crypto::generate_identity("peer-1", "", &rogue_anchor, now - 10, now + 86400);
  SealedResult forged = seal_result("session-9", FixedValue::parse("14"), rogue, client.certificate);
  CHECK_FALSE(open_result(forged, client, anchors, now));
}
