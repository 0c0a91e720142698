#include "smcgw/smc/backend.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

namespace smcgw::smc {

void to_json(nlohmann::json& j, const SessionParticipant& p) {
  j = nlohmann::json{{"address", p.address}, {"certificate", p.certificate}, {"peer_id", p.peer_id}};
}

void from_json(const nlohmann::json& j, SessionParticipant& p) {
  p.peer_id = j.at("peer_id").get<std::string>();
  p.address = j.at("address").get<std::string>();
  p.certificate = j.at("certificate").get<Certificate>();
}

std::size_t SessionPlan::reporter_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < participants.size(); ++i) {
    if (participants[i].peer_id < participants[best].peer_id) best = i;
  }
  return best;
}

void validate_plan(const SessionPlan& plan) {
  if (plan.participants.empty()) throw std::invalid_argument("session plan has no participants");
  if (plan.contributions.size() != plan.participants.size()) {
    throw std::invalid_argument("contributions must align with participants");
  }
  if (plan.protocol != "sum") throw UnsupportedProtocolError(plan.protocol);
}

std::string hex_element(std::uint64_t element) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(element));
  return buf;
}

std::uint64_t element_from_hex(const std::string& hex) {
  if (hex.empty() || hex.size() > 16) throw std::invalid_argument("bad field element hex");
  std::uint64_t v = std::stoull(hex, nullptr, 16);
  if (v >= kFieldPrime) throw std::invalid_argument("field element out of range");
  return v;
}

FixedValue MockSumBackend::compute(const SessionPlan& plan, Transcript* transcript) {
  validate_plan(plan);
  const std::string& reporter = plan.participants[plan.reporter_index()].peer_id;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < plan.participants.size(); ++i) {
    std::int64_t c = plan.contributions[i];
    if (transcript) {
      transcript->push_back({"contribution", plan.session_id, plan.participants[i].peer_id,
                             reporter, FixedValue::from_millis(c).str()});
    }
    if (__builtin_add_overflow(total, c, &total)) {
      throw FieldRangeError("mock sum overflow");
    }
  }
  return FixedValue::from_millis(total);
}

AdditiveShareBackend::AdditiveShareBackend() {
  rng_ = [] {
    std::uint64_t v;
    randombytes_buf(&v, sizeof v);
    return v;
  };
}

FixedValue AdditiveShareBackend::compute(const SessionPlan& plan, Transcript* transcript) {
  validate_plan(plan);
  std::size_t n = plan.participants.size();
  if (n < 2) throw std::invalid_argument("additive sharing needs at least 2 participants");

  // Range-check every contribution before a single share goes out.
  std::vector<std::uint64_t> encoded(n);
  for (std::size_t i = 0; i < n; ++i) encoded[i] = encode_millis(plan.contributions[i]);

  // Share matrix: shares[i][j] is peer i's share destined for peer j.
  std::vector<std::vector<std::uint64_t>> shares(n);
  for (std::size_t i = 0; i < n; ++i) {
    shares[i] = split_shares(encoded[i], n, rng_);
    if (transcript) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;  // own share is kept, never transmitted
        transcript->push_back({"share", plan.session_id, plan.participants[i].peer_id,
                               plan.participants[j].peer_id, hex_element(shares[i][j])});
      }
    }
  }

  // Each peer reveals only the sum of the shares it holds.
  std::size_t reporter = plan.reporter_index();
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t column = 0;
    for (std::size_t i = 0; i < n; ++i) column = add_mod(column, shares[i][j]);
    if (transcript && j != reporter) {
      transcript->push_back({"reveal", plan.session_id, plan.participants[j].peer_id,
                             plan.participants[reporter].peer_id, hex_element(column)});
    }
    total = add_mod(total, column);
  }
  return FixedValue::from_millis(decode_millis(total));
}

std::unique_ptr<Backend> make_backend(const std::string& name) {
  if (name == "mock") return std::make_unique<MockSumBackend>();
  if (name == "additive") return std::make_unique<AdditiveShareBackend>();
  throw std::invalid_argument("unknown backend: '" + name + "'");
}

}  // namespace smcgw::smc
