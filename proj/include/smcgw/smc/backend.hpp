#pragma once

// Pluggable computation backends. A SessionPlan carries the approved group
// and each participant's preprocessed contribution; compute() returns the
// protocol function over the contributions plus a transcript of every
// message a participant emitted, so tests can assert what never left a peer.
//
// Two backends ship: a plaintext mock (evaluation-only, contributions travel
// in clear to the reporter) and additive secret sharing over a prime field.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "smcgw/model/certificate.hpp"
#include "smcgw/model/fixed.hpp"
#include "smcgw/smc/field.hpp"

namespace smcgw::smc {

struct SessionParticipant {
  std::string peer_id;
  std::string address;  // host:port, empty for in-process plans
  Certificate certificate;
};

void to_json(nlohmann::json& j, const SessionParticipant& p);
void from_json(const nlohmann::json& j, SessionParticipant& p);

struct SessionPlan {
  std::string session_id;
  std::vector<SessionParticipant> participants;
  std::string protocol;  // only "sum" is supported
  std::vector<std::int64_t> contributions;  // milli-units, aligned with participants

  // The designated result reporter: lexicographically smallest peer id.
  std::size_t reporter_index() const;
};

class UnsupportedProtocolError : public std::runtime_error {
 public:
  explicit UnsupportedProtocolError(const std::string& protocol)
      : std::runtime_error("unsupported protocol: '" + protocol + "'") {}
};

class ParticipantFailure : public std::runtime_error {
 public:
  ParticipantFailure(const std::string& peer_id, const std::string& what)
      : std::runtime_error("participant " + peer_id + " failed: " + what), peer_id(peer_id) {}
  std::string peer_id;
};

struct TranscriptMessage {
  std::string type;  // "share", "reveal", "contribution"
  std::string session_id;
  std::string from;
  std::string to;
  std::string payload;
};

using Transcript = std::vector<TranscriptMessage>;

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // Throws UnsupportedProtocolError / FieldRangeError / ParticipantFailure.
  virtual FixedValue compute(const SessionPlan& plan, Transcript* transcript) = 0;
};

// Plaintext sum, as used for protocol-overhead evaluation: contributions are
// sent in clear to the reporter. Never use where input privacy matters.
class MockSumBackend : public Backend {
 public:
  std::string name() const override { return "mock"; }
  FixedValue compute(const SessionPlan& plan, Transcript* transcript) override;
};

// Additive secret sharing: every participant splits its contribution into n
// uniform shares, sends one to each other participant, and reveals only the
// sum of the shares it received. Requires >= 2 participants.
class AdditiveShareBackend : public Backend {
 public:
  AdditiveShareBackend();
  explicit AdditiveShareBackend(Rng64 rng) : rng_(std::move(rng)) {}
  std::string name() const override { return "additive"; }
  FixedValue compute(const SessionPlan& plan, Transcript* transcript) override;

 private:
  Rng64 rng_;
};

std::unique_ptr<Backend> make_backend(const std::string& name);  // "mock" | "additive"

void validate_plan(const SessionPlan& plan);
std::string hex_element(std::uint64_t element);
std::uint64_t element_from_hex(const std::string& hex);

}  // namespace smcgw::smc
