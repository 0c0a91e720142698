#pragma once

// Metadata a peer provides when pairing with a gateway: domain labels, the
// input streams it can contribute, and the protocols it supports.

#include <set>
#include <string>

#include <json.hpp>

#include "smcgw/model/certificate.hpp"
#include "smcgw/model/label.hpp"

namespace smcgw {

struct PeerProfile {
  std::string peer_id;
  Certificate certificate;
  LabelSet labels;
  std::set<std::string> inputs;
  std::set<std::string> protocols;

  nlohmann::json signing_payload() const;
  // Throws std::invalid_argument: labels and inputs must be non-empty and a
  // participating peer must support "sum".
  void validate() const;
};

void to_json(nlohmann::json& j, const PeerProfile& p);
void from_json(const nlohmann::json& j, PeerProfile& p);

}  // namespace smcgw
