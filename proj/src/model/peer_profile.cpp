#include "smcgw/model/peer_profile.hpp"

#include <stdexcept>

namespace smcgw {

nlohmann::json PeerProfile::signing_payload() const {
  nlohmann::json labels_json = nlohmann::json::array();
  for (const Label& l : labels) labels_json.push_back({l.key, l.value});
  return nlohmann::json{{"certificate", certificate},
                        {"inputs", inputs},
                        {"labels", labels_json},
                        {"peer_id", peer_id},
                        {"protocols", protocols}};
}

void PeerProfile::validate() const {
  if (peer_id.empty()) throw std::invalid_argument("peer_id must be non-empty");
  if (labels.empty()) throw std::invalid_argument("peer labels must be non-empty");
  if (inputs.empty()) throw std::invalid_argument("peer inputs must be non-empty");
  if (protocols.count("sum") == 0) {
    throw std::invalid_argument("peer must advertise the \"sum\" protocol to participate");
  }
  for (const Label& l : labels) validate_label(l);
}

void to_json(nlohmann::json& j, const PeerProfile& p) { j = p.signing_payload(); }

void from_json(const nlohmann::json& j, PeerProfile& p) {
  p.peer_id = j.at("peer_id").get<std::string>();
  p.certificate = j.at("certificate").get<Certificate>();
  p.labels.clear();
  for (const auto& pair : j.at("labels")) {
    p.labels.insert(Label{pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
  }
  p.inputs = j.at("inputs").get<std::set<std::string>>();
  p.protocols = j.at("protocols").get<std::set<std::string>>();
}

}  // namespace smcgw
