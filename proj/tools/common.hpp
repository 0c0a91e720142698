#pragma once

// Config-file loading shared by the daemon and client executables.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/model/label.hpp"

namespace tools {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return nlohmann::json::parse(in);
}

inline std::vector<smcgw::Certificate> load_certificates(const nlohmann::json& paths) {
  std::vector<smcgw::Certificate> certs;
  for (const auto& p : paths) certs.push_back(smcgw::crypto::load_certificate(p.get<std::string>()));
  return certs;
}

inline smcgw::LabelSet parse_labels(const nlohmann::json& j) {
  smcgw::LabelSet labels;
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      labels.insert(smcgw::Label{it.key(), it.value().get<std::string>()});
    }
  } else {
    for (const auto& pair : j) {
      labels.insert(smcgw::Label{pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
    }
  }
  return labels;
}

}  // namespace tools
