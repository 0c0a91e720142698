#include "smcgw/model/label.hpp"

#include <stdexcept>

namespace smcgw {

void validate_label(const Label& label) {
  if (label.key.empty()) throw std::invalid_argument("label key must be non-empty");
  if (label.value.empty()) throw std::invalid_argument("label value must be non-empty");
  if (label.key.find('=') != std::string::npos || label.key.find("∈") != std::string::npos) {
    throw std::invalid_argument("label key must not contain '=' or '∈'");
  }
}

LabelSet label_superset(const std::vector<LabelSet>& peer_labels) {
  LabelSet out;
  for (const auto& labels : peer_labels) out.insert(labels.begin(), labels.end());
  return out;
}

}  // namespace smcgw
