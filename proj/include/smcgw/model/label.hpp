#pragma once

// Peer labels: key-value pairs describing a sensor platform in domain terms
// (roomtype: kitchen, level: 3, ...). Values are opaque strings and keys are
// compared case-sensitively.

#include <set>
#include <string>
#include <vector>

namespace smcgw {

struct Label {
  std::string key;
  std::string value;

  bool operator==(const Label&) const = default;
  auto operator<=>(const Label&) const = default;
};

using LabelSet = std::set<Label>;

// Throws std::invalid_argument when key or value is empty or the key
// contains a predicate operator character ('=' or '∈').
void validate_label(const Label& label);

// Union of all peers' label sets; order of the input is irrelevant.
LabelSet label_superset(const std::vector<LabelSet>& peer_labels);

}  // namespace smcgw
