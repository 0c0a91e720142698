#pragma once

// A query is the five-field declarative description of a computation the
// gateway offers: which peers (predicate), which time window (preselector),
// how the window collapses to one contribution per peer (preprocessor),
// which protocol runs between the peers, and which input stream feeds it.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "smcgw/model/predicate.hpp"

namespace smcgw {

enum class Preselector { LastValue, LastHour, Last6Hours, Last24Hours };
enum class Preprocessor { Min, Max, Sum, Average };

// Canonical tokens ("last_6_hours", "average"). Parsing also accepts the
// human forms ("last 6 hours", "avg").
std::string preselector_token(Preselector p);
std::string preprocessor_token(Preprocessor p);
Preselector parse_preselector(const std::string& token);    // throws std::invalid_argument
Preprocessor parse_preprocessor(const std::string& token);  // throws std::invalid_argument

// Window width in seconds; 0 for LastValue.
std::int64_t preselector_window_s(Preselector p);

struct Query {
  Predicate predicate;
  Preselector preselector = Preselector::LastValue;
  Preprocessor preprocessor = Preprocessor::Average;
  std::string protocol;  // e.g. "sum"
  std::string input;     // e.g. "power_consumption"

  // "pred ; preselector ; preprocessor ; protocol ; input" -- unique per
  // query value; used for policy rules, grant caching and display.
  std::string canonical_string() const;

  bool operator==(const Query& other) const { return canonical_string() == other.canonical_string(); }
};

// Exact five-field equality; predicates compared by canonical string.
inline bool query_matches(const Query& granted, const Query& requested) { return granted == requested; }

void to_json(nlohmann::json& j, const Query& q);
void from_json(const nlohmann::json& j, Query& q);

}  // namespace smcgw
