#include "smcgw/model/query.hpp"

#include <stdexcept>

namespace smcgw {

std::string preselector_token(Preselector p) {
  switch (p) {
    case Preselector::LastValue: return "last_value";
    case Preselector::LastHour: return "last_hour";
    case Preselector::Last6Hours: return "last_6_hours";
    case Preselector::Last24Hours: return "last_24_hours";
  }
  throw std::invalid_argument("bad preselector");
}

std::string preprocessor_token(Preprocessor p) {
  switch (p) {
    case Preprocessor::Min: return "min";
    case Preprocessor::Max: return "max";
    case Preprocessor::Sum: return "sum";
    case Preprocessor::Average: return "average";
  }
  throw std::invalid_argument("bad preprocessor");
}

Preselector parse_preselector(const std::string& token) {
  if (token == "last_value" || token == "last value") return Preselector::LastValue;
  if (token == "last_hour" || token == "last hour") return Preselector::LastHour;
  if (token == "last_6_hours" || token == "last 6 hours") return Preselector::Last6Hours;
  if (token == "last_24_hours" || token == "last 24 hours") return Preselector::Last24Hours;
  throw std::invalid_argument("unknown preselector: '" + token + "'");
}

Preprocessor parse_preprocessor(const std::string& token) {
  if (token == "min") return Preprocessor::Min;
  if (token == "max") return Preprocessor::Max;
  if (token == "sum") return Preprocessor::Sum;
  if (token == "average" || token == "avg") return Preprocessor::Average;
  throw std::invalid_argument("unknown preprocessor: '" + token + "'");
}

std::int64_t preselector_window_s(Preselector p) {
  switch (p) {
    case Preselector::LastValue: return 0;
    case Preselector::LastHour: return 3600;
    case Preselector::Last6Hours: return 6 * 3600;
    case Preselector::Last24Hours: return 24 * 3600;
  }
  throw std::invalid_argument("bad preselector");
}

std::string Query::canonical_string() const {
  return predicate.canonical() + " ; " + preselector_token(preselector) + " ; " +
         preprocessor_token(preprocessor) + " ; " + protocol + " ; " + input;
}

void to_json(nlohmann::json& j, const Query& q) {
  j = nlohmann::json{{"input", q.input},
                     {"predicate", q.predicate.canonical()},
                     {"preprocessor", preprocessor_token(q.preprocessor)},
                     {"preselector", preselector_token(q.preselector)},
                     {"protocol", q.protocol}};
}

void from_json(const nlohmann::json& j, Query& q) {
  q.predicate = Predicate::parse(j.at("predicate").get<std::string>());
  q.preselector = parse_preselector(j.at("preselector").get<std::string>());
  q.preprocessor = parse_preprocessor(j.at("preprocessor").get<std::string>());
  q.protocol = j.at("protocol").get<std::string>();
  q.input = j.at("input").get<std::string>();
}

}  // namespace smcgw
