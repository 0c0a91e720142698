#include "smcgw/model/certificate.hpp"

namespace smcgw {

nlohmann::json Certificate::signing_payload() const {
  return nlohmann::json{{"issuer_fpr", issuer_fpr},
                        {"not_after", not_after},
                        {"not_before", not_before},
                        {"public_key", to_hex(public_key)},
                        {"purpose", purpose},
                        {"subject", subject}};
}

void to_json(nlohmann::json& j, const Certificate& c) {
  j = c.signing_payload();
  j["sig"] = c.sig.hex();
}

void from_json(const nlohmann::json& j, Certificate& c) {
  c.public_key = from_hex(j.at("public_key").get<std::string>());
  c.subject = j.at("subject").get<std::string>();
  c.purpose = j.at("purpose").get<std::string>();
  c.issuer_fpr = j.at("issuer_fpr").get<std::string>();
  c.not_before = j.at("not_before").get<std::int64_t>();
  c.not_after = j.at("not_after").get<std::int64_t>();
  c.sig = Signature::from_hex_str(j.at("sig").get<std::string>());
}

}  // namespace smcgw
