#include "smcgw/smc/result.hpp"

namespace smcgw::smc {

Signature sign_result_record(const std::string& session_id, const FixedValue& value,
                             const crypto::SecretKey& reporter_key) {
  ResultRecord record{session_id, value.str()};
  return crypto::sign(reporter_key, canonical_dump(record.signing_payload()));
}

bool verify_result_record(const std::string& session_id, const std::string& value,
                          const Signature& sig, const Certificate& reporter_cert) {
  ResultRecord record{session_id, value};
  return crypto::verify(sig, reporter_cert, canonical_dump(record.signing_payload()));
}

SealedResult seal_result(const std::string& session_id, const FixedValue& value,
                         const crypto::Identity& reporter, const Certificate& client_cert) {
  Signature sig = sign_result_record(session_id, value, reporter.secret_key);
  nlohmann::json payload{{"reporter_cert", reporter.certificate},
                         {"session_id", session_id},
                         {"sig_peer", sig.hex()},
                         {"value", value.str()}};
  Bytes ciphertext = crypto::encrypt_for(client_cert, canonical_dump(payload));
  return SealedResult{session_id, std::move(ciphertext)};
}

std::optional<OpenedResult> open_result(const SealedResult& sealed, const crypto::Identity& client,
                                        const std::vector<Certificate>& trust_anchors,
                                        std::int64_t now) {
  auto plain = crypto::decrypt(client.secret_key, client.certificate, sealed.ciphertext);
  if (!plain) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(*plain, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  try {
    OpenedResult out;
    out.session_id = j.at("session_id").get<std::string>();
    std::string value_str = j.at("value").get<std::string>();
    out.value = FixedValue::parse(value_str);
    out.reporter_cert = j.at("reporter_cert").get<Certificate>();
    Signature sig = Signature::from_hex_str(j.at("sig_peer").get<std::string>());
    if (out.session_id != sealed.session_id) return std::nullopt;
    if (!crypto::verify_chain(out.reporter_cert, trust_anchors, now)) return std::nullopt;
    if (!verify_result_record(out.session_id, value_str, sig, out.reporter_cert)) return std::nullopt;
    return out;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace smcgw::smc
