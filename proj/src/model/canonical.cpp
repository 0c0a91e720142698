#include "smcgw/model/canonical.hpp"

namespace smcgw {

namespace {

void reject_floats(const nlohmann::json& value) {
  if (value.is_number_float()) {
    throw SerializationError("floating point values are not canonically representable");
  }
  if (value.is_object() || value.is_array()) {
    for (const auto& item : value) reject_floats(item);
  }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& value) {
  reject_floats(value);
  try {
    return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
  } catch (const nlohmann::json::type_error& e) {
    throw SerializationError(std::string("unrepresentable value: ") + e.what());
  }
}

std::string to_hex(const Bytes& data) { return to_hex(data.data(), data.size()); }

std::string to_hex(const std::uint8_t* data, std::size_t len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.resize(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out[i * 2] = digits[(data[i] >> 4) & 0xF];
    out[i * 2 + 1] = digits[data[i] & 0xF];
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw SerializationError("hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw SerializationError("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace smcgw
