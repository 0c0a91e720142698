#pragma once

// Canonical byte serialization. Every signature in the system is computed
// over bytes produced here, so the encoding must be bit-exact across
// processes and platforms: UTF-8 JSON, object keys sorted lexicographically,
// no insignificant whitespace, integers in base 10, binary fields as
// lower-case hex. Floating point values are rejected outright; anything
// fractional travels as a fixed-point decimal string.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace smcgw {

using Bytes = std::vector<std::uint8_t>;

class SerializationError : public std::runtime_error {
 public:
  explicit SerializationError(const std::string& what) : std::runtime_error(what) {}
};

// nlohmann::json backed by std::map already iterates keys in lexicographic
// order; canonical_dump adds the float/UTF-8 guard on top of compact dump().
std::string canonical_dump(const nlohmann::json& value);

std::string to_hex(const Bytes& data);
std::string to_hex(const std::uint8_t* data, std::size_t len);
Bytes from_hex(const std::string& hex);  // throws SerializationError on odd length / bad digit

}  // namespace smcgw
