#pragma once

// Prime-field arithmetic for additive secret sharing. The modulus is the
// Mersenne prime 2^61 - 1, large enough that sums of a thousand scaled
// contributions stay below the wrap-around point. Contributions are signed
// fixed-point milli-units embedded centered: residues above (q-1)/2 decode
// as negative.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace smcgw::smc {

inline constexpr std::uint64_t kFieldPrime = 2305843009213693951ULL;  // 2^61 - 1

// Largest |contribution| in milli-units accepted for field embedding.
// 1000 participants at this bound still fit inside (q-1)/2.
inline constexpr std::int64_t kMaxContributionMillis = 1'000'000'000'000'000;

class FieldRangeError : public std::runtime_error {
 public:
  explicit FieldRangeError(const std::string& what) : std::runtime_error(what) {}
};

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;  // < 2^62, no overflow
  return s >= kFieldPrime ? s - kFieldPrime : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b) {
  return a >= b ? a - b : a + kFieldPrime - b;
}

std::uint64_t encode_millis(std::int64_t millis);  // throws FieldRangeError
std::int64_t decode_millis(std::uint64_t element);

// Uniform field element drawn from a caller-supplied 64-bit generator
// (rejection sampled).
using Rng64 = std::function<std::uint64_t()>;
std::uint64_t random_element(const Rng64& rng);

// Splits `value` into n additive shares summing to value mod q. n >= 2.
std::vector<std::uint64_t> split_shares(std::uint64_t value, std::size_t n, const Rng64& rng);

}  // namespace smcgw::smc
