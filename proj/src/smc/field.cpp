#include "smcgw/smc/field.hpp"

namespace smcgw::smc {

std::uint64_t encode_millis(std::int64_t millis) {
  if (millis > kMaxContributionMillis || millis < -kMaxContributionMillis) {
    throw FieldRangeError("contribution " + std::to_string(millis) +
                          " milli-units exceeds the field embedding range");
  }
  if (millis >= 0) return static_cast<std::uint64_t>(millis);
  return kFieldPrime - static_cast<std::uint64_t>(-millis);
}

std::int64_t decode_millis(std::uint64_t element) {
  constexpr std::uint64_t half = (kFieldPrime - 1) / 2;
  if (element <= half) return static_cast<std::int64_t>(element);
  return -static_cast<std::int64_t>(kFieldPrime - element);
}

std::uint64_t random_element(const Rng64& rng) {
  // Rejection sampling over the smallest multiple of q below 2^64 keeps the
  // distribution exactly uniform.
  constexpr std::uint64_t limit = UINT64_MAX - (UINT64_MAX % kFieldPrime);
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % kFieldPrime;
}

std::vector<std::uint64_t> split_shares(std::uint64_t value, std::size_t n, const Rng64& rng) {
  if (n < 2) throw std::invalid_argument("additive sharing needs at least 2 shares");
  std::vector<std::uint64_t> shares(n);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    shares[i] = random_element(rng);
    sum = add_mod(sum, shares[i]);
  }
  shares[n - 1] = sub_mod(value, sum);
  return shares;
}

}  // namespace smcgw::smc
