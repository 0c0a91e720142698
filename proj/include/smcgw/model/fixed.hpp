#pragma once

// Fixed-point numeric values with three decimal places. Sensor readings,
// preprocessed contributions and computation results are all exact counts
// of milli-units (int64), rendered as "12.345". Division (for averages)
// rounds half to even.

#include <cstdint>
#include <string>

namespace smcgw {

class FixedValue {
 public:
  FixedValue() = default;
  static FixedValue from_millis(std::int64_t millis) { return FixedValue(millis); }

  // Parses a decimal string ("4", "-1.5", "2.0005"); digits beyond the third
  // decimal place are rounded half to even. Throws std::invalid_argument.
  static FixedValue parse(const std::string& text);

  std::int64_t millis() const { return millis_; }
  std::string str() const;  // always three decimals, e.g. "4.000"

  bool operator==(const FixedValue&) const = default;
  auto operator<=>(const FixedValue&) const = default;

 private:
  explicit FixedValue(std::int64_t millis) : millis_(millis) {}
  std::int64_t millis_ = 0;
};

// Rounds numerator/denominator half to even. denominator > 0.
std::int64_t div_round_half_even(std::int64_t numerator, std::int64_t denominator);

}  // namespace smcgw
