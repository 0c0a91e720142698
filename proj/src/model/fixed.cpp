#include "smcgw/model/fixed.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace smcgw {

std::int64_t div_round_half_even(std::int64_t numerator, std::int64_t denominator) {
  if (denominator <= 0) throw std::invalid_argument("denominator must be positive");
  std::int64_t q = numerator / denominator;
  std::int64_t r = numerator % denominator;
  if (r == 0) return q;
  // Make the remainder positive so the ties-to-even rule reads the same for
  // negative numerators (floor division view).
  if (r < 0) {
    q -= 1;
    r += denominator;
  }
  std::int64_t twice = 2 * r;
  if (twice > denominator) return q + 1;
  if (twice < denominator) return q;
  return (q % 2 == 0) ? q : q + 1;  // exact tie
}

FixedValue FixedValue::parse(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::size_t digits_start = i;
  std::int64_t int_part = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    int_part = int_part * 10 + (text[i] - '0');
    if (int_part > (INT64_MAX / 2000)) throw std::invalid_argument("value out of range");
    ++i;
  }
  bool have_int = i > digits_start;
  std::int64_t frac_millis = 0;
  bool have_frac = false;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::size_t frac_start = i;
    int place = 0;
    std::int64_t extra_digit = -1;  // first digit past the third place
    bool extra_nonzero = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      int d = text[i] - '0';
      if (place < 3) {
        frac_millis = frac_millis * 10 + d;
        ++place;
      } else if (extra_digit < 0) {
        extra_digit = d;
      } else if (d != 0) {
        extra_nonzero = true;
      }
      ++i;
    }
    if (i == frac_start) throw std::invalid_argument("missing digits after decimal point");
    while (place < 3) {
      frac_millis *= 10;
      ++place;
    }
    // Round half to even on anything past the third decimal.
    if (extra_digit > 5 || (extra_digit == 5 && extra_nonzero)) {
      frac_millis += 1;
    } else if (extra_digit == 5 && !extra_nonzero) {
      if (frac_millis % 2 != 0) frac_millis += 1;
    }
    have_frac = true;
  }
  if (i != text.size() || (!have_int && !have_frac)) {
    throw std::invalid_argument("malformed decimal value: '" + text + "'");
  }
  std::int64_t millis = int_part * 1000 + frac_millis;
  return FixedValue(negative ? -millis : millis);
}

std::string FixedValue::str() const {
  std::int64_t v = millis_;
  bool negative = v < 0;
  std::uint64_t mag = negative ? (0ULL - static_cast<std::uint64_t>(v)) : static_cast<std::uint64_t>(v);
  std::string out = std::to_string(mag / 1000) + ".";
  std::uint64_t frac = mag % 1000;
  out += static_cast<char>('0' + frac / 100);
  out += static_cast<char>('0' + (frac / 10) % 10);
  out += static_cast<char>('0' + frac % 10);
  return negative ? "-" + out : out;
}

}  // namespace smcgw
