#pragma once

// Group-selection predicates: a conjunction of label conditions, either
// equality (`roomtype = kitchen`) or membership (`roomtype ∈ [kitchen,
// meetingroom]`). A predicate has a unique canonical string form -- atoms
// sorted by (key, operator, values), membership lists sorted and
// de-duplicated, atoms joined with " ∧ " -- and two predicates are equal iff
// their canonical forms are byte-identical.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "smcgw/model/label.hpp"

namespace smcgw {

struct Atom {
  enum class Op { Eq, In };
  Op op = Op::Eq;
  std::string key;
  std::vector<std::string> values;  // one entry for Eq, sorted unique list for In

  bool operator==(const Atom&) const = default;
};

class PredicateSyntaxError : public std::runtime_error {
 public:
  PredicateSyntaxError(std::size_t position, const std::string& message)
      : std::runtime_error("predicate syntax error at byte " + std::to_string(position) + ": " + message),
        position(position),
        message(message) {}
  std::size_t position;
  std::string message;
};

class Predicate {
 public:
  Predicate() = default;

  // Accepts "∧"/"and"/"&&" as conjunction and "∈"/"in" as membership.
  static Predicate parse(const std::string& text);  // throws PredicateSyntaxError
  static Predicate equals(std::string key, std::string value);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::string canonical() const;
  bool matches(const LabelSet& labels) const;

  bool operator==(const Predicate& other) const { return canonical() == other.canonical(); }

 private:
  explicit Predicate(std::vector<Atom> atoms);
  std::vector<Atom> atoms_;  // held in canonical order
};

}  // namespace smcgw
