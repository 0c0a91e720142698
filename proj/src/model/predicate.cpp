#include "smcgw/model/predicate.hpp"

#include <algorithm>
#include <cctype>

namespace smcgw {

namespace {

constexpr const char* kAnd = "∧";  // ∧
constexpr const char* kIn = "∈";   // ∈

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Byte scanner; only the two operators need multi-byte awareness.
struct Scanner {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && is_space(text[pos])) ++pos;
  }
  bool done() const { return pos >= text.size(); }
  bool lookahead(const char* seq) const {
    std::size_t n = std::char_traits<char>::length(seq);
    return text.compare(pos, n, seq) == 0;
  }
  bool consume(const char* seq) {
    if (!lookahead(seq)) return false;
    pos += std::char_traits<char>::length(seq);
    return true;
  }
  std::string word() {
    std::size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (is_space(c) || c == '=' || c == '[' || c == ']' || c == ',') break;
      if (lookahead(kAnd) || lookahead(kIn)) break;
      ++pos;
    }
    return text.substr(start, pos - start);
  }
};

void validate_token(const std::string& token, const char* what, std::size_t pos) {
  if (token.empty()) throw PredicateSyntaxError(pos, std::string("expected ") + what);
  for (char c : token) {
    if (is_space(c) || c == '=' || c == '[' || c == ']' || c == ',') {
      throw PredicateSyntaxError(pos, std::string(what) + " contains reserved character");
    }
  }
  if (token.find(kAnd) != std::string::npos || token.find(kIn) != std::string::npos) {
    throw PredicateSyntaxError(pos, std::string(what) + " contains reserved character");
  }
}

Atom parse_atom(Scanner& s) {
  s.skip_ws();
  std::size_t key_pos = s.pos;
  std::string key = s.word();
  validate_token(key, "label key", key_pos);
  s.skip_ws();

  Atom atom;
  atom.key = key;
  if (s.consume("=")) {
    atom.op = Atom::Op::Eq;
    s.skip_ws();
    std::size_t value_pos = s.pos;
    std::string value = s.word();
    validate_token(value, "value", value_pos);
    atom.values.push_back(value);
    return atom;
  }
  bool membership = s.consume(kIn);
  if (!membership) {
    std::size_t op_pos = s.pos;
    std::string w = s.word();
    if (w == "in") {
      membership = true;
    } else {
      throw PredicateSyntaxError(op_pos, "expected '=' or '∈'");
    }
  }
  if (membership) {
    atom.op = Atom::Op::In;
    s.skip_ws();
    if (!s.consume("[")) throw PredicateSyntaxError(s.pos, "expected '[' after membership operator");
    s.skip_ws();
    if (s.consume("]")) throw PredicateSyntaxError(s.pos, "membership list must not be empty");
    while (true) {
      s.skip_ws();
      std::size_t value_pos = s.pos;
      std::string value = s.word();
      validate_token(value, "value", value_pos);
      atom.values.push_back(value);
      s.skip_ws();
      if (s.consume(",")) continue;
      if (s.consume("]")) break;
      throw PredicateSyntaxError(s.pos, "expected ',' or ']' in membership list");
    }
    std::sort(atom.values.begin(), atom.values.end());
    atom.values.erase(std::unique(atom.values.begin(), atom.values.end()), atom.values.end());
  }
  return atom;
}

std::string op_symbol(Atom::Op op) { return op == Atom::Op::Eq ? "=" : kIn; }

bool atom_less(const Atom& a, const Atom& b) {
  if (a.key != b.key) return a.key < b.key;
  if (a.op != b.op) return op_symbol(a.op) < op_symbol(b.op);
  return a.values < b.values;
}

}  // namespace

Predicate::Predicate(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end(), atom_less);
}

Predicate Predicate::parse(const std::string& text) {
  Scanner s{text};
  s.skip_ws();
  if (s.done()) throw PredicateSyntaxError(0, "empty predicate");
  std::vector<Atom> atoms;
  while (true) {
    atoms.push_back(parse_atom(s));
    s.skip_ws();
    if (s.done()) break;
    if (!(s.consume(kAnd) || s.consume("&&"))) {
      std::size_t op_pos = s.pos;
      std::string w = s.word();
      if (w != "and" && w != "AND") {
        throw PredicateSyntaxError(op_pos, "expected conjunction between atoms");
      }
    }
    s.skip_ws();
    if (s.done()) throw PredicateSyntaxError(s.pos, "trailing conjunction");
  }
  return Predicate(std::move(atoms));
}

Predicate Predicate::equals(std::string key, std::string value) {
  Atom atom;
  atom.op = Atom::Op::Eq;
  atom.key = std::move(key);
  atom.values.push_back(std::move(value));
  return Predicate(std::vector<Atom>{std::move(atom)});
}

std::string Predicate::canonical() const {
  std::string out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i > 0) out += std::string(" ") + kAnd + " ";
    const Atom& atom = atoms_[i];
    if (atom.op == Atom::Op::Eq) {
      out += atom.key + " = " + atom.values.front();
    } else {
      out += atom.key + " " + kIn + " [";
      for (std::size_t j = 0; j < atom.values.size(); ++j) {
        if (j > 0) out += ", ";
        out += atom.values[j];
      }
      out += "]";
    }
  }
  return out;
}

bool Predicate::matches(const LabelSet& labels) const {
  for (const Atom& atom : atoms_) {
    bool holds = std::any_of(atom.values.begin(), atom.values.end(), [&](const std::string& v) {
      return labels.count(Label{atom.key, v}) > 0;
    });
    if (!holds) return false;
  }
  return true;
}

}  // namespace smcgw
