#pragma once

// Per-peer reading store: append-only per input stream, strictly increasing
// timestamps, 30-day retention. Optionally persisted as JSONL so the ingest
// CLI and a running daemon see the same data.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smcgw/model/fixed.hpp"
#include "smcgw/model/query.hpp"

namespace smcgw::peer {

struct Reading {
  std::string input;
  FixedValue value;
  std::int64_t timestamp = 0;
};

class EmptyWindowError : public std::runtime_error {
 public:
  explicit EmptyWindowError(const std::string& input)
      : std::runtime_error("no readings for input '" + input + "' in the requested window") {}
};

class ReadingStore {
 public:
  ReadingStore() = default;
  explicit ReadingStore(std::string jsonl_path);  // loads existing readings

  static constexpr std::int64_t kRetentionSeconds = 30 * 86400;

  // Throws std::invalid_argument when the timestamp does not advance the
  // input's stream.
  void append(const Reading& reading);

  // LastValue -> newest reading; windowed preselectors -> readings with
  // timestamp in (now - W, now], oldest first. Throws EmptyWindowError.
  std::vector<Reading> preselect(const std::string& input, Preselector preselector,
                                 std::int64_t now) const;

  std::size_t size(const std::string& input) const;
  std::vector<std::string> inputs() const;

  // Re-reads the backing file when another process appended to it.
  void refresh();

 private:
  void load();
  std::string path_;
  std::int64_t loaded_bytes_ = 0;
  std::map<std::string, std::vector<Reading>> by_input_;
};

// Aggregates a non-empty series; Average applies the fixed-point
// round-half-to-even rule.
FixedValue preprocess(const std::vector<Reading>& series, Preprocessor fn);

}  // namespace smcgw::peer
