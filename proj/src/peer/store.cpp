#include "smcgw/peer/store.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace smcgw::peer {

ReadingStore::ReadingStore(std::string jsonl_path) : path_(std::move(jsonl_path)) { load(); }

void ReadingStore::load() {
  by_input_.clear();
  loaded_bytes_ = 0;
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    loaded_bytes_ += static_cast<std::int64_t>(line.size()) + 1;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    Reading r{j.at("input").get<std::string>(),
              FixedValue::from_millis(j.at("value_millis").get<std::int64_t>()),
              j.at("timestamp").get<std::int64_t>()};
    by_input_[r.input].push_back(r);
  }
}

void ReadingStore::refresh() {
  if (path_.empty()) return;
  std::error_code ec;
  auto size = std::filesystem::file_size(path_, ec);
  if (ec) return;
  if (static_cast<std::int64_t>(size) != loaded_bytes_) load();
}

void ReadingStore::append(const Reading& reading) {
  auto& stream = by_input_[reading.input];
  if (!stream.empty() && reading.timestamp <= stream.back().timestamp) {
    throw std::invalid_argument("timestamps must be strictly increasing per input stream");
  }
  stream.push_back(reading);
  // Retention: drop anything older than 30 days relative to the newest
  // reading of this stream.
  std::int64_t cutoff = reading.timestamp - kRetentionSeconds;
  while (!stream.empty() && stream.front().timestamp < cutoff) stream.erase(stream.begin());

  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    nlohmann::json j{{"input", reading.input},
                     {"timestamp", reading.timestamp},
                     {"value_millis", reading.value.millis()}};
    std::string line = j.dump();
    out << line << "\n";
    loaded_bytes_ += static_cast<std::int64_t>(line.size()) + 1;
  }
}

std::vector<Reading> ReadingStore::preselect(const std::string& input, Preselector preselector,
                                             std::int64_t now) const {
  auto it = by_input_.find(input);
  if (it == by_input_.end() || it->second.empty()) throw EmptyWindowError(input);
  const auto& stream = it->second;

  if (preselector == Preselector::LastValue) {
    return {stream.back()};
  }
  std::int64_t window = preselector_window_s(preselector);
  std::vector<Reading> out;
  for (const Reading& r : stream) {
    if (r.timestamp > now - window && r.timestamp <= now) out.push_back(r);
  }
  if (out.empty()) throw EmptyWindowError(input);
  return out;  // stream is kept in increasing timestamp order
}

std::size_t ReadingStore::size(const std::string& input) const {
  auto it = by_input_.find(input);
  return it == by_input_.end() ? 0 : it->second.size();
}

std::vector<std::string> ReadingStore::inputs() const {
  std::vector<std::string> out;
  for (const auto& [input, _] : by_input_) out.push_back(input);
  return out;
}

FixedValue preprocess(const std::vector<Reading>& series, Preprocessor fn) {
  if (series.empty()) throw std::invalid_argument("preprocess requires a non-empty series");
  switch (fn) {
    case Preprocessor::Min: {
      auto it = std::min_element(series.begin(), series.end(),
                                 [](const Reading& a, const Reading& b) { return a.value < b.value; });
      return it->value;
    }
    case Preprocessor::Max: {
      auto it = std::max_element(series.begin(), series.end(),
                                 [](const Reading& a, const Reading& b) { return a.value < b.value; });
      return it->value;
    }
    case Preprocessor::Sum:
    case Preprocessor::Average: {
      std::int64_t sum = 0;
      for (const Reading& r : series) {
        if (__builtin_add_overflow(sum, r.value.millis(), &sum)) {
          throw std::overflow_error("preprocessor sum overflow");
        }
      }
      if (fn == Preprocessor::Sum) return FixedValue::from_millis(sum);
      return FixedValue::from_millis(div_round_half_even(sum, static_cast<std::int64_t>(series.size())));
    }
  }
  throw std::invalid_argument("bad preprocessor");
}

}  // namespace smcgw::peer
