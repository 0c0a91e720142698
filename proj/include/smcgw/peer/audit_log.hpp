#pragma once

// Append-only accountability log (JSONL). Every accepted session leaves one
// entry: the computation request, the gateway's signature over it, and the
// signed result. Entries re-verify at any later time against the pinned
// gateway certificate and the configured trust anchors; any byte flipped in
// a persisted entry shows up as a verification failure.

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "smcgw/model/messages.hpp"

namespace smcgw::peer {

struct EntryStatus {
  std::int64_t seq = 0;
  bool ok = false;
  std::string error;
};

class AccountabilityLog {
 public:
  AccountabilityLog() = default;  // in-memory only
  explicit AccountabilityLog(std::string jsonl_path);

  // Assigns the next sequence number and appends. Storage failures are
  // reported through ok() going false, never as exceptions: the session
  // outcome wins over logging.
  void append(AccountabilityEntry entry);

  std::vector<AccountabilityEntry> entries() const;
  std::size_t size() const;
  bool healthy() const { return healthy_; }

  // Re-verifies every persisted line, including unparseable ones.
  static std::vector<EntryStatus> verify_file(const std::string& jsonl_path,
                                              const Certificate& gateway_cert,
                                              const std::vector<Certificate>& trust_anchors,
                                              std::int64_t now);
  static EntryStatus verify_entry(const AccountabilityEntry& entry, const Certificate& gateway_cert,
                                  const std::vector<Certificate>& trust_anchors, std::int64_t now);

 private:
  mutable std::mutex mutex_;
  std::string path_;
  std::vector<AccountabilityEntry> entries_;
  bool healthy_ = true;
};

}  // namespace smcgw::peer
