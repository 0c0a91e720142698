#include "smcgw/peer/audit_log.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/smc/result.hpp"

namespace smcgw::peer {

AccountabilityLog::AccountabilityLog(std::string jsonl_path) : path_(std::move(jsonl_path)) {
  if (!std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      entries_.push_back(nlohmann::json::parse(line).get<AccountabilityEntry>());
    } catch (const std::exception& e) {
      // Corrupt lines stay in the file for verify_file to flag; counting
      // resumes after the highest parseable seq.
      std::cerr << "accountability log: skipping corrupt line: " << e.what() << "\n";
    }
  }
}

void AccountabilityLog::append(AccountabilityEntry entry) {
  std::lock_guard lock(mutex_);
  entry.seq = entries_.empty() ? 0 : entries_.back().seq + 1;
  entries_.push_back(entry);
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) {
    healthy_ = false;
    std::cerr << "accountability log: cannot append to " << path_ << "\n";
    return;
  }
  out << nlohmann::json(entry).dump() << "\n";
  out.flush();
  if (!out) healthy_ = false;
}

std::vector<AccountabilityEntry> AccountabilityLog::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t AccountabilityLog::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

EntryStatus AccountabilityLog::verify_entry(const AccountabilityEntry& entry,
                                            const Certificate& gateway_cert,
                                            const std::vector<Certificate>& trust_anchors,
                                            std::int64_t now) {
  EntryStatus status{entry.seq, false, ""};
  if (!crypto::verify(entry.sig_gateway, gateway_cert, request_accountability_bytes(entry.request))) {
    status.error = "gateway signature does not verify over the stored request";
    return status;
  }
  if (entry.value || entry.sig_peer) {
    if (!entry.value || !entry.sig_peer || !entry.reporter_cert) {
      status.error = "incomplete result record";
      return status;
    }
    if (!crypto::verify_chain(*entry.reporter_cert, trust_anchors, now)) {
      status.error = "reporter certificate does not chain to a trust anchor";
      return status;
    }
    if (!smc::verify_result_record(entry.session_id, *entry.value, *entry.sig_peer,
                                   *entry.reporter_cert)) {
      status.error = "peer signature does not verify over the stored result";
      return status;
    }
  }
  status.ok = true;
  return status;
}

std::vector<EntryStatus> AccountabilityLog::verify_file(const std::string& jsonl_path,
                                                        const Certificate& gateway_cert,
                                                        const std::vector<Certificate>& trust_anchors,
                                                        std::int64_t now) {
  std::vector<EntryStatus> out;
  std::ifstream in(jsonl_path);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    AccountabilityEntry entry;
    try {
      entry = nlohmann::json::parse(line).get<AccountabilityEntry>();
    } catch (const std::exception& e) {
      out.push_back({line_no - 1, false, std::string("unparseable entry: ") + e.what()});
      continue;
    }
    out.push_back(verify_entry(entry, gateway_cert, trust_anchors, now));
  }
  return out;
}

}  // namespace smcgw::peer
