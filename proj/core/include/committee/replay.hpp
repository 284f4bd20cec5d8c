// Recorded completions, one JSON record per line:
//   {"endpoint": name, "query_id": id, "attempt": n, "raw_text": text}

#pragma once

#include <compare>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace committee {

struct ReplayKey {
  std::string endpoint;
  std::string query_id;
  int attempt = 1;

  friend auto operator<=>(const ReplayKey&, const ReplayKey&) = default;
};

class ReplayFixture {
 public:
  ReplayFixture() = default;

  /// Throws IngestError on unreadable files or malformed lines.
  static ReplayFixture load(const std::string& path);
  static ReplayFixture parse(std::string_view text);

  /// Records sorted by key, one per line, newline-terminated.
  std::string serialize() const;
  void save(const std::string& path) const;

  void put(ReplayKey key, std::string raw_text);
  std::optional<std::string> find(const ReplayKey& key) const;
  std::size_t size() const { return records_.size(); }
  const std::map<ReplayKey, std::string>& records() const { return records_; }

 private:
  std::map<ReplayKey, std::string> records_;
};

/// Thread-safe sink capturing every completion returned to the pipeline.
class CompletionRecorder {
 public:
  void record(ReplayKey key, std::string raw_text);
  ReplayFixture snapshot() const;

 private:
  mutable std::mutex mutex_;
  ReplayFixture fixture_;
};

}  // namespace committee
