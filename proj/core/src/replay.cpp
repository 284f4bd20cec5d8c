#include "committee/replay.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "committee/errors.hpp"
#include "committee/serialization.hpp"

namespace committee {

ReplayFixture ReplayFixture::parse(std::string_view text) {
  ReplayFixture fixture;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto record = Json::parse(line);
      ReplayKey key{record.at("endpoint").get<std::string>(),
                    record.at("query_id").get<std::string>(), record.at("attempt").get<int>()};
      fixture.put(std::move(key), record.at("raw_text").get<std::string>());
    } catch (const Json::exception& e) {
      throw IngestError(fmt::format("replay fixture line {}: {}", line_no, e.what()));
    }
  }
  return fixture;
}

ReplayFixture ReplayFixture::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open replay fixture " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string ReplayFixture::serialize() const {
  std::string out;
  for (const auto& [key, raw] : records_) {
    Json record;
    record["endpoint"] = key.endpoint;
    record["query_id"] = key.query_id;
    record["attempt"] = key.attempt;
    record["raw_text"] = raw;
    out += record.dump();
    out += '\n';
  }
  return out;
}

void ReplayFixture::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write replay fixture " + path);
  out << serialize();
}

void ReplayFixture::put(ReplayKey key, std::string raw_text) {
  records_.insert_or_assign(std::move(key), std::move(raw_text));
}

std::optional<std::string> ReplayFixture::find(const ReplayKey& key) const {
  const auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void CompletionRecorder::record(ReplayKey key, std::string raw_text) {
  std::lock_guard lock(mutex_);
  fixture_.put(std::move(key), std::move(raw_text));
}

ReplayFixture CompletionRecorder::snapshot() const {
  std::lock_guard lock(mutex_);
  return fixture_;
}

}  // namespace committee
