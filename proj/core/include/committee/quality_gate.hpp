// The automatic check every response passes before it reaches the
// adjudicator, and the bounded redraft loop around it.

#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "committee/domain.hpp"
#include "committee/model_client.hpp"
#include "committee/prompts.hpp"
#include "committee/structured_response.hpp"

namespace committee {

struct QualityPolicy {
  int max_redrafts = 2;
  int min_reason_chars = 10;
  int max_reason_chars = 2000;
  bool require_confidence = false;

  /// Throws ConfigError unless max_redrafts >= 0 and min < max.
  void validate() const;
  int max_attempts() const { return max_redrafts + 1; }
};

/// A parsed completion, or the reason parsing failed.
struct Draft {
  std::optional<StructuredReply> reply;
  std::string parse_error;

  static Draft parse(std::string_view raw, const Query& query);
};

struct Verdict {
  Validation validation = Validation::Valid;
  std::string diagnostic;

  bool ok() const { return validation == Validation::Valid; }
};

/// Format (unparsable, illegal answer, confidence outside [0, 100]), then a
/// blank reason (completeness), then reason length, then a missing required
/// confidence (completeness). First failure wins.
Verdict validate(const Draft& draft, const Query& query, const QualityPolicy& policy);

struct AttemptRecord {
  std::string query_id;
  std::string endpoint;
  int attempt = 1;
  std::string verdict;  // a Validation token, or "transport_error" / "deadline"
  std::string diagnostic;
};

/// Sink for per-attempt log lines. Implementations must accept concurrent appends.
class AttemptLog {
 public:
  virtual ~AttemptLog() = default;
  virtual void append(const AttemptRecord& record) = 0;
};

/// One JSON object per line: {query_id, endpoint, attempt, verdict, diagnostic}.
class JsonLinesAttemptLog : public AttemptLog {
 public:
  explicit JsonLinesAttemptLog(std::ostream& out) : out_(out) {}
  void append(const AttemptRecord& record) override;

 private:
  std::mutex mutex_;
  std::ostream& out_;
};

class MemoryAttemptLog : public AttemptLog {
 public:
  void append(const AttemptRecord& record) override;
  std::vector<AttemptRecord> records() const;

 private:
  mutable std::mutex mutex_;
  std::vector<AttemptRecord> records_;
};

struct GateContext {
  ConfidenceThresholds thresholds;
  RenderOptions render;
  AttemptLog* log = nullptr;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Runs complete -> parse -> validate on prepared messages for up to
/// policy.max_attempts() attempts. Each redraft resends the conversation with
/// the rejected draft and a message carrying its diagnostic. Returns the
/// first Valid response or a Failed one; transport errors and an expired
/// deadline end the loop with Failed.
ProponentResponse run_gate_on_messages(const ModelClient& client, const Query& query,
                                       std::vector<ChatMessage> messages,
                                       const PromptTemplate& tmpl, const QualityPolicy& policy,
                                       const GateContext& context);

/// Renders the proponent prompt for query and runs the gate loop.
ProponentResponse run_gate(const ModelClient& client, const Query& query,
                           const PromptTemplate& tmpl, const QualityPolicy& policy,
                           const GateContext& context = {});

}  // namespace committee
