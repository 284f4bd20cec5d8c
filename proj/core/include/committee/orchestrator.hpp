// The end-to-end pipeline: fan a query out to the committee, gate every
// response, adjudicate, and assemble the outcome.
//
// Concurrency: proponent calls for one query run on at most
// execution.width() worker threads; answer_batch runs at most
// batch_parallelism queries at once, so up to their product completions can
// be in flight. Gate results for a query are joined before adjudication
// starts, and each outcome is assembled by the thread that owns the query.

#pragma once

#include <chrono>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "committee/adjudication.hpp"
#include "committee/config.hpp"
#include "committee/serialization.hpp"

namespace committee {

/// Fewer valid proponents than min_valid_candidates.
class InsufficientCommitteeError : public Error {
 public:
  InsufficientCommitteeError(const std::string& message, std::vector<ProponentResponse> responses)
      : Error(message), responses_(std::move(responses)) {}

  const std::vector<ProponentResponse>& responses() const { return responses_; }

 private:
  std::vector<ProponentResponse> responses_;
};

/// The per-query deadline passed; carries whatever responses had finished.
class DeadlineError : public Error {
 public:
  DeadlineError(const std::string& message, std::vector<ProponentResponse> partial)
      : Error(message), partial_(std::move(partial)) {}

  const std::vector<ProponentResponse>& partial() const { return partial_; }

 private:
  std::vector<ProponentResponse> partial_;
};

struct QueryFailure {
  std::string kind;  // insufficient_committee, deadline, adjudication, error
  std::string message;
  std::vector<ProponentResponse> responses;

  friend bool operator==(const QueryFailure&, const QueryFailure&) = default;
};

struct QueryResult {
  std::string query_id;
  std::variant<AdjudicationOutcome, QueryFailure> result;

  const AdjudicationOutcome* outcome() const { return std::get_if<AdjudicationOutcome>(&result); }
  const QueryFailure* failure() const { return std::get_if<QueryFailure>(&result); }

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

class Committee {
 public:
  /// Validates config and opens a client per endpoint. When recorder is set,
  /// every completion is captured into it.
  explicit Committee(CommitteeConfig config,
                     std::shared_ptr<CompletionRecorder> recorder = nullptr,
                     std::shared_ptr<AttemptLog> log = nullptr);

  /// Throws InsufficientCommitteeError, DeadlineError or AdjudicationError
  /// (the latter only when majority fallback is disabled).
  AdjudicationOutcome answer_query(const Query& query) const;

  /// Output order matches input order; failures are values.
  std::vector<QueryResult> answer_batch(std::span<const Query> queries,
                                        int batch_parallelism) const;

  const CommitteeConfig& config() const { return config_; }
  const ModelClient& proponent(std::size_t index) const { return *proponents_.at(index); }
  const ModelClient& adjudicator() const { return *adjudicator_; }

  /// Sum of completion calls issued to every endpoint so far.
  std::uint64_t total_calls() const;

 private:
  std::vector<ProponentResponse> gather(const Query& query,
                                        std::chrono::steady_clock::time_point deadline) const;

  CommitteeConfig config_;
  std::vector<std::shared_ptr<ModelClient>> proponents_;
  std::shared_ptr<ModelClient> adjudicator_;
  std::shared_ptr<AttemptLog> log_;
};

AdjudicationOutcome answer_query(const Query& query, const CommitteeConfig& config);
std::vector<QueryResult> answer_batch(std::span<const Query> queries,
                                      const CommitteeConfig& config, int batch_parallelism);

/// Outcome record for successes; {query_id, error: {kind, message},
/// contributing} for failures.
Json query_result_record(const QueryResult& result);

struct RunInfo {
  std::string run_id;
  std::string config_hash;
  std::string started;   // ISO-8601 UTC
  std::string finished;  // ISO-8601 UTC
};

/// {run_id, config_hash, started, finished, outcomes: [record...]}
Json run_manifest(const RunInfo& info, std::span<const QueryResult> results);

std::string utc_timestamp(std::chrono::system_clock::time_point when);

}  // namespace committee
