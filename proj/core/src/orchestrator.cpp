#include "committee/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <ctime>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

namespace committee {

namespace {

// Shared between answer_query and its detached proponent workers, which may
// outlive the call when the deadline passes.
struct FanOut {
  std::mutex mutex;
  std::condition_variable done_cv;
  std::vector<std::optional<ProponentResponse>> results;
  std::atomic<std::size_t> next{0};
  std::size_t finished = 0;
};

std::vector<ProponentResponse> finished_only(const FanOut& state) {
  std::vector<ProponentResponse> partial;
  for (const auto& result : state.results) {
    if (result) partial.push_back(*result);
  }
  return partial;
}

std::string terminal_states(const std::vector<ProponentResponse>& responses) {
  std::string out;
  for (const auto& response : responses) {
    if (!out.empty()) out += ", ";
    out += fmt::format("{}={}", response.proponent_id, to_string(response.validation));
  }
  return out;
}

}  // namespace

Committee::Committee(CommitteeConfig config, std::shared_ptr<CompletionRecorder> recorder,
                     std::shared_ptr<AttemptLog> log)
    : config_(std::move(config)), log_(std::move(log)) {
  config_.validate();
  // Replay endpoints sharing a fixture file load it once.
  std::map<std::string, std::shared_ptr<const ReplayFixture>> fixtures;
  auto open = [&](ModelEndpoint endpoint) {
    if (auto* replay = std::get_if<ReplayEndpoint>(&endpoint.kind); replay && !replay->fixture) {
      auto& shared = fixtures[replay->fixture_path];
      if (!shared) {
        shared = std::make_shared<const ReplayFixture>(ReplayFixture::load(replay->fixture_path));
      }
      replay->fixture = shared;
    }
    return std::make_shared<ModelClient>(std::move(endpoint), recorder);
  };
  for (const auto& endpoint : config_.proponents) proponents_.push_back(open(endpoint));
  adjudicator_ = open(config_.adjudicator);
}

std::uint64_t Committee::total_calls() const {
  std::uint64_t total = adjudicator_->call_count();
  for (const auto& client : proponents_) total += client->call_count();
  return total;
}

std::vector<ProponentResponse> Committee::gather(
    const Query& query, std::chrono::steady_clock::time_point deadline) const {
  const std::size_t n = proponents_.size();
  auto state = std::make_shared<FanOut>();
  state->results.resize(n);

  GateContext context;
  context.thresholds = config_.thresholds;
  context.render.confidence_enabled = config_.features.confidence_enabled;
  context.log = log_.get();
  context.deadline = deadline;

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config_.execution.width()), n);
  for (std::size_t w = 0; w < workers; ++w) {
    std::thread([state, query, context, log = log_, clients = proponents_,
                 tmpl = config_.templates.proponent, policy = config_.quality] {
      for (std::size_t i = state->next.fetch_add(1); i < state->results.size();
           i = state->next.fetch_add(1)) {
        ProponentResponse response;
        try {
          response = run_gate(*clients[i], query, tmpl, policy, context);
        } catch (const std::exception& e) {
          response.proponent_id = clients[i]->name();
          response.validation = Validation::Failed;
          response.diagnostic = e.what();
        }
        std::lock_guard lock(state->mutex);
        state->results[i] = std::move(response);
        if (++state->finished == state->results.size()) state->done_cv.notify_all();
      }
    }).detach();
  }

  std::unique_lock lock(state->mutex);
  if (!state->done_cv.wait_until(lock, deadline, [&] { return state->finished == n; })) {
    throw DeadlineError(fmt::format("query {}: deadline of {} ms exceeded with {} of {} "
                                    "proponents finished",
                                    query.id(), config_.per_query_deadline.count(),
                                    state->finished, n),
                        finished_only(*state));
  }
  std::vector<ProponentResponse> responses;
  responses.reserve(n);
  for (auto& result : state->results) responses.push_back(std::move(*result));
  return responses;
}

AdjudicationOutcome Committee::answer_query(const Query& query) const {
  const auto deadline = std::chrono::steady_clock::now() + config_.per_query_deadline;
  auto responses = gather(query, deadline);

  std::vector<ProponentResponse> valid;
  std::copy_if(responses.begin(), responses.end(), std::back_inserter(valid),
               [](const ProponentResponse& r) { return r.is_valid(); });
  if (valid.size() < static_cast<std::size_t>(config_.min_valid_candidates)) {
    throw InsufficientCommitteeError(
        fmt::format("query {}: {} valid proponents, {} required ({})", query.id(), valid.size(),
                    config_.min_valid_candidates, terminal_states(responses)),
        std::move(responses));
  }

  GateContext context;
  context.thresholds = config_.thresholds;
  context.log = log_.get();
  context.deadline = deadline;
  const AdjudicationOptions options{config_.features.fast_path_unanimous,
                                    config_.features.confidence_enabled,
                                    config_.features.strict_review};

  AdjudicationOutcome outcome;
  try {
    outcome = adjudicate(query, valid, *adjudicator_, config_.templates.adjudicator,
                         config_.quality, options, context);
  } catch (const AdjudicationError& e) {
    if (std::chrono::steady_clock::now() >= deadline) {
      throw DeadlineError(fmt::format("query {}: deadline of {} ms exceeded during adjudication",
                                      query.id(), config_.per_query_deadline.count()),
                          std::move(responses));
    }
    if (!config_.features.fallback_majority) throw;
    outcome.query_id = query.id();
    outcome.consensus = e.summary();
    outcome.final_answer = majority_fallback(valid);
    outcome.rationale = fmt::format("{}; majority vote over {} valid proponents selected {}.",
                                    e.what(), valid.size(), to_string(outcome.final_answer));
    outcome.needs_human_review = true;
  }
  outcome.contributing = std::move(responses);
  return outcome;
}

std::vector<QueryResult> Committee::answer_batch(std::span<const Query> queries,
                                                 int batch_parallelism) const {
  if (batch_parallelism < 1) throw ConfigError("batch parallelism must be >= 1");
  std::vector<QueryResult> results(queries.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1)) {
      const Query& query = queries[i];
      QueryResult& slot = results[i];
      slot.query_id = query.id();
      try {
        slot.result = answer_query(query);
      } catch (const InsufficientCommitteeError& e) {
        slot.result = QueryFailure{"insufficient_committee", e.what(), e.responses()};
      } catch (const DeadlineError& e) {
        slot.result = QueryFailure{"deadline", e.what(), e.partial()};
      } catch (const AdjudicationError& e) {
        slot.result = QueryFailure{"adjudication", e.what(), {}};
      } catch (const std::exception& e) {
        slot.result = QueryFailure{"error", e.what(), {}};
      }
    }
  };

  const auto width = std::min<std::size_t>(static_cast<std::size_t>(batch_parallelism),
                                           std::max<std::size_t>(queries.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < width; ++w) pool.emplace_back(worker);
    worker();
  }
  return results;
}

AdjudicationOutcome answer_query(const Query& query, const CommitteeConfig& config) {
  return Committee(config).answer_query(query);
}

std::vector<QueryResult> answer_batch(std::span<const Query> queries,
                                      const CommitteeConfig& config, int batch_parallelism) {
  return Committee(config).answer_batch(queries, batch_parallelism);
}

Json query_result_record(const QueryResult& result) {
  if (const auto* outcome = result.outcome()) return outcome_record(*outcome);
  const auto& failure = *result.failure();
  Json out;
  out["query_id"] = result.query_id;
  Json error;
  error["kind"] = failure.kind;
  error["message"] = failure.message;
  out["error"] = std::move(error);
  Json contributing = Json::array();
  for (const auto& response : failure.responses) {
    Json entry;
    entry["proponent_id"] = response.proponent_id;
    entry["answer"] = response.is_valid() ? answer_to_json(response.answer) : Json(nullptr);
    entry["confidence_level"] = response.confidence_level
                                    ? Json(std::string(to_string(*response.confidence_level)))
                                    : Json(nullptr);
    entry["validation"] = std::string(to_string(response.validation));
    contributing.push_back(std::move(entry));
  }
  out["contributing"] = std::move(contributing);
  return out;
}

Json run_manifest(const RunInfo& info, std::span<const QueryResult> results) {
  Json out;
  out["run_id"] = info.run_id;
  out["config_hash"] = info.config_hash;
  out["started"] = info.started;
  out["finished"] = info.finished;
  Json outcomes = Json::array();
  for (const auto& result : results) outcomes.push_back(query_result_record(result));
  out["outcomes"] = std::move(outcomes);
  return out;
}

std::string utc_timestamp(std::chrono::system_clock::time_point when) {
  const std::time_t t = std::chrono::system_clock::to_time_t(when);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", tm.tm_year + 1900,
                     tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
}

}  // namespace committee
