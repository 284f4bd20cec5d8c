#include "committee/quality_gate.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "committee/serialization.hpp"

namespace committee {

void QualityPolicy::validate() const {
  if (max_redrafts < 0) throw ConfigError("quality.max_redrafts must be >= 0");
  if (min_reason_chars < 0) throw ConfigError("quality.min_reason_chars must be >= 0");
  if (!(min_reason_chars < max_reason_chars)) {
    throw ConfigError("quality: min_reason_chars < max_reason_chars violated");
  }
}

Draft Draft::parse(std::string_view raw, const Query& query) {
  Draft draft;
  try {
    draft.reply = parse_structured_response(raw, query);
  } catch (const ParseError& e) {
    draft.parse_error = e.what();
  }
  return draft;
}

Verdict validate(const Draft& draft, const Query& query, const QualityPolicy& policy) {
  if (!draft.reply) return {Validation::RejectedFormat, draft.parse_error};
  const auto& reply = *draft.reply;

  if (query.is_multiple_choice()) {
    const auto* id = std::get_if<OptionId>(&reply.answer);
    if (!id) return {Validation::RejectedFormat, "answer must be an option number"};
    if (!query.is_legal(*id)) {
      return {Validation::RejectedFormat,
              fmt::format("answer {} is not an option of this question (1-{})", id->value,
                          query.option_count())};
    }
  } else {
    const auto* text = std::get_if<std::string>(&reply.answer);
    if (!text || is_blank(*text)) return {Validation::RejectedFormat, "answer is empty"};
  }
  if (reply.confidence_score &&
      !(*reply.confidence_score >= 0.0 && *reply.confidence_score <= 100.0)) {
    return {Validation::RejectedFormat,
            fmt::format("confidence {} is outside [0, 100]", *reply.confidence_score)};
  }

  if (is_blank(reply.reason)) return {Validation::RejectedCompleteness, "reason is empty"};
  const auto length = utf8_length(reply.reason);
  if (length < static_cast<std::size_t>(policy.min_reason_chars)) {
    return {Validation::RejectedLength,
            fmt::format("reason too short: {} < {} chars", length, policy.min_reason_chars)};
  }
  if (length > static_cast<std::size_t>(policy.max_reason_chars)) {
    return {Validation::RejectedLength,
            fmt::format("reason too long: {} > {} chars", length, policy.max_reason_chars)};
  }

  if (policy.require_confidence && !reply.confidence_score && !reply.confidence_level) {
    return {Validation::RejectedCompleteness, "confidence is missing"};
  }
  return {};
}

void JsonLinesAttemptLog::append(const AttemptRecord& record) {
  Json line;
  line["query_id"] = record.query_id;
  line["endpoint"] = record.endpoint;
  line["attempt"] = record.attempt;
  line["verdict"] = record.verdict;
  line["diagnostic"] = record.diagnostic;
  const std::string text = line.dump();
  std::lock_guard lock(mutex_);
  out_ << text << '\n';
}

void MemoryAttemptLog::append(const AttemptRecord& record) {
  std::lock_guard lock(mutex_);
  records_.push_back(record);
}

std::vector<AttemptRecord> MemoryAttemptLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

ProponentResponse run_gate_on_messages(const ModelClient& client, const Query& query,
                                       std::vector<ChatMessage> messages,
                                       const PromptTemplate& tmpl, const QualityPolicy& policy,
                                       const GateContext& context) {
  ProponentResponse response;
  response.proponent_id = client.name();
  response.validation = Validation::Failed;

  auto log = [&](int attempt, std::string_view verdict, const std::string& diagnostic) {
    if (context.log) {
      context.log->append({query.id(), client.name(), attempt, std::string(verdict), diagnostic});
    }
  };

  for (int attempt = 1; attempt <= policy.max_attempts(); ++attempt) {
    if (context.deadline && std::chrono::steady_clock::now() >= *context.deadline) {
      response.attempt = std::max(attempt - 1, 1);
      response.diagnostic = "deadline exceeded";
      log(attempt, "deadline", response.diagnostic);
      return response;
    }

    std::string raw;
    try {
      raw = client.complete(messages, {&query, attempt});
    } catch (const TransportError& e) {
      response.attempt = attempt;
      response.diagnostic = e.what();
      log(attempt, "transport_error", response.diagnostic);
      return response;
    }

    const Draft draft = Draft::parse(raw, query);
    const Verdict verdict = validate(draft, query, policy);
    log(attempt, to_string(verdict.validation), verdict.diagnostic);
    response.attempt = attempt;

    if (verdict.ok()) {
      const auto& reply = *draft.reply;
      response.answer = reply.answer;
      response.reason = reply.reason;
      response.confidence_score = reply.confidence_score;
      response.confidence_level =
          reply.confidence_score ? classify_confidence(*reply.confidence_score, context.thresholds)
                                 : reply.confidence_level;
      response.validation = Validation::Valid;
      response.diagnostic.clear();
      return response;
    }

    response.diagnostic = verdict.diagnostic;
    messages.push_back({"assistant", std::move(raw)});
    messages.push_back(render_redraft_message(tmpl, verdict.diagnostic));
  }
  return response;
}

ProponentResponse run_gate(const ModelClient& client, const Query& query,
                           const PromptTemplate& tmpl, const QualityPolicy& policy,
                           const GateContext& context) {
  auto messages = render_proponent_prompt(tmpl, query, context.render);
  return run_gate_on_messages(client, query, std::move(messages), tmpl, policy, context);
}

}  // namespace committee
