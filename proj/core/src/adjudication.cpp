#include "committee/adjudication.hpp"

#include <map>

#include <fmt/format.h>

namespace committee {

namespace {

Answer consensus_key(const Answer& answer) {
  if (const auto* text = std::get_if<std::string>(&answer)) return normalize_answer_text(*text);
  return answer;
}

std::map<Answer, int> tally(std::span<const ProponentResponse> candidates) {
  if (candidates.empty()) throw DomainError("consensus needs at least one candidate");
  std::map<Answer, int> counts;
  for (const auto& candidate : candidates) {
    if (!candidate.is_valid()) {
      throw DomainError("candidate from " + candidate.proponent_id + " is not valid");
    }
    ++counts[consensus_key(candidate.answer)];
  }
  return counts;
}

std::string describe(const Answer& answer) {
  if (const auto* id = std::get_if<OptionId>(&answer)) return fmt::format("option {}", id->value);
  return fmt::format("\"{}\"", std::get<std::string>(answer));
}

}  // namespace

ConsensusSummary summarize_consensus(std::span<const ProponentResponse> candidates) {
  const auto counts = tally(candidates);
  ConsensusSummary summary;
  summary.total_valid = static_cast<int>(candidates.size());

  int ties = 0;
  for (const auto& [answer, count] : counts) {
    if (count > summary.leading_count) {
      summary.leading_count = count;
      summary.leading_answer = answer;
      ties = 1;
    } else if (count == summary.leading_count) {
      ++ties;
    }
  }

  if (summary.leading_count == summary.total_valid) {
    summary.kind = ConsensusKind::Unanimous;
  } else if (ties > 1) {
    summary.kind = ConsensusKind::Split;
    summary.leading_answer.reset();
  } else if (2 * summary.leading_count > summary.total_valid) {
    summary.kind = ConsensusKind::Majority;
  } else {
    summary.kind = ConsensusKind::Plurality;
  }
  return summary;
}

Answer majority_fallback(std::span<const ProponentResponse> candidates) {
  const auto counts = tally(candidates);
  // std::map iterates keys ascending, so the first maximal entry has the lowest id.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

bool needs_human_review(const std::optional<ConfidenceLevel>& level, bool strict_review) {
  if (!level) return false;
  return *level == ConfidenceLevel::Low || (strict_review && *level == ConfidenceLevel::Medium);
}

AdjudicationOutcome adjudicate(const Query& query, std::span<const ProponentResponse> candidates,
                               const ModelClient& adjudicator, const PromptTemplate& tmpl,
                               const QualityPolicy& policy, const AdjudicationOptions& options,
                               const GateContext& context) {
  AdjudicationOutcome outcome;
  outcome.query_id = query.id();
  outcome.consensus = summarize_consensus(candidates);
  outcome.contributing.assign(candidates.begin(), candidates.end());

  if (options.fast_path_unanimous && outcome.consensus.kind == ConsensusKind::Unanimous) {
    outcome.final_answer = *outcome.consensus.leading_answer;
    outcome.rationale =
        fmt::format("All {} proponents selected {}; the unanimous answer was accepted without "
                    "adjudication.",
                    outcome.consensus.total_valid, describe(outcome.final_answer));
    return outcome;
  }

  GateContext gate_context = context;
  gate_context.render.confidence_enabled = options.confidence_enabled;
  auto messages = render_adjudicator_prompt(tmpl, query, candidates, gate_context.render);
  const auto verdict =
      run_gate_on_messages(adjudicator, query, std::move(messages), tmpl, policy, gate_context);
  if (!verdict.is_valid()) throw AdjudicationError(outcome.consensus, verdict.diagnostic);

  outcome.final_answer = verdict.answer;
  outcome.rationale = verdict.reason;
  if (options.confidence_enabled) {
    outcome.adjudicator_confidence = verdict.confidence_level;
    outcome.needs_human_review =
        needs_human_review(outcome.adjudicator_confidence, options.strict_review);
  }
  return outcome;
}

}  // namespace committee
