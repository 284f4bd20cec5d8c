// Consensus analysis over valid candidates and the adjudicator call that
// turns them into a final answer.

#pragma once

#include <span>
#include <string>

#include "committee/domain.hpp"
#include "committee/model_client.hpp"
#include "committee/prompts.hpp"
#include "committee/quality_gate.hpp"

namespace committee {

/// Counts identical answers (option ids, or normalized free text).
///   Unanimous: every candidate agrees.
///   Majority:  one answer holds more than half, not all.
///   Plurality: a unique most common answer holding at most half.
///   Split:     the top count is shared by two or more answers; no leader.
/// Permutation invariant. Throws DomainError on an empty or non-Valid input.
ConsensusSummary summarize_consensus(std::span<const ProponentResponse> candidates);

/// The most common answer, ties broken by the lowest option id.
Answer majority_fallback(std::span<const ProponentResponse> candidates);

struct AdjudicationOptions {
  bool fast_path_unanimous = false;
  bool confidence_enabled = false;
  /// Also flag Medium adjudicator confidence for human review.
  bool strict_review = false;
};

/// Low always needs review; Medium only under strict review.
bool needs_human_review(const std::optional<ConfidenceLevel>& level, bool strict_review);

/// Thrown when the adjudicator never produced a valid response. Carries the
/// consensus so callers can fall back to a majority vote.
class AdjudicationError : public Error {
 public:
  AdjudicationError(ConsensusSummary summary, const std::string& diagnostic)
      : Error("adjudication failed: " + diagnostic), summary_(std::move(summary)) {}

  const ConsensusSummary& summary() const { return summary_; }

 private:
  ConsensusSummary summary_;
};

/// Produces the final answer from valid candidates. With the unanimous fast
/// path enabled a unanimous committee is answered without calling the
/// adjudicator; otherwise the adjudicator prompt goes through the same
/// parse/validate/redraft loop as proponents, so an answer outside the option
/// set is rejected and redrafted rather than returned.
AdjudicationOutcome adjudicate(const Query& query, std::span<const ProponentResponse> candidates,
                               const ModelClient& adjudicator, const PromptTemplate& tmpl,
                               const QualityPolicy& policy, const AdjudicationOptions& options,
                               const GateContext& context = {});

}  // namespace committee
