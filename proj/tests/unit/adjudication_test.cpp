#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "committee/adjudication.hpp"
#include "committee/errors.hpp"
#include "test_support.hpp"

namespace committee {
namespace {

using testing::worked_example_query;
using testing::fixed_policy;
using testing::reply;
using testing::valid_candidate;

std::vector<ProponentResponse> candidates(std::initializer_list<int> answers) {
  std::vector<ProponentResponse> out;
  int i = 0;
  for (int a : answers) out.push_back(valid_candidate("m" + std::to_string(i++), a));
  return out;
}

const std::string kReason = "The adjudicator weighed every candidate carefully.";

TEST(SummarizeConsensus, MajorityOfThreeOutOfFour) {
  const auto summary = summarize_consensus(candidates({3, 3, 3, 4}));
  EXPECT_EQ(summary.kind, ConsensusKind::Majority);
  EXPECT_EQ(summary.leading_answer, Answer(OptionId{3}));
  EXPECT_EQ(summary.leading_count, 3);
  EXPECT_EQ(summary.total_valid, 4);
}

TEST(SummarizeConsensus, Unanimous) {
  const auto summary = summarize_consensus(candidates({2, 2, 2, 2}));
  EXPECT_EQ(summary.kind, ConsensusKind::Unanimous);
  EXPECT_EQ(summary.leading_answer, Answer(OptionId{2}));
  EXPECT_EQ(summary.leading_count, 4);
}

TEST(SummarizeConsensus, TieIsSplitWithoutLeader) {
  const auto summary = summarize_consensus(candidates({1, 1, 2, 2}));
  EXPECT_EQ(summary.kind, ConsensusKind::Split);
  EXPECT_FALSE(summary.leading_answer.has_value());
  EXPECT_EQ(summary.total_valid, 4);
}

TEST(SummarizeConsensus, PluralityWithoutHalf) {
  const auto summary = summarize_consensus(candidates({1, 1, 2, 3, 4}));
  EXPECT_EQ(summary.kind, ConsensusKind::Plurality);
  EXPECT_EQ(summary.leading_answer, Answer(OptionId{1}));
  EXPECT_EQ(summary.leading_count, 2);
  // Exactly half is not a majority.
  EXPECT_EQ(summarize_consensus(candidates({1, 1, 2, 3})).kind, ConsensusKind::Plurality);
}

TEST(SummarizeConsensus, SingleCandidateIsUnanimous) {
  EXPECT_EQ(summarize_consensus(candidates({4})).kind, ConsensusKind::Unanimous);
}

TEST(SummarizeConsensus, EmptyOrInvalidIsDomainError) {
  EXPECT_THROW(summarize_consensus({}), DomainError);
  auto c = candidates({1, 2});
  c[0].validation = Validation::Failed;
  EXPECT_THROW(summarize_consensus(c), DomainError);
}

TEST(SummarizeConsensus, PermutationInvariant) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ProponentResponse> c;
    const int n = 1 + static_cast<int>(rng() % 7);
    for (int i = 0; i < n; ++i) c.push_back(valid_candidate("m" + std::to_string(i), 1 + rng() % 4));
    const auto expected = summarize_consensus(c);
    std::shuffle(c.begin(), c.end(), rng);
    EXPECT_EQ(summarize_consensus(c), expected);
  }
}

TEST(SummarizeConsensus, FreeTextAnswersCompareNormalized) {
  std::vector<ProponentResponse> c(3);
  c[0].answer = std::string("Hybrid ARQ");
  c[1].answer = std::string("hybrid  arq");
  c[2].answer = std::string("HARQ");
  for (auto& r : c) r.validation = Validation::Valid;
  const auto summary = summarize_consensus(c);
  EXPECT_EQ(summary.kind, ConsensusKind::Majority);
  EXPECT_EQ(summary.leading_count, 2);
}

TEST(MajorityFallback, Examples) {
  EXPECT_EQ(majority_fallback(candidates({3, 3, 4})), Answer(OptionId{3}));
  EXPECT_EQ(majority_fallback(candidates({1, 2})), Answer(OptionId{1}));
  EXPECT_EQ(majority_fallback(candidates({4})), Answer(OptionId{4}));
  EXPECT_EQ(majority_fallback(candidates({4, 2, 4, 2})), Answer(OptionId{2}));
}

TEST(Adjudicate, WorkedExampleScenarioFollowsAdjudicator) {
  const ModelClient judge(testing::scripted("judge", fixed_policy({reply(3, kReason)})));
  const auto outcome = adjudicate(worked_example_query(), candidates({3, 3, 3, 4}), judge,
                                  default_adjudicator_template(), {}, {});
  EXPECT_EQ(outcome.final_answer, Answer(OptionId{3}));
  EXPECT_EQ(outcome.consensus.kind, ConsensusKind::Majority);
  EXPECT_EQ(outcome.consensus.leading_answer, Answer(OptionId{3}));
  EXPECT_EQ(outcome.consensus.leading_count, 3);
  EXPECT_EQ(outcome.rationale, kReason);
  EXPECT_EQ(outcome.contributing.size(), 4u);
  EXPECT_EQ(judge.call_count(), 1u);
}

TEST(Adjudicate, FastPathSkipsAdjudicatorOnUnanimity) {
  const ModelClient judge(testing::scripted("judge", fixed_policy({reply(1, kReason)})));
  AdjudicationOptions options;
  options.fast_path_unanimous = true;
  const auto outcome = adjudicate(worked_example_query(), candidates({3, 3, 3, 3}), judge,
                                  default_adjudicator_template(), {}, options);
  EXPECT_EQ(outcome.final_answer, Answer(OptionId{3}));
  EXPECT_EQ(outcome.consensus.kind, ConsensusKind::Unanimous);
  EXPECT_EQ(judge.call_count(), 0u);
  EXPECT_FALSE(outcome.rationale.empty());
}

TEST(Adjudicate, FastPathStillAdjudicatesDisagreement) {
  const ModelClient judge(testing::scripted("judge", fixed_policy({reply(3, kReason)})));
  AdjudicationOptions options;
  options.fast_path_unanimous = true;
  adjudicate(worked_example_query(), candidates({3, 3, 4}), judge, default_adjudicator_template(), {},
             options);
  EXPECT_EQ(judge.call_count(), 1u);
}

TEST(Adjudicate, WithoutFastPathUnanimityStillCallsAdjudicator) {
  const ModelClient judge(testing::scripted("judge", fixed_policy({reply(3, kReason)})));
  adjudicate(worked_example_query(), candidates({3, 3}), judge, default_adjudicator_template(), {}, {});
  EXPECT_EQ(judge.call_count(), 1u);
}

// A split committee and a judge reporting 35 under thresholds (75, 40): the
// score falls below medium_min, so the level is Low and the outcome is flagged.
TEST(Adjudicate, LowAdjudicatorConfidenceFlagsForReview) {
  const ModelClient judge(testing::scripted("judge", fixed_policy({reply(2, kReason, 35)})));
  AdjudicationOptions options;
  options.confidence_enabled = true;
  GateContext context;
  context.thresholds = ConfidenceThresholds(75, 40);
  const auto outcome = adjudicate(worked_example_query(), candidates({1, 1, 2, 2}), judge,
                                  default_adjudicator_template(), {}, options, context);
  EXPECT_EQ(outcome.final_answer, Answer(OptionId{2}));
  EXPECT_EQ(outcome.consensus.kind, ConsensusKind::Split);
  EXPECT_EQ(outcome.adjudicator_confidence, ConfidenceLevel::Low);
  EXPECT_TRUE(outcome.needs_human_review);
}

TEST(Adjudicate, MediumFlagsOnlyUnderStrictReview) {
  const ModelClient judge(testing::scripted("judge", fixed_policy({reply(2, kReason, 50)})));
  AdjudicationOptions options;
  options.confidence_enabled = true;
  auto outcome = adjudicate(worked_example_query(), candidates({1, 2}), judge,
                            default_adjudicator_template(), {}, options);
  EXPECT_EQ(outcome.adjudicator_confidence, ConfidenceLevel::Medium);
  EXPECT_FALSE(outcome.needs_human_review);
  options.strict_review = true;
  outcome = adjudicate(worked_example_query(), candidates({1, 2}), judge,
                       default_adjudicator_template(), {}, options);
  EXPECT_TRUE(outcome.needs_human_review);
}

TEST(Adjudicate, ConfidenceIgnoredWhenDisabled) {
  const ModelClient judge(testing::scripted("judge", fixed_policy({reply(2, kReason, 10)})));
  const auto outcome = adjudicate(worked_example_query(), candidates({1, 2}), judge,
                                  default_adjudicator_template(), {}, {});
  EXPECT_FALSE(outcome.adjudicator_confidence.has_value());
  EXPECT_FALSE(outcome.needs_human_review);
}

TEST(Adjudicate, OutOfSetAnswerIsRedrafted) {
  const ModelClient judge(
      testing::scripted("judge", fixed_policy({reply(9, kReason), reply(4, kReason)})));
  const auto outcome = adjudicate(worked_example_query(), candidates({3, 4}), judge,
                                  default_adjudicator_template(), {}, {});
  EXPECT_EQ(outcome.final_answer, Answer(OptionId{4}));
  EXPECT_EQ(judge.call_count(), 2u);
}

TEST(Adjudicate, PersistentFailureCarriesConsensus) {
  const ModelClient judge(testing::scripted("judge", fixed_policy({std::string("no idea")})));
  try {
    adjudicate(worked_example_query(), candidates({3, 3, 4}), judge, default_adjudicator_template(), {},
               {});
    FAIL() << "expected AdjudicationError";
  } catch (const AdjudicationError& e) {
    EXPECT_EQ(e.summary().kind, ConsensusKind::Majority);
    EXPECT_EQ(e.summary().leading_answer, Answer(OptionId{3}));
  }
  EXPECT_EQ(judge.call_count(), 3u);
}

TEST(NeedsHumanReview, Rule) {
  EXPECT_TRUE(needs_human_review(ConfidenceLevel::Low, false));
  EXPECT_FALSE(needs_human_review(ConfidenceLevel::Medium, false));
  EXPECT_TRUE(needs_human_review(ConfidenceLevel::Medium, true));
  EXPECT_FALSE(needs_human_review(ConfidenceLevel::High, true));
  EXPECT_FALSE(needs_human_review(std::nullopt, true));
}

}  // namespace
}  // namespace committee
