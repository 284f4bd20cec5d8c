#include <chrono>

#include <gtest/gtest.h>

#include "committee/adjudication.hpp"
#include "committee/errors.hpp"
#include "committee/orchestrator.hpp"
#include "committee/serialization.hpp"
#include "test_support.hpp"

namespace committee {
namespace {

using testing::worked_example_query;
using testing::fixed_policy;
using testing::reply;
using testing::scripted;

const std::string kReason = "A reason long enough to pass the gate.";

CommitteeConfig committee_of(const std::vector<ScriptedPolicy>& proponents, ScriptedPolicy judge) {
  CommitteeConfig config;
  for (std::size_t i = 0; i < proponents.size(); ++i) {
    config.proponents.push_back(scripted("p" + std::to_string(i), proponents[i]));
  }
  config.adjudicator = scripted("judge", std::move(judge));
  return config;
}

ScriptedPolicy answers(int a) { return fixed_policy({reply(a, kReason)}); }
ScriptedPolicy broken() { return fixed_policy({std::string("garbage")}); }

TEST(AnswerQuery, WorkedExampleCommittee) {
  const auto outcome = answer_query(worked_example_query(), testing::worked_example_config());
  EXPECT_EQ(outcome.final_answer, Answer(OptionId{3}));
  EXPECT_EQ(outcome.consensus.kind, ConsensusKind::Majority);
  EXPECT_EQ(outcome.consensus.leading_count, 3);
  ASSERT_EQ(outcome.contributing.size(), 4u);
  EXPECT_EQ(outcome.contributing[0].proponent_id, "Qwen-2.5-7B");
  EXPECT_EQ(outcome.contributing[3].answer, Answer(OptionId{4}));
}

TEST(AnswerQuery, OutcomeRecordMatchesGolden) {
  const auto outcome = answer_query(worked_example_query(), testing::worked_example_config());
  EXPECT_EQ(outcome_record(outcome).dump(2) + "\n",
            testing::read_text(testing::fixture_path("worked_example/outcome.golden.json")));
}

TEST(AnswerQuery, TwoFailedProponentsStillAdjudicate) {
  const Committee committee(
      committee_of({answers(3), broken(), answers(3), broken()}, answers(3)));
  const auto outcome = committee.answer_query(worked_example_query());
  EXPECT_EQ(outcome.final_answer, Answer(OptionId{3}));
  EXPECT_EQ(outcome.consensus.total_valid, 2);
  ASSERT_EQ(outcome.contributing.size(), 4u);
  EXPECT_EQ(outcome.contributing[1].validation, Validation::Failed);
  EXPECT_EQ(outcome.contributing[1].attempt, 3);
}

TEST(AnswerQuery, ThreeFailedProponentsIsInsufficient) {
  const Committee committee(committee_of({answers(3), broken(), broken(), broken()}, answers(3)));
  try {
    committee.answer_query(worked_example_query());
    FAIL() << "expected InsufficientCommitteeError";
  } catch (const InsufficientCommitteeError& e) {
    ASSERT_EQ(e.responses().size(), 4u);
    EXPECT_EQ(e.responses()[0].validation, Validation::Valid);
    EXPECT_EQ(e.responses()[2].validation, Validation::Failed);
  }
  EXPECT_EQ(committee.adjudicator().call_count(), 0u);
}

TEST(AnswerQuery, AdjudicatorFailurePropagatesWithoutFallback) {
  const Committee committee(committee_of({answers(3), answers(3), answers(4)}, broken()));
  EXPECT_THROW(committee.answer_query(worked_example_query()), AdjudicationError);
}

TEST(AnswerQuery, MajorityFallbackWhenEnabled) {
  auto config = committee_of({answers(3), answers(3), answers(4)}, broken());
  config.features.fallback_majority = true;
  const auto outcome = Committee(config).answer_query(worked_example_query());
  EXPECT_EQ(outcome.final_answer, Answer(OptionId{3}));
  EXPECT_TRUE(outcome.needs_human_review);
  EXPECT_EQ(outcome.consensus.kind, ConsensusKind::Majority);
}

TEST(AnswerQuery, CallCountStaysWithinBound) {
  const Committee committee(committee_of({broken(), answers(3), answers(3)}, answers(3)));
  committee.answer_query(worked_example_query());
  const auto bound = 3 * 3 + 3;
  EXPECT_LE(committee.total_calls(), static_cast<std::uint64_t>(bound));
  EXPECT_EQ(committee.total_calls(), 3u + 1u + 1u + 1u);
}

TEST(AnswerQuery, DeadlineExceededCarriesPartialResults) {
  auto slow = answers(3);
  slow.latency = std::chrono::milliseconds(400);
  auto config = committee_of({answers(3), slow, answers(3)}, answers(3));
  config.per_query_deadline = std::chrono::milliseconds(100);
  const Committee committee(config);
  try {
    committee.answer_query(worked_example_query());
    FAIL() << "expected DeadlineError";
  } catch (const DeadlineError& e) {
    EXPECT_FALSE(e.partial().empty());
    EXPECT_LT(e.partial().size(), 3u);
  }
}

TEST(AnswerBatch, PreservesOrderAndLength) {
  const auto corpus = testing::synthetic_corpus(100);
  const auto config = testing::probabilistic_committee(3, 0.7, 1);
  const auto results = answer_batch(corpus, config, 8);
  ASSERT_EQ(results.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(results[i].query_id, corpus[i].id());
    EXPECT_NE(results[i].outcome(), nullptr);
  }
}

TEST(AnswerBatch, ParallelismOneMatchesSequentialLoop) {
  const auto corpus = testing::synthetic_corpus(30);
  auto config = testing::probabilistic_committee(4, 0.6, 3);
  const Committee committee(config);
  const auto batched = committee.answer_batch(corpus, 1);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(*batched[i].outcome(), committee.answer_query(corpus[i]));
  }
}

TEST(AnswerBatch, FailuresAreValues) {
  auto corpus = testing::synthetic_corpus(5);
  const Committee committee(committee_of({answers(1), broken(), broken()}, answers(1)));
  const auto results = committee.answer_batch(corpus, 2);
  ASSERT_EQ(results.size(), 5u);
  for (const auto& result : results) {
    ASSERT_NE(result.failure(), nullptr);
    EXPECT_EQ(result.failure()->kind, "insufficient_committee");
    EXPECT_EQ(result.failure()->responses.size(), 3u);
  }
  const auto record = query_result_record(results[0]);
  EXPECT_EQ(record.at("query_id"), "q0");
}

TEST(AnswerBatch, ParallelAndSequentialAgree) {
  const auto corpus = testing::synthetic_corpus(60);
  auto parallel = testing::probabilistic_committee(4, 0.5, 8);
  auto sequential = parallel;
  sequential.execution.mode = ExecutionMode::Sequential;
  EXPECT_EQ(answer_batch(corpus, parallel, 4), answer_batch(corpus, sequential, 1));
}

TEST(AnswerQuery, ParallelFanOutOverlapsLatency) {
  using Clock = std::chrono::steady_clock;
  auto config = testing::probabilistic_committee(4, 0.5, 2, std::chrono::milliseconds(50));
  config.execution = {ExecutionMode::Parallel, 4};
  auto sequential = config;
  sequential.execution.mode = ExecutionMode::Sequential;
  const auto query = testing::synthetic_corpus(1).front();

  auto time = [&](const CommitteeConfig& c) {
    const Committee committee(c);
    const auto start = Clock::now();
    committee.answer_query(query);
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };
  const double par = time(config);
  const double seq = time(sequential);
  EXPECT_GE(seq, 200.0);
  EXPECT_LT(par, 150.0);
}

TEST(RunManifest, CarriesRunInfoAndOutcomes) {
  const auto config = testing::worked_example_config();
  const std::vector<Query> corpus{worked_example_query()};
  const auto results = answer_batch(corpus, config, 1);
  const RunInfo info{"run-1", "abc", "2026-01-01T00:00:00Z", "2026-01-01T00:00:01Z"};
  const auto manifest = run_manifest(info, results);
  EXPECT_EQ(manifest.at("run_id"), "run-1");
  EXPECT_EQ(manifest.at("config_hash"), "abc");
  EXPECT_EQ(manifest.at("outcomes").size(), 1u);
  EXPECT_EQ(manifest.at("outcomes")[0].at("final_answer"), 3);
}

TEST(UtcTimestamp, Iso8601) {
  const auto epoch = std::chrono::system_clock::time_point{};
  EXPECT_EQ(utc_timestamp(epoch), "1970-01-01T00:00:00Z");
}

}  // namespace
}  // namespace committee
