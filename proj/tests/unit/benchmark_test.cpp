#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "committee/benchmark.hpp"
#include "committee/errors.hpp"
#include "committee/orchestrator.hpp"
#include "test_support.hpp"

namespace committee {
namespace {

using testing::CategoryCount;
using testing::records_from_counts;

std::string ingest_error(std::string_view text) {
  try {
    parse_corpus(text);
  } catch (const IngestError& e) {
    return e.what();
  }
  return {};
}

TEST(LoadCorpus, TeleQnARecord) {
  const auto corpus = parse_corpus(R"({
    "question 7": {
      "question": "Which layer handles retransmission?",
      "option 1": "PHY", "option 2": "MAC", "option 3": "RLC", "option 4": "PDCP",
      "answer": "option 3: RLC",
      "explanation": "",
      "category": "Research publications"
    }})");
  ASSERT_EQ(corpus.size(), 1u);
  const auto& q = corpus[0];
  EXPECT_EQ(q.id(), "question 7");
  EXPECT_EQ(q.ground_truth(), OptionId{3});
  EXPECT_EQ(q.category(), Category::research_publications());
  ASSERT_EQ(q.option_count(), 4u);
  EXPECT_EQ(q.options()[1].text, "MAC");
}

TEST(LoadCorpus, WorkedExampleFixture) {
  const auto& q = testing::worked_example_query();
  EXPECT_EQ(q.ground_truth(), OptionId{3});
  EXPECT_EQ(q.category(), Category::research_publications());
  EXPECT_EQ(q.option_count(), 4u);
}

TEST(LoadCorpus, EmptyInputIsEmptyCorpus) {
  EXPECT_TRUE(parse_corpus("").empty());
  EXPECT_TRUE(parse_corpus("{}").empty());
  testing::TempDir dir("committee-corpus");
  testing::write_text(dir / "empty.json", "");
  EXPECT_TRUE(load_corpus(dir / "empty.json").empty());
}

TEST(LoadCorpus, DanglingAnswerIsIngestError) {
  const auto message = ingest_error(R"({"question 9": {"question": "q?",
      "option 1": "a", "option 2": "b", "option 3": "c", "option 4": "d",
      "answer": "option 5: e", "category": "Lexicon"}})");
  EXPECT_NE(message.find("question 9"), std::string::npos);
  EXPECT_NE(message.find("option 5"), std::string::npos);
}

TEST(LoadCorpus, MalformedRecordsNameTheirKey) {
  EXPECT_NE(ingest_error(R"({"bad one": {"option 1": "a", "answer": "option 1"}})").find("bad one"),
            std::string::npos);
  EXPECT_NE(ingest_error(R"({"gap": {"question": "q", "option 1": "a", "option 3": "c",
      "answer": "option 1"}})").find("gap"), std::string::npos);
  EXPECT_FALSE(ingest_error("[1, 2]").empty());
  EXPECT_FALSE(ingest_error("{ nope").empty());
  EXPECT_THROW(load_corpus("/nonexistent/corpus.json"), IngestError);
}

TEST(LoadCorpus, UnknownCategoryBecomesOther) {
  const auto corpus = parse_corpus(R"({"x": {"question": "q", "option 1": "a", "option 2": "b",
      "answer": "option 2: b", "category": "Satellite"}})");
  EXPECT_EQ(corpus.at(0).category(), Category::other("Satellite"));
}

TEST(LoadCorpus, SerializeRoundTrips) {
  const auto corpus = testing::synthetic_corpus(12);
  EXPECT_EQ(parse_corpus(serialize_corpus(corpus)), corpus);
}

QueryResult outcome_for(const Query& q, std::optional<int> answer) {
  if (!answer) return {q.id(), QueryFailure{"insufficient_committee", "too few", {}}};
  AdjudicationOutcome outcome;
  outcome.query_id = q.id();
  outcome.final_answer = OptionId{*answer};
  outcome.consensus.kind = ConsensusKind::Unanimous;
  return {q.id(), outcome};
}

TEST(Score, ExactMatchAndFailuresScoreZero) {
  const auto corpus = testing::synthetic_corpus(3);
  const std::vector<QueryResult> results{outcome_for(corpus[0], 1), outcome_for(corpus[1], 1),
                                         outcome_for(corpus[2], std::nullopt)};
  const auto records = score(results, corpus);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_TRUE(records[0].correct);
  EXPECT_EQ(records[0].predicted, OptionId{1});
  EXPECT_FALSE(records[1].correct);
  EXPECT_FALSE(records[2].correct);
  EXPECT_FALSE(records[2].predicted.has_value());
}

TEST(Score, UnknownQueryIsScoreError) {
  const auto corpus = testing::synthetic_corpus(2);
  const auto stranger = Query::multiple_choice("zz", "t", {"a", "b"}, Category::lexicon(), OptionId{1});
  const std::vector<QueryResult> results{outcome_for(stranger, 1)};
  EXPECT_THROW(score(results, corpus), ScoreError);
}

TEST(Score, CorpusAgainstItselfIsPerfect) {
  const auto corpus = testing::synthetic_corpus(50);
  std::vector<QueryResult> results;
  for (const auto& q : corpus) results.push_back(outcome_for(q, q.ground_truth()->value));
  const auto report = aggregate(score(results, corpus), {{"perfect", 100.0}});
  EXPECT_EQ(report.micro_accuracy, 100.0);
  EXPECT_EQ(report.macro_accuracy, 100.0);
  for (const auto& [category, stats] : report.per_category) EXPECT_EQ(stats.accuracy(), 100.0);
  EXPECT_EQ(report.improvement_vs.at("perfect"), 0.0);
}

TEST(Aggregate, MicroAndMacroForEqualAndUnequalSizes) {
  const auto equal = aggregate(records_from_counts(
      {{Category::lexicon(), 100, 60}, {Category::standards_overview(), 100, 80}}));
  EXPECT_DOUBLE_EQ(equal.micro_accuracy, 70.0);
  EXPECT_DOUBLE_EQ(equal.macro_accuracy, 70.0);

  const auto unequal = aggregate(records_from_counts(
      {{Category::lexicon(), 100, 60}, {Category::standards_overview(), 300, 240}}));
  EXPECT_DOUBLE_EQ(unequal.micro_accuracy, 75.0);
  EXPECT_DOUBLE_EQ(unequal.macro_accuracy, 70.0);
}

TEST(Aggregate, CountsSumToTotals) {
  const auto records = records_from_counts(testing::reference_72b_counts());
  const auto report = aggregate(records);
  long long n = 0, correct = 0;
  for (const auto& [category, stats] : report.per_category) {
    n += stats.n;
    correct += stats.n_correct;
  }
  EXPECT_EQ(n, static_cast<long long>(records.size()));
  EXPECT_EQ(correct, report.overall.n_correct);
  EXPECT_DOUBLE_EQ(report.micro_accuracy, 77.13);
}

TEST(Aggregate, ImprovementOverBaseline) {
  const auto report =
      aggregate(records_from_counts(testing::reference_7b_counts()), {{"Qwen2.5-7B", 68.09}});
  EXPECT_DOUBLE_EQ(report.micro_accuracy, 74.70);
  // 100 * (74.70 - 68.09) / 68.09
  EXPECT_NEAR(report.improvement_vs.at("Qwen2.5-7B"), 9.7077, 1e-4);
  EXPECT_THROW(relative_improvement(50.0, 0.0), AggregateError);
}

TEST(Aggregate, PermutationInvariant) {
  auto records = records_from_counts(testing::reference_7b_counts());
  const auto expected = aggregate(records);
  std::shuffle(records.begin(), records.end(), std::mt19937(1));
  const auto shuffled = aggregate(records);
  EXPECT_EQ(shuffled.micro_accuracy, expected.micro_accuracy);
  EXPECT_EQ(shuffled.per_category, expected.per_category);
}

TEST(Aggregate, EmptyIsAggregateError) {
  EXPECT_THROW(aggregate({}), AggregateError);
}

TEST(ScoreTally, MergeIsAssociativeAndCommutative) {
  const auto records = records_from_counts(testing::reference_7b_counts());
  ScoreTally a, b, c, whole;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (i % 3 == 0 ? a : i % 3 == 1 ? b : c).add(records[i]);
    whole.add(records[i]);
  }
  ScoreTally left = a;
  left.merge(b);
  left.merge(c);
  ScoreTally right = c;
  ScoreTally bc = b;
  bc.merge(a);
  right.merge(bc);
  EXPECT_EQ(emit_report(left.report(), ReportFormat::Json),
            emit_report(whole.report(), ReportFormat::Json));
  EXPECT_EQ(emit_report(right.report(), ReportFormat::Json),
            emit_report(whole.report(), ReportFormat::Json));
}

TEST(EmitReport, TableRowFor72BCommittee) {
  const auto report =
      aggregate(records_from_counts(testing::reference_72b_counts()), {}, "Committee-Qwen-72B");
  const auto table = emit_report(report, ReportFormat::Table);
  EXPECT_NE(table.find("Committee-Qwen-72B 89.00 78.85 79.71 77.50 66.45 77.13\n"),
            std::string::npos)
      << table;
  EXPECT_EQ(table.rfind("Model", 0), 0u);
  const auto header = table.substr(0, table.find('\n'));
  const std::vector<std::string> columns{"Le", "RO", "RP", "SO", "SS", "Avg."};
  std::size_t last = 0;
  for (const auto& column : columns) {
    const auto at = header.find(column, last);
    ASSERT_NE(at, std::string::npos) << column;
    last = at;
  }
}

TEST(EmitReport, SingleCategoryTable) {
  const auto report = aggregate(records_from_counts({{Category::lexicon(), 4, 3}}), {}, "solo");
  const auto table = emit_report(report, ReportFormat::Table);
  EXPECT_EQ(table.substr(0, table.find("\n\n") + 1), "Model    Le  Avg.\nsolo  75.00 75.00\n");
}

TEST(EmitReport, Deterministic) {
  const auto report = aggregate(records_from_counts(testing::reference_7b_counts()));
  for (const auto format : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Table}) {
    EXPECT_EQ(emit_report(report, format), emit_report(report, format));
  }
}

TEST(EmitReport, ConfidenceGridAndCsvRows) {
  auto records = records_from_counts({{Category::lexicon(), 4, 2}, {Category::standards_overview(), 2, 1}});
  records[0].confidence_level = ConfidenceLevel::High;
  records[1].confidence_level = ConfidenceLevel::High;
  records[2].confidence_level = ConfidenceLevel::Low;
  records[4].confidence_level = ConfidenceLevel::Medium;
  const auto report = aggregate(records);
  ASSERT_FALSE(report.per_confidence.empty());
  EXPECT_EQ(report.per_confidence_total.at(ConfidenceBucket::High).n, 2);
  EXPECT_EQ(report.per_confidence_total.at(ConfidenceBucket::High).n_correct, 2);
  EXPECT_EQ(report.per_confidence_total.at(ConfidenceBucket::Unrated).n, 2);

  const auto table = emit_report(report, ReportFormat::Table);
  EXPECT_NE(table.find("Accuracy by adjudicator confidence"), std::string::npos);
  const auto csv = emit_report(report, ReportFormat::Csv);
  EXPECT_EQ(csv.rfind("category,confidence,n,n_correct,accuracy\n", 0), 0u);
  EXPECT_NE(csv.find("Lexicon,all,4,2,50.0000\n"), std::string::npos);
  EXPECT_NE(csv.find("Lexicon,high,2,2,100.0000\n"), std::string::npos);
  EXPECT_NE(csv.find("All,all,6,3,50.0000\n"), std::string::npos);
}

TEST(EmitReport, FormatTokens) {
  EXPECT_EQ(parse_report_format("json"), ReportFormat::Json);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::Csv);
  EXPECT_EQ(parse_report_format("table"), ReportFormat::Table);
  EXPECT_EQ(parse_report_format("text-table"), ReportFormat::Table);
  EXPECT_FALSE(parse_report_format("xml").has_value());
}

}  // namespace
}  // namespace committee
