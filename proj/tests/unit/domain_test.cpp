#include <random>

#include <gtest/gtest.h>

#include "committee/domain.hpp"
#include "committee/errors.hpp"
#include "committee/serialization.hpp"

namespace committee {
namespace {

TEST(ClassifyConfidence, BoundariesUnderDefaultThresholds) {
  const ConfidenceThresholds thresholds(75, 40);
  EXPECT_EQ(classify_confidence(75.0, thresholds), ConfidenceLevel::High);
  EXPECT_EQ(classify_confidence(40.0, thresholds), ConfidenceLevel::Medium);
  EXPECT_EQ(classify_confidence(0.0, thresholds), ConfidenceLevel::Low);
  EXPECT_EQ(classify_confidence(74.999, thresholds), ConfidenceLevel::Medium);
  EXPECT_EQ(classify_confidence(39.999, thresholds), ConfidenceLevel::Low);
  EXPECT_EQ(classify_confidence(100.0, thresholds), ConfidenceLevel::High);
}

TEST(ClassifyConfidence, RejectsScoresOutsideRange) {
  const ConfidenceThresholds thresholds;
  EXPECT_THROW(classify_confidence(-0.5, thresholds), DomainError);
  EXPECT_THROW(classify_confidence(100.5, thresholds), DomainError);
}

TEST(ClassifyConfidence, MonotoneInScore) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> score(0.0, 100.0);
  std::uniform_real_distribution<double> cut(1.0, 99.0);
  for (int i = 0; i < 5000; ++i) {
    double a = cut(rng), b = cut(rng);
    if (a == b) continue;
    const ConfidenceThresholds thresholds(std::max(a, b), std::min(a, b));
    double s1 = score(rng), s2 = score(rng);
    if (s1 > s2) std::swap(s1, s2);
    EXPECT_LE(classify_confidence(s1, thresholds), classify_confidence(s2, thresholds));
  }
}

TEST(ConfidenceThresholds, InvariantViolationsAreNamed) {
  EXPECT_EQ(ConfidenceThresholds::check(40, 75), "medium_min < high_min violated");
  EXPECT_EQ(ConfidenceThresholds::check(75, 0), "0 < medium_min violated");
  EXPECT_EQ(ConfidenceThresholds::check(120, 40), "high_min <= 100 violated");
  EXPECT_FALSE(ConfidenceThresholds::check(75, 40).has_value());
  EXPECT_THROW(ConfidenceThresholds(40, 75), DomainError);
}

TEST(Query, LegalAnswersMatchOptionCount) {
  for (int k = 1; k <= 8; ++k) {
    std::vector<std::string> texts;
    for (int i = 1; i <= k; ++i) texts.push_back("option text " + std::to_string(i));
    const auto query = Query::multiple_choice("q", "text", texts);
    const auto legal = query.legal_answers();
    ASSERT_EQ(legal.size(), static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) EXPECT_EQ(legal[i - 1], OptionId{i});
    EXPECT_FALSE(query.is_legal(OptionId{0}));
    EXPECT_FALSE(query.is_legal(OptionId{k + 1}));
  }
}

TEST(Query, RejectsNonContiguousIdsAndDanglingGroundTruth) {
  EXPECT_THROW(Query("q", "t", {{OptionId{1}, "a"}, {OptionId{3}, "b"}}), DomainError);
  EXPECT_THROW(Query("q", "t", {{OptionId{2}, "a"}}), DomainError);
  EXPECT_THROW(Query::multiple_choice("q", "t", {"a", "b"}, Category::lexicon(), OptionId{3}),
               DomainError);
  EXPECT_NO_THROW(Query::multiple_choice("q", "t", {"a", "b"}, Category::lexicon(), OptionId{2}));
}

TEST(Query, FreeFormHasNoOptions) {
  const auto query = Query::free_form("q", "What is HARQ?");
  EXPECT_FALSE(query.is_multiple_choice());
  EXPECT_TRUE(query.legal_answers().empty());
  EXPECT_FALSE(query.ground_truth().has_value());
}

TEST(Category, LabelsRoundTrip) {
  EXPECT_EQ(Category::from_label("Research publications"), Category::research_publications());
  EXPECT_EQ(Category::from_label("standards_specifications"),
            Category::standards_specifications());
  EXPECT_EQ(Category::from_label("LEXICON"), Category::lexicon());
  const auto other = Category::from_label("Satellite links");
  EXPECT_EQ(other.kind, CategoryKind::Other);
  EXPECT_EQ(other.label(), "Satellite links");
  for (const auto& c : {Category::lexicon(), Category::research_overview(),
                        Category::research_publications(), Category::standards_overview(),
                        Category::standards_specifications()}) {
    EXPECT_EQ(Category::from_label(c.label()), c);
  }
  EXPECT_EQ(Category::research_overview().abbreviation(), "RO");
}

TEST(Answers, FreeTextMatchIsCaseAndWhitespaceInsensitive) {
  EXPECT_TRUE(answers_match(Answer("  Hybrid   ARQ "), Answer("hybrid arq")));
  EXPECT_FALSE(answers_match(Answer("hybrid arq"), Answer("harq")));
  EXPECT_FALSE(answers_match(Answer(OptionId{1}), Answer("1")));
  EXPECT_TRUE(answers_match(Answer(OptionId{2}), Answer(OptionId{2})));
}

TEST(Utf8Length, CountsCodePoints) {
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("\xC3\xA9t\xC3\xA9"), 3u);
  EXPECT_EQ(utf8_length("\xE2\x82\xAC"), 1u);
}

TEST(Serialization, ProponentResponseRoundTripsLosslessly) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> score(0.0, 100.0);
  for (int i = 0; i < 500; ++i) {
    ProponentResponse r;
    r.proponent_id = "model-" + std::to_string(i);
    if (i % 3 == 0) {
      r.answer = std::string("free answer \"quoted\" ") + std::to_string(i);
    } else {
      r.answer = OptionId{1 + static_cast<int>(rng() % 6)};
    }
    r.reason = "reason \xC3\xA9\n\t" + std::to_string(rng());
    if (i % 2 == 0) r.confidence_score = score(rng);
    if (i % 4 == 0) r.confidence_level = ConfidenceLevel::Medium;
    r.attempt = 1 + i % 3;
    r.validation = static_cast<Validation>(i % 5);
    r.diagnostic = i % 5 == 0 ? "" : "diagnostic " + std::to_string(i);
    const auto text = to_json(r).dump();
    EXPECT_EQ(proponent_response_from_json(Json::parse(text)), r) << text;
  }
}

TEST(Serialization, QueryRoundTrips) {
  const auto query = Query::multiple_choice("q1", "text", {"a", "b", "c"},
                                            Category::other("Custom"), OptionId{2});
  EXPECT_EQ(query_from_json(to_json(query)), query);
}

}  // namespace
}  // namespace committee
