// Core vocabulary shared by every committee module: queries, proponent
// responses, confidence banding and adjudication outcomes.

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "committee/errors.hpp"

namespace committee {

/// 1-based index into a query's option list.
struct OptionId {
  int value = 0;

  friend constexpr auto operator<=>(OptionId, OptionId) = default;
};

/// A multiple-choice answer is an option id; a free-form answer is text.
using Answer = std::variant<OptionId, std::string>;

std::string to_string(const Answer& answer);

/// Lowercases and collapses runs of whitespace; used for free-form matching.
std::string normalize_answer_text(std::string_view text);

/// Exact match for option ids, normalized-string match for free text.
bool answers_match(const Answer& lhs, const Answer& rhs);

enum class CategoryKind {
  Lexicon,
  ResearchOverview,
  ResearchPublications,
  StandardsOverview,
  StandardsSpecifications,
  Other,
};

struct Category {
  CategoryKind kind = CategoryKind::Other;
  std::string other_label;  // only meaningful for CategoryKind::Other

  static Category lexicon() { return {CategoryKind::Lexicon, {}}; }
  static Category research_overview() { return {CategoryKind::ResearchOverview, {}}; }
  static Category research_publications() { return {CategoryKind::ResearchPublications, {}}; }
  static Category standards_overview() { return {CategoryKind::StandardsOverview, {}}; }
  static Category standards_specifications() {
    return {CategoryKind::StandardsSpecifications, {}};
  }
  static Category other(std::string label) { return {CategoryKind::Other, std::move(label)}; }

  /// Maps a corpus label ("Research publications", "standards_overview", ...)
  /// onto the enumeration; unknown labels become Other(label).
  static Category from_label(std::string_view label);

  /// Human-readable label, e.g. "Research publications".
  std::string label() const;
  /// Table column abbreviation: Le, RO, RP, SO, SS, or the Other label.
  std::string abbreviation() const;

  friend auto operator<=>(const Category&, const Category&) = default;
};

struct QueryOption {
  OptionId id;
  std::string text;

  friend bool operator==(const QueryOption&, const QueryOption&) = default;
};

/// One question. Multiple-choice queries carry contiguous option ids 1..k;
/// free-form queries carry no options and no ground truth.
class Query {
 public:
  Query() = default;
  /// Throws DomainError when option ids are not 1..k or ground_truth is
  /// outside the option set.
  Query(std::string id, std::string text, std::vector<QueryOption> options,
        Category category = Category::other("unspecified"),
        std::optional<OptionId> ground_truth = std::nullopt);

  /// Builds options numbered 1..k from their texts.
  static Query multiple_choice(std::string id, std::string text,
                               const std::vector<std::string>& option_texts,
                               Category category = Category::other("unspecified"),
                               std::optional<OptionId> ground_truth = std::nullopt);
  static Query free_form(std::string id, std::string text,
                         Category category = Category::other("unspecified"));

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  const std::vector<QueryOption>& options() const { return options_; }
  const Category& category() const { return category_; }
  const std::optional<OptionId>& ground_truth() const { return ground_truth_; }

  bool is_multiple_choice() const { return !options_.empty(); }
  std::size_t option_count() const { return options_.size(); }
  bool is_legal(OptionId id) const {
    return id.value >= 1 && static_cast<std::size_t>(id.value) <= options_.size();
  }
  /// Every legal answer id, 1..k.
  std::vector<OptionId> legal_answers() const;

  friend bool operator==(const Query&, const Query&) = default;

 private:
  std::string id_;
  std::string text_;
  std::vector<QueryOption> options_;
  Category category_ = Category::other("unspecified");
  std::optional<OptionId> ground_truth_;
};

/// Ordered Low < Medium < High.
enum class ConfidenceLevel { Low = 0, Medium = 1, High = 2 };

std::string_view to_string(ConfidenceLevel level);
std::optional<ConfidenceLevel> parse_confidence_level(std::string_view token);

class ConfidenceThresholds {
 public:
  static constexpr double kDefaultHighMin = 75.0;
  static constexpr double kDefaultMediumMin = 40.0;

  ConfidenceThresholds() = default;
  /// Throws DomainError unless 0 < medium_min < high_min <= 100.
  ConfidenceThresholds(double high_min, double medium_min);

  /// Empty when valid, otherwise the violated invariant.
  static std::optional<std::string> check(double high_min, double medium_min);

  double high_min() const { return high_min_; }
  double medium_min() const { return medium_min_; }

  friend bool operator==(const ConfidenceThresholds&, const ConfidenceThresholds&) = default;

 private:
  double high_min_ = kDefaultHighMin;
  double medium_min_ = kDefaultMediumMin;
};

/// High iff score >= high_min; Medium iff medium_min <= score < high_min;
/// Low otherwise. Throws DomainError for scores outside [0, 100].
ConfidenceLevel classify_confidence(double score, const ConfidenceThresholds& thresholds);

enum class Validation {
  Valid,
  RejectedFormat,
  RejectedLength,
  RejectedCompleteness,
  Failed,
};

std::string_view to_string(Validation validation);
std::optional<Validation> parse_validation(std::string_view token);

struct ProponentResponse {
  std::string proponent_id;
  Answer answer = OptionId{0};
  std::string reason;
  std::optional<double> confidence_score;
  std::optional<ConfidenceLevel> confidence_level;
  int attempt = 1;
  Validation validation = Validation::Failed;
  std::string diagnostic;  // last rejection or transport error, empty when Valid

  bool is_valid() const { return validation == Validation::Valid; }

  friend bool operator==(const ProponentResponse&, const ProponentResponse&) = default;
};

enum class ConsensusKind { Unanimous, Majority, Plurality, Split };

std::string_view to_string(ConsensusKind kind);

struct ConsensusSummary {
  ConsensusKind kind = ConsensusKind::Split;
  std::optional<Answer> leading_answer;
  int leading_count = 0;
  int total_valid = 0;

  friend bool operator==(const ConsensusSummary&, const ConsensusSummary&) = default;
};

struct AdjudicationOutcome {
  std::string query_id;
  Answer final_answer = OptionId{0};
  std::string rationale;
  ConsensusSummary consensus;
  std::optional<ConfidenceLevel> adjudicator_confidence;
  bool needs_human_review = false;
  /// Every proponent's terminal response, in committee order, Failed ones included.
  std::vector<ProponentResponse> contributing;

  friend bool operator==(const AdjudicationOutcome&, const AdjudicationOutcome&) = default;
};

/// Counts UTF-8 code points; the quality gate measures lengths in characters.
std::size_t utf8_length(std::string_view text);

bool is_blank(std::string_view text);

}  // namespace committee
