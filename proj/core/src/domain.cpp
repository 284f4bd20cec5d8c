#include "committee/domain.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

namespace committee {

namespace {

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Lowercase, with '_', '-' and whitespace runs collapsed to one space.
std::string category_key(std::string_view label) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : label) {
    if (std::isspace(c) || c == '_' || c == '-') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace

std::string to_string(const Answer& answer) {
  if (const auto* id = std::get_if<OptionId>(&answer)) return std::to_string(id->value);
  return std::get<std::string>(answer);
}

std::string normalize_answer_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

bool answers_match(const Answer& lhs, const Answer& rhs) {
  if (lhs.index() != rhs.index()) return false;
  if (const auto* id = std::get_if<OptionId>(&lhs)) return *id == std::get<OptionId>(rhs);
  return normalize_answer_text(std::get<std::string>(lhs)) ==
         normalize_answer_text(std::get<std::string>(rhs));
}

Category Category::from_label(std::string_view label) {
  const std::string key = category_key(label);
  if (key == "lexicon") return lexicon();
  if (key == "research overview") return research_overview();
  if (key == "research publications" || key == "research publication") {
    return research_publications();
  }
  if (key == "standards overview" || key == "standard overview") return standards_overview();
  if (key == "standards specifications" || key == "standard specifications" ||
      key == "standards specification") {
    return standards_specifications();
  }
  return other(std::string(label));
}

std::string Category::label() const {
  switch (kind) {
    case CategoryKind::Lexicon: return "Lexicon";
    case CategoryKind::ResearchOverview: return "Research overview";
    case CategoryKind::ResearchPublications: return "Research publications";
    case CategoryKind::StandardsOverview: return "Standards overview";
    case CategoryKind::StandardsSpecifications: return "Standards specifications";
    case CategoryKind::Other: return other_label;
  }
  return other_label;
}

std::string Category::abbreviation() const {
  switch (kind) {
    case CategoryKind::Lexicon: return "Le";
    case CategoryKind::ResearchOverview: return "RO";
    case CategoryKind::ResearchPublications: return "RP";
    case CategoryKind::StandardsOverview: return "SO";
    case CategoryKind::StandardsSpecifications: return "SS";
    case CategoryKind::Other: return other_label;
  }
  return other_label;
}

Query::Query(std::string id, std::string text, std::vector<QueryOption> options,
             Category category, std::optional<OptionId> ground_truth)
    : id_(std::move(id)),
      text_(std::move(text)),
      options_(std::move(options)),
      category_(std::move(category)),
      ground_truth_(ground_truth) {
  for (std::size_t i = 0; i < options_.size(); ++i) {
    if (options_[i].id.value != static_cast<int>(i + 1)) {
      throw DomainError(fmt::format("query {}: option ids must be contiguous from 1, found {} at "
                                    "position {}",
                                    id_, options_[i].id.value, i + 1));
    }
  }
  if (ground_truth_ && !is_legal(*ground_truth_)) {
    throw DomainError(fmt::format("query {}: ground truth {} is not one of {} options", id_,
                                  ground_truth_->value, options_.size()));
  }
}

Query Query::multiple_choice(std::string id, std::string text,
                             const std::vector<std::string>& option_texts, Category category,
                             std::optional<OptionId> ground_truth) {
  std::vector<QueryOption> options;
  options.reserve(option_texts.size());
  for (std::size_t i = 0; i < option_texts.size(); ++i) {
    options.push_back({OptionId{static_cast<int>(i + 1)}, option_texts[i]});
  }
  if (options.empty()) throw DomainError("multiple-choice query " + id + " has no options");
  return Query(std::move(id), std::move(text), std::move(options), std::move(category),
               ground_truth);
}

Query Query::free_form(std::string id, std::string text, Category category) {
  return Query(std::move(id), std::move(text), {}, std::move(category), std::nullopt);
}

std::vector<OptionId> Query::legal_answers() const {
  std::vector<OptionId> ids;
  ids.reserve(options_.size());
  for (const auto& option : options_) ids.push_back(option.id);
  return ids;
}

std::string_view to_string(ConfidenceLevel level) {
  switch (level) {
    case ConfidenceLevel::High: return "high";
    case ConfidenceLevel::Medium: return "medium";
    case ConfidenceLevel::Low: return "low";
  }
  return "low";
}

std::optional<ConfidenceLevel> parse_confidence_level(std::string_view token) {
  const std::string key = lower_ascii(token);
  if (key == "high") return ConfidenceLevel::High;
  if (key == "medium") return ConfidenceLevel::Medium;
  if (key == "low") return ConfidenceLevel::Low;
  return std::nullopt;
}

std::optional<std::string> ConfidenceThresholds::check(double high_min, double medium_min) {
  if (!(medium_min > 0.0)) return "0 < medium_min violated";
  if (!(medium_min < high_min)) return "medium_min < high_min violated";
  if (!(high_min <= 100.0)) return "high_min <= 100 violated";
  return std::nullopt;
}

ConfidenceThresholds::ConfidenceThresholds(double high_min, double medium_min)
    : high_min_(high_min), medium_min_(medium_min) {
  if (auto violation = check(high_min, medium_min)) throw DomainError(*violation);
}

ConfidenceLevel classify_confidence(double score, const ConfidenceThresholds& thresholds) {
  if (!(score >= 0.0 && score <= 100.0)) {
    throw DomainError(fmt::format("confidence score {} outside [0, 100]", score));
  }
  if (score >= thresholds.high_min()) return ConfidenceLevel::High;
  if (score >= thresholds.medium_min()) return ConfidenceLevel::Medium;
  return ConfidenceLevel::Low;
}

std::string_view to_string(Validation validation) {
  switch (validation) {
    case Validation::Valid: return "valid";
    case Validation::RejectedFormat: return "rejected_format";
    case Validation::RejectedLength: return "rejected_length";
    case Validation::RejectedCompleteness: return "rejected_completeness";
    case Validation::Failed: return "failed";
  }
  return "failed";
}

std::optional<Validation> parse_validation(std::string_view token) {
  for (auto v : {Validation::Valid, Validation::RejectedFormat, Validation::RejectedLength,
                 Validation::RejectedCompleteness, Validation::Failed}) {
    if (to_string(v) == token) return v;
  }
  return std::nullopt;
}

std::string_view to_string(ConsensusKind kind) {
  switch (kind) {
    case ConsensusKind::Unanimous: return "unanimous";
    case ConsensusKind::Majority: return "majority";
    case ConsensusKind::Plurality: return "plurality";
    case ConsensusKind::Split: return "split";
  }
  return "split";
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace committee
