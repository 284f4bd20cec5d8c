#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "committee/domain.hpp"

namespace committee {

/// Fields extracted from a model completion, before quality validation.
struct StructuredReply {
  Answer answer = OptionId{0};
  std::string reason;
  std::optional<double> confidence_score;
  /// Set when the model reported a level token ("high", "low") instead of a number.
  std::optional<ConfidenceLevel> confidence_level;

  friend bool operator==(const StructuredReply&, const StructuredReply&) = default;
};

/// Extracts the first well-formed JSON object from raw, tolerating prose and
/// code fences around it.
///
/// Throws ParseError when no object is found and FieldError when the answer is
/// missing, or is not an integer for a multiple-choice query. A missing reason
/// is returned empty; the quality gate rejects it.
StructuredReply parse_structured_response(std::string_view raw, const Query& query);

/// A compliant completion for reply: a single JSON object.
std::string render_structured_reply(const StructuredReply& reply);

}  // namespace committee
