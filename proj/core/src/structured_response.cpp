#include "committee/structured_response.hpp"

#include <cstdint>
#include <limits>

#include <fmt/format.h>

#include "committee/serialization.hpp"

namespace committee {

namespace {

// Index one past the '}' closing the object that opens at text[open], or npos.
std::size_t matching_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<nlohmann::json> first_object(std::string_view raw) {
  for (std::size_t open = raw.find('{'); open != std::string_view::npos;
       open = raw.find('{', open + 1)) {
    const std::size_t end = matching_brace(raw, open);
    if (end == std::string_view::npos) continue;
    auto parsed = nlohmann::json::parse(raw.substr(open, end - open), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  }
  return std::nullopt;
}

}  // namespace

StructuredReply parse_structured_response(std::string_view raw, const Query& query) {
  const auto object = first_object(raw);
  if (!object) throw ParseError("no JSON object found in response");

  StructuredReply reply;
  const auto answer = object->find("answer");
  if (answer == object->end() || answer->is_null()) throw FieldError("answer field is missing");
  if (query.is_multiple_choice()) {
    if (!answer->is_number_integer()) {
      throw FieldError(fmt::format("answer must be an integer option number, got {}",
                                   answer->dump()));
    }
    const auto value = answer->get<std::int64_t>();
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
      throw FieldError(fmt::format("answer {} is out of range", value));
    }
    reply.answer = OptionId{static_cast<int>(value)};
  } else if (answer->is_string()) {
    reply.answer = answer->get<std::string>();
  } else if (answer->is_number()) {
    reply.answer = answer->dump();
  } else {
    throw FieldError("answer must be a string for a free-form question");
  }

  if (const auto reason = object->find("reason"); reason != object->end() && !reason->is_null()) {
    if (!reason->is_string()) throw FieldError("reason must be a string");
    reply.reason = reason->get<std::string>();
  }

  if (const auto confidence = object->find("confidence");
      confidence != object->end() && !confidence->is_null()) {
    if (confidence->is_number()) {
      reply.confidence_score = confidence->get<double>();
    } else if (confidence->is_string()) {
      reply.confidence_level = parse_confidence_level(confidence->get<std::string>());
      if (!reply.confidence_level) {
        throw FieldError("confidence must be a number or one of high, medium, low");
      }
    } else {
      throw FieldError("confidence must be a number or one of high, medium, low");
    }
  }
  return reply;
}

std::string render_structured_reply(const StructuredReply& reply) {
  Json object;
  object["answer"] = answer_to_json(reply.answer);
  object["reason"] = reply.reason;
  if (reply.confidence_score) {
    object["confidence"] = *reply.confidence_score;
  } else if (reply.confidence_level) {
    object["confidence"] = std::string(to_string(*reply.confidence_level));
  }
  return object.dump();
}

}  // namespace committee
