#include "committee/serialization.hpp"

namespace committee {

namespace {

Json optional_level(const std::optional<ConfidenceLevel>& level) {
  if (!level) return nullptr;
  return std::string(to_string(*level));
}

}  // namespace

Json answer_to_json(const Answer& answer) {
  if (const auto* id = std::get_if<OptionId>(&answer)) return id->value;
  return std::get<std::string>(answer);
}

Answer answer_from_json(const Json& value) {
  if (value.is_number_integer()) return OptionId{value.get<int>()};
  if (value.is_string()) return value.get<std::string>();
  throw FieldError("answer must be an integer option id or a string");
}

Json to_json(const Query& query) {
  Json out;
  out["id"] = query.id();
  out["text"] = query.text();
  Json options = Json::array();
  for (const auto& option : query.options()) options.push_back(option.text);
  out["options"] = std::move(options);
  out["category"] = query.category().label();
  out["ground_truth"] = query.ground_truth() ? Json(query.ground_truth()->value) : Json(nullptr);
  return out;
}

Query query_from_json(const Json& value) {
  std::vector<QueryOption> options;
  int next = 1;
  for (const auto& text : value.at("options")) {
    options.push_back({OptionId{next++}, text.get<std::string>()});
  }
  std::optional<OptionId> truth;
  if (value.contains("ground_truth") && !value.at("ground_truth").is_null()) {
    truth = OptionId{value.at("ground_truth").get<int>()};
  }
  return Query(value.at("id").get<std::string>(), value.at("text").get<std::string>(),
               std::move(options), Category::from_label(value.value("category", "unspecified")),
               truth);
}

Json to_json(const ProponentResponse& response) {
  Json out;
  out["proponent_id"] = response.proponent_id;
  out["answer"] = answer_to_json(response.answer);
  out["reason"] = response.reason;
  out["confidence_score"] =
      response.confidence_score ? Json(*response.confidence_score) : Json(nullptr);
  out["confidence_level"] = optional_level(response.confidence_level);
  out["attempt"] = response.attempt;
  out["validation"] = std::string(to_string(response.validation));
  out["diagnostic"] = response.diagnostic;
  return out;
}

ProponentResponse proponent_response_from_json(const Json& value) {
  ProponentResponse out;
  out.proponent_id = value.at("proponent_id").get<std::string>();
  out.answer = answer_from_json(value.at("answer"));
  out.reason = value.at("reason").get<std::string>();
  if (const auto& score = value.at("confidence_score"); !score.is_null()) {
    out.confidence_score = score.get<double>();
  }
  if (const auto& level = value.at("confidence_level"); !level.is_null()) {
    out.confidence_level = parse_confidence_level(level.get<std::string>());
    if (!out.confidence_level) throw FieldError("unknown confidence level " + level.dump());
  }
  out.attempt = value.at("attempt").get<int>();
  auto validation = parse_validation(value.at("validation").get<std::string>());
  if (!validation) throw FieldError("unknown validation " + value.at("validation").dump());
  out.validation = *validation;
  out.diagnostic = value.value("diagnostic", "");
  return out;
}

Json to_json(const ConsensusSummary& summary) {
  Json out;
  out["kind"] = std::string(to_string(summary.kind));
  out["leading_answer"] =
      summary.leading_answer ? answer_to_json(*summary.leading_answer) : Json(nullptr);
  out["leading_count"] = summary.leading_count;
  out["total_valid"] = summary.total_valid;
  return out;
}

Json outcome_record(const AdjudicationOutcome& outcome) {
  Json out;
  out["query_id"] = outcome.query_id;
  out["final_answer"] = answer_to_json(outcome.final_answer);
  out["rationale"] = outcome.rationale;
  out["consensus_kind"] = std::string(to_string(outcome.consensus.kind));
  out["leading_answer"] = outcome.consensus.leading_answer
                              ? answer_to_json(*outcome.consensus.leading_answer)
                              : Json(nullptr);
  out["leading_count"] = outcome.consensus.leading_count;
  out["total_valid"] = outcome.consensus.total_valid;
  out["adjudicator_confidence"] = optional_level(outcome.adjudicator_confidence);
  out["needs_human_review"] = outcome.needs_human_review;
  Json contributing = Json::array();
  for (const auto& response : outcome.contributing) {
    Json entry;
    entry["proponent_id"] = response.proponent_id;
    entry["answer"] = response.is_valid() ? answer_to_json(response.answer) : Json(nullptr);
    entry["confidence_level"] = optional_level(response.confidence_level);
    entry["validation"] = std::string(to_string(response.validation));
    contributing.push_back(std::move(entry));
  }
  out["contributing"] = std::move(contributing);
  return out;
}

}  // namespace committee
