// JSON encodings of the domain types. Keys are emitted in a fixed order so
// documents are byte-stable for a given value.

#pragma once

#include <nlohmann/json.hpp>

#include "committee/domain.hpp"

namespace committee {

using Json = nlohmann::ordered_json;

Json answer_to_json(const Answer& answer);
/// Integers become option ids, strings stay free text.
Answer answer_from_json(const Json& value);

Json to_json(const Query& query);
Query query_from_json(const Json& value);

/// Lossless: every field including scores and diagnostics.
Json to_json(const ProponentResponse& response);
ProponentResponse proponent_response_from_json(const Json& value);

Json to_json(const ConsensusSummary& summary);

/// The outcome record: query_id, final_answer, rationale, consensus_kind,
/// leading_answer, leading_count, total_valid, adjudicator_confidence,
/// needs_human_review, contributing[{proponent_id, answer, confidence_level,
/// validation}].
Json outcome_record(const AdjudicationOutcome& outcome);

}  // namespace committee
