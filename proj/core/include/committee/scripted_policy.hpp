// Deterministic stand-ins for real models. A scripted endpoint produces
// completions from a policy instead of a network call, which lets the whole
// pipeline run at desk scale and bit-reproducibly.

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "committee/domain.hpp"
#include "committee/structured_response.hpp"

namespace committee {

/// Either a verbatim completion text or a structured reply rendered as JSON.
using ScriptedReply = std::variant<std::string, StructuredReply>;

/// Replies per query id. Entry i answers attempt i+1; attempts past the end
/// repeat the last entry. Queries without an entry use fallback; when that is
/// empty too the completion is prose with no structured object.
struct FixedPolicy {
  std::map<std::string, std::vector<ScriptedReply>> by_query;
  std::vector<ScriptedReply> fallback;
};

/// Answers correctly with probability p (per category, else default_p). Every
/// draw is a function of (seed, salt, query id) only, so endpoints sharing a
/// seed and salt agree on every question.
struct ProbabilisticPolicy {
  double default_p = 0.5;
  std::map<Category, double> per_category;
  std::uint64_t seed = 0;
  std::string salt;
  bool emit_confidence = false;

  double probability_for(const Category& category) const;
};

/// Always picks a wrong option (needs ground truth and at least two options).
struct AdversarialPolicy {};

struct ScriptedPolicy {
  std::variant<FixedPolicy, ProbabilisticPolicy, AdversarialPolicy> mode;
  std::chrono::milliseconds latency{0};
};

/// The completion text a scripted endpoint returns. Pure; no sleeping.
std::string scripted_completion(const ScriptedPolicy& policy, const Query& query, int attempt);

/// Uniform double in [0, 1) derived from (seed, salt, query id, stream).
double seeded_uniform(std::uint64_t seed, std::string_view salt, std::string_view query_id,
                      std::string_view stream);

/// Reads a policy object:
///   {"mode": "fixed", "answers": {qid: reply | [reply...]}, "fallback": reply | [reply...]}
///   {"mode": "probabilistic", "p": 0.7, "per_category": {label: p}, "seed": 1,
///    "salt": "", "emit_confidence": false}
///   {"mode": "adversarial"}
/// with optional "latency_ms". A reply is {"answer", "reason", "confidence"}
/// or {"raw": text}. Throws ConfigError.
ScriptedPolicy scripted_policy_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json to_json(const ScriptedPolicy& policy);

/// FNV-1a, 64 bit. Stable across platforms; used for seeds and content hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace committee
