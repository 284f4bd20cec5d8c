#include "committee/scripted_policy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "committee/serialization.hpp"

namespace committee {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string scripted_reason(const Answer& answer) {
  return fmt::format("Scripted rationale: option {} is the best supported choice for this "
                     "question.",
                     to_string(answer));
}

std::string no_object_text(const Query& query) {
  return fmt::format("I am not able to give a structured answer to question {}.", query.id());
}

ScriptedReply reply_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("scripted reply must be an object");
  if (doc.contains("raw")) {
    if (!doc.at("raw").is_string()) throw ConfigError("scripted reply raw must be a string");
    return doc.at("raw").get<std::string>();
  }
  StructuredReply reply;
  if (!doc.contains("answer")) throw ConfigError("scripted reply needs answer or raw");
  try {
    reply.answer = answer_from_json(doc.at("answer"));
  } catch (const FieldError& e) {
    throw ConfigError(std::string("scripted reply: ") + e.what());
  }
  reply.reason = doc.value("reason", "");
  if (doc.contains("confidence") && !doc.at("confidence").is_null()) {
    const auto& confidence = doc.at("confidence");
    if (confidence.is_number()) {
      reply.confidence_score = confidence.get<double>();
    } else if (confidence.is_string()) {
      reply.confidence_level = parse_confidence_level(confidence.get<std::string>());
      if (!reply.confidence_level) throw ConfigError("scripted reply: bad confidence token");
    } else {
      throw ConfigError("scripted reply: confidence must be a number or level");
    }
  }
  return reply;
}

std::vector<ScriptedReply> replies_from_json(const Json& doc) {
  std::vector<ScriptedReply> replies;
  if (doc.is_array()) {
    for (const auto& entry : doc) replies.push_back(reply_from_json(entry));
    if (replies.empty()) throw ConfigError("scripted reply list is empty");
  } else {
    replies.push_back(reply_from_json(doc));
  }
  return replies;
}

Json reply_to_json(const ScriptedReply& reply) {
  Json out;
  if (const auto* raw = std::get_if<std::string>(&reply)) {
    out["raw"] = *raw;
    return out;
  }
  const auto& structured = std::get<StructuredReply>(reply);
  out["answer"] = answer_to_json(structured.answer);
  out["reason"] = structured.reason;
  if (structured.confidence_score) {
    out["confidence"] = *structured.confidence_score;
  } else if (structured.confidence_level) {
    out["confidence"] = std::string(to_string(*structured.confidence_level));
  }
  return out;
}

Json replies_to_json(const std::vector<ScriptedReply>& replies) {
  if (replies.size() == 1) return reply_to_json(replies.front());
  Json out = Json::array();
  for (const auto& reply : replies) out.push_back(reply_to_json(reply));
  return out;
}

double checked_probability(const Json& value, const std::string& what) {
  if (!value.is_number()) throw ConfigError(what + " must be a number");
  const double p = value.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(fmt::format("{} = {} outside [0, 1]", what, p));
  return p;
}

std::string render(const ScriptedReply& reply) {
  if (const auto* raw = std::get_if<std::string>(&reply)) return *raw;
  return render_structured_reply(std::get<StructuredReply>(reply));
}

OptionId wrong_option(const Query& query, OptionId truth, double draw) {
  const int k = static_cast<int>(query.option_count());
  if (k < 2) return truth;
  // Pick uniformly among the k-1 options that differ from truth.
  int pick = std::min(static_cast<int>(draw * (k - 1)), k - 2) + 1;
  if (pick >= truth.value) ++pick;
  return OptionId{pick};
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t hash = basis;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

double seeded_uniform(std::uint64_t seed, std::string_view salt, std::string_view query_id,
                      std::string_view stream) {
  std::uint64_t h = fnv1a64(salt);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(query_id, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(stream, h);
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ h);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double ProbabilisticPolicy::probability_for(const Category& category) const {
  const auto it = per_category.find(category);
  return it == per_category.end() ? default_p : it->second;
}

std::string scripted_completion(const ScriptedPolicy& policy, const Query& query, int attempt) {
  return std::visit(
      [&](const auto& mode) -> std::string {
        using Mode = std::decay_t<decltype(mode)>;
        if constexpr (std::is_same_v<Mode, FixedPolicy>) {
          const auto it = mode.by_query.find(query.id());
          const auto& replies = it != mode.by_query.end() ? it->second : mode.fallback;
          if (replies.empty()) return no_object_text(query);
          const auto index = std::min<std::size_t>(static_cast<std::size_t>(std::max(attempt, 1)) - 1,
                                                   replies.size() - 1);
          return render(replies[index]);
        } else if constexpr (std::is_same_v<Mode, ProbabilisticPolicy>) {
          StructuredReply reply;
          if (!query.is_multiple_choice() || !query.ground_truth()) {
            reply.answer = query.is_multiple_choice() ? Answer(OptionId{1}) : Answer("unknown");
          } else {
            const auto truth = *query.ground_truth();
            const double p = mode.probability_for(query.category());
            const bool correct = seeded_uniform(mode.seed, mode.salt, query.id(), "correct") < p;
            reply.answer = correct ? truth
                                   : wrong_option(query, truth,
                                                  seeded_uniform(mode.seed, mode.salt, query.id(),
                                                                 "wrong"));
          }
          reply.reason = scripted_reason(reply.answer);
          if (mode.emit_confidence) {
            reply.confidence_score = std::floor(
                100.0 * seeded_uniform(mode.seed, mode.salt, query.id(), "confidence"));
          }
          return render_structured_reply(reply);
        } else {
          StructuredReply reply;
          if (query.is_multiple_choice()) {
            const OptionId truth = query.ground_truth().value_or(OptionId{1});
            reply.answer = wrong_option(query, truth, 0.0);
          } else {
            reply.answer = "unknown";
          }
          reply.reason = scripted_reason(reply.answer);
          return render_structured_reply(reply);
        }
      },
      policy.mode);
}

ScriptedPolicy scripted_policy_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("scripted policy must be an object");
  ScriptedPolicy policy;
  const std::string mode = doc.value("mode", "");
  if (mode == "fixed") {
    FixedPolicy fixed;
    if (doc.contains("answers")) {
      if (!doc.at("answers").is_object()) throw ConfigError("fixed policy answers must be an object");
      for (const auto& [qid, replies] : doc.at("answers").items()) {
        fixed.by_query[qid] = replies_from_json(replies);
      }
    }
    if (doc.contains("fallback")) fixed.fallback = replies_from_json(doc.at("fallback"));
    policy.mode = std::move(fixed);
  } else if (mode == "probabilistic") {
    ProbabilisticPolicy probabilistic;
    if (doc.contains("p")) probabilistic.default_p = checked_probability(doc.at("p"), "p");
    if (doc.contains("per_category")) {
      for (const auto& [label, p] : doc.at("per_category").items()) {
        probabilistic.per_category[Category::from_label(label)] =
            checked_probability(p, "per_category." + label);
      }
    }
    if (doc.contains("seed")) {
      if (!doc.at("seed").is_number_unsigned()) {
        throw ConfigError("seed must be a non-negative integer");
      }
      probabilistic.seed = doc.at("seed").get<std::uint64_t>();
    }
    probabilistic.salt = doc.value("salt", "");
    probabilistic.emit_confidence = doc.value("emit_confidence", false);
    policy.mode = std::move(probabilistic);
  } else if (mode == "adversarial") {
    policy.mode = AdversarialPolicy{};
  } else {
    throw ConfigError("scripted policy mode must be fixed, probabilistic or adversarial, got \"" +
                      mode + "\"");
  }
  if (doc.contains("latency_ms")) {
    const auto& latency = doc.at("latency_ms");
    if (!latency.is_number_integer() || latency.get<long long>() < 0) {
      throw ConfigError("latency_ms must be a non-negative integer");
    }
    policy.latency = std::chrono::milliseconds(latency.get<long long>());
  }
  return policy;
}

Json to_json(const ScriptedPolicy& policy) {
  Json out;
  std::visit(
      [&](const auto& mode) {
        using Mode = std::decay_t<decltype(mode)>;
        if constexpr (std::is_same_v<Mode, FixedPolicy>) {
          out["mode"] = "fixed";
          Json answers = Json::object();
          for (const auto& [qid, replies] : mode.by_query) answers[qid] = replies_to_json(replies);
          out["answers"] = std::move(answers);
          if (!mode.fallback.empty()) out["fallback"] = replies_to_json(mode.fallback);
        } else if constexpr (std::is_same_v<Mode, ProbabilisticPolicy>) {
          out["mode"] = "probabilistic";
          out["p"] = mode.default_p;
          Json per_category = Json::object();
          for (const auto& [category, p] : mode.per_category) per_category[category.label()] = p;
          out["per_category"] = std::move(per_category);
          out["seed"] = mode.seed;
          out["salt"] = mode.salt;
          out["emit_confidence"] = mode.emit_confidence;
        } else {
          out["mode"] = "adversarial";
        }
      },
      policy.mode);
  out["latency_ms"] = policy.latency.count();
  return out;
}

}  // namespace committee
