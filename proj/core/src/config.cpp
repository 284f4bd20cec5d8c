#include "committee/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "committee/serialization.hpp"

namespace committee {

namespace {

std::string resolve(const std::filesystem::path& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (base_dir / p).lexically_normal().string();
}

template <typename T>
T field(const Json& doc, const char* key, T fallback, const std::string& where) {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(fmt::format("{}.{} has the wrong type", where, key));
  }
}

int integer_field(const Json& doc, const char* key, int fallback, const std::string& where) {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  if (!doc.at(key).is_number_integer()) {
    throw ConfigError(fmt::format("{}.{} must be an integer", where, key));
  }
  return doc.at(key).get<int>();
}

void require_object(const Json& doc, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + " must be an object");
}

}  // namespace

ModelEndpoint endpoint_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "endpoint");
  ModelEndpoint endpoint;
  endpoint.name = field<std::string>(doc, "name", "", "endpoint");
  const std::string where = endpoint.name.empty() ? "endpoint" : endpoint.name;
  const std::string kind = field<std::string>(doc, "kind", "", where);
  if (kind == "http") {
    HttpEndpoint http;
    http.base_url = field<std::string>(doc, "base_url", "", where);
    http.model_id = field<std::string>(doc, "model", endpoint.name, where);
    http.auth_token_env = field<std::string>(doc, "auth_token_env", "", where);
    http.timeout_ms = integer_field(doc, "timeout_ms", http.timeout_ms, where);
    http.max_retries = integer_field(doc, "max_retries", http.max_retries, where);
    http.backoff_ms = integer_field(doc, "backoff_ms", http.backoff_ms, where);
    http.temperature = field<double>(doc, "temperature", http.temperature, where);
    endpoint.kind = std::move(http);
  } else if (kind == "scripted") {
    if (!doc.contains("policy")) throw ConfigError(where + ": scripted endpoint needs a policy");
    try {
      endpoint.kind = ScriptedEndpoint{scripted_policy_from_json(doc.at("policy"))};
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  } else if (kind == "replay") {
    const auto fixture = field<std::string>(doc, "fixture", "", where);
    if (fixture.empty()) throw ConfigError(where + ": replay endpoint needs a fixture");
    endpoint.kind = ReplayEndpoint{resolve(base_dir, fixture), nullptr};
  } else {
    throw ConfigError(where + ": kind must be http, scripted or replay");
  }
  endpoint.validate();
  return endpoint;
}

void CommitteeConfig::validate() const {
  if (proponents.empty()) throw ConfigError("committee needs at least one proponent");
  std::set<std::string> names;
  for (const auto& proponent : proponents) {
    proponent.validate();
    if (!names.insert(proponent.name).second) {
      throw ConfigError("duplicate endpoint name \"" + proponent.name + "\"");
    }
  }
  adjudicator.validate();
  if (names.contains(adjudicator.name)) {
    throw ConfigError("adjudicator name \"" + adjudicator.name +
                      "\" must differ from every proponent name");
  }
  quality.validate();
  if (auto violation = ConfidenceThresholds::check(thresholds.high_min(), thresholds.medium_min())) {
    throw ConfigError("thresholds: " + *violation);
  }
  if (execution.max_in_flight < 1) throw ConfigError("execution.max_in_flight must be >= 1");
  if (min_valid_candidates < 1) throw ConfigError("min_valid_candidates must be >= 1");
  if (static_cast<std::size_t>(min_valid_candidates) > proponents.size()) {
    throw ConfigError(fmt::format("min_valid_candidates ({}) exceeds committee size ({})",
                                  min_valid_candidates, proponents.size()));
  }
  if (per_query_deadline.count() <= 0) throw ConfigError("per_query_deadline_ms must be > 0");
  validate_template(templates.proponent);
  validate_template(templates.adjudicator);
  if (templates.proponent.role != PromptRole::Proponent ||
      templates.adjudicator.role != PromptRole::Adjudicator) {
    throw ConfigError("template roles are mismatched");
  }
}

CommitteeConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "configuration");
  CommitteeConfig config;

  if (!doc.contains("proponents") || !doc.at("proponents").is_array()) {
    throw ConfigError("proponents must be a list of endpoints");
  }
  for (const auto& entry : doc.at("proponents")) {
    config.proponents.push_back(endpoint_from_json(entry, base_dir));
  }
  if (!doc.contains("adjudicator")) throw ConfigError("adjudicator endpoint is required");
  config.adjudicator = endpoint_from_json(doc.at("adjudicator"), base_dir);

  if (doc.contains("quality")) {
    const auto& q = doc.at("quality");
    require_object(q, "quality");
    config.quality.max_redrafts = integer_field(q, "max_redrafts", 2, "quality");
    config.quality.min_reason_chars = integer_field(q, "min_reason_chars", 10, "quality");
    config.quality.max_reason_chars = integer_field(q, "max_reason_chars", 2000, "quality");
    config.quality.require_confidence = field<bool>(q, "require_confidence", false, "quality");
  }

  if (doc.contains("thresholds")) {
    const auto& t = doc.at("thresholds");
    require_object(t, "thresholds");
    const double high = field<double>(t, "high_min", ConfidenceThresholds::kDefaultHighMin,
                                      "thresholds");
    const double medium = field<double>(t, "medium_min", ConfidenceThresholds::kDefaultMediumMin,
                                        "thresholds");
    if (auto violation = ConfidenceThresholds::check(high, medium)) {
      throw ConfigError("thresholds: " + *violation);
    }
    config.thresholds = ConfidenceThresholds(high, medium);
  }

  if (doc.contains("execution")) {
    const auto& e = doc.at("execution");
    require_object(e, "execution");
    const auto mode = field<std::string>(e, "mode", "parallel", "execution");
    if (mode == "parallel") {
      config.execution.mode = ExecutionMode::Parallel;
    } else if (mode == "sequential") {
      config.execution.mode = ExecutionMode::Sequential;
    } else {
      throw ConfigError("execution.mode must be parallel or sequential");
    }
    config.execution.max_in_flight = integer_field(e, "max_in_flight", 4, "execution");
  }

  config.min_valid_candidates = integer_field(doc, "min_valid_candidates", 2, "configuration");
  config.per_query_deadline = std::chrono::milliseconds(
      integer_field(doc, "per_query_deadline_ms", 600000, "configuration"));

  if (doc.contains("features")) {
    const auto& f = doc.at("features");
    require_object(f, "features");
    config.features.confidence_enabled = field<bool>(f, "confidence_enabled", false, "features");
    config.features.fast_path_unanimous = field<bool>(f, "fast_path_unanimous", false, "features");
    config.features.strict_review = field<bool>(f, "strict_review", false, "features");
    config.features.fallback_majority = field<bool>(f, "fallback_majority", false, "features");
  }

  if (doc.contains("templates")) {
    const auto& t = doc.at("templates");
    if (t.is_string()) {
      config.templates = load_templates(resolve(base_dir, t.get<std::string>()));
    } else if (t.is_object()) {
      config.templates = templates_from_json_text(t.dump());
    } else {
      throw ConfigError("templates must be a file path or an object");
    }
  }

  config.validate();
  return config;
}

Json read_config_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

CommitteeConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_config_document(path), path.parent_path());
}

std::string config_hash(const Json& doc) {
  return fmt::format("{:016x}", fnv1a64(doc.dump()));
}

}  // namespace committee
