// Committee configuration and its JSON file format.
//
// {
//   "proponents": [endpoint...],
//   "adjudicator": endpoint,
//   "quality": {"max_redrafts": 2, "min_reason_chars": 10, "max_reason_chars": 2000,
//               "require_confidence": false},
//   "thresholds": {"high_min": 75, "medium_min": 40},
//   "execution": {"mode": "parallel", "max_in_flight": 4},
//   "min_valid_candidates": 2,
//   "per_query_deadline_ms": 600000,
//   "features": {"confidence_enabled": false, "fast_path_unanimous": false,
//                "strict_review": false, "fallback_majority": false},
//   "templates": "templates.json" | {...}
// }
//
// An endpoint is one of
//   {"name", "kind": "http", "base_url", "model", "auth_token_env", "timeout_ms",
//    "max_retries", "backoff_ms", "temperature"}
//   {"name", "kind": "scripted", "policy": {...}}
//   {"name", "kind": "replay", "fixture": path}
// Relative paths resolve against the configuration file's directory.

#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "committee/domain.hpp"
#include "committee/model_client.hpp"
#include "committee/prompts.hpp"
#include "committee/quality_gate.hpp"

namespace committee {

enum class ExecutionMode { Parallel, Sequential };

struct ExecutionPolicy {
  ExecutionMode mode = ExecutionMode::Parallel;
  int max_in_flight = 4;

  /// Concurrent proponent calls per query; 1 in sequential mode.
  int width() const { return mode == ExecutionMode::Sequential ? 1 : max_in_flight; }
};

struct FeatureFlags {
  bool confidence_enabled = false;
  bool fast_path_unanimous = false;
  bool strict_review = false;
  bool fallback_majority = false;
};

struct CommitteeConfig {
  std::vector<ModelEndpoint> proponents;
  ModelEndpoint adjudicator;
  QualityPolicy quality;
  ConfidenceThresholds thresholds;
  ExecutionPolicy execution;
  int min_valid_candidates = 2;
  std::chrono::milliseconds per_query_deadline{600000};
  FeatureFlags features;
  TemplateSet templates = default_templates();

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

/// Parses and validates a configuration document. Throws ConfigError.
CommitteeConfig config_from_json(const nlohmann::ordered_json& doc,
                                 const std::filesystem::path& base_dir = {});
CommitteeConfig load_config(const std::filesystem::path& path);

ModelEndpoint endpoint_from_json(const nlohmann::ordered_json& doc,
                                 const std::filesystem::path& base_dir = {});

/// Reads a configuration file as JSON without interpreting it.
nlohmann::ordered_json read_config_document(const std::filesystem::path& path);

/// 16 hex digits identifying a configuration document's content.
std::string config_hash(const nlohmann::ordered_json& doc);

}  // namespace committee
