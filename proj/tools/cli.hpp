// Command layer of the `committee` tool. Each command returns the process
// exit status: 0 success, 1 usage or configuration error, 2 runtime failure,
// 3 benchmark completed with per-query errors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "committee/benchmark.hpp"
#include "committee/config.hpp"

namespace committee::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kUsageError = 1,
  kRuntimeFailure = 2,
  kQueryErrors = 3,
};

/// Flag overrides applied on top of a loaded configuration.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<bool> confidence;
  std::optional<bool> fast_path;
};

void apply_overrides(CommitteeConfig& config, const Overrides& overrides);

struct BenchOptions {
  std::filesystem::path config;
  std::filesystem::path corpus;
  std::filesystem::path out_dir;
  std::vector<ReportFormat> formats{ReportFormat::Json, ReportFormat::Csv, ReportFormat::Table};
  int parallelism = 4;
  Overrides overrides;
  std::string label = "committee";
  std::map<std::string, double> baselines;
};

/// Files written into out_dir by bench, record and replay.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kAttemptLogFile = "attempts.jsonl";
inline constexpr const char* kFixtureFile = "fixture.jsonl";
inline constexpr const char* kReportStem = "report";

/// Fixture records under this endpoint name carry run metadata
/// (query_id run_id / started / finished) so a replay reproduces the manifest.
inline constexpr const char* kRunMetaEndpoint = "__run__";

int run_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

/// Bench that also writes every raw completion to out_dir/fixture.jsonl.
int run_record(const BenchOptions& options, std::ostream& out, std::ostream& err);

/// Bench with every endpoint served from the fixture.
int run_replay(const BenchOptions& options, const std::filesystem::path& fixture,
               std::ostream& out, std::ostream& err);

struct AskOptions {
  std::filesystem::path config;
  std::string id = "ask";
  std::string question;
  std::vector<std::string> options;
  Overrides overrides;
};

/// Prints the outcome record as JSON.
int run_ask(const AskOptions& options, std::ostream& out, std::ostream& err);

int run_validate_config(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

int run_mock_serve(const std::string& host, int port, const std::filesystem::path& policy_file,
                   std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int main(int argc, char** argv);

}  // namespace committee::cli
