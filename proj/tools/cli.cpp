#include "cli.hpp"

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "committee/mock_server.hpp"
#include "committee/orchestrator.hpp"
#include "committee/replay.hpp"

namespace committee::cli {

namespace {

enum class RunMode { Live, Record, Replay };

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::optional<std::string> meta(const ReplayFixture& fixture, const std::string& key) {
  return fixture.find({kRunMetaEndpoint, key, 0});
}

std::string sorted_attempt_log(const MemoryAttemptLog& log) {
  auto records = log.records();
  std::sort(records.begin(), records.end(), [](const AttemptRecord& a, const AttemptRecord& b) {
    return std::tie(a.query_id, a.endpoint, a.attempt) < std::tie(b.query_id, b.endpoint, b.attempt);
  });
  std::ostringstream out;
  JsonLinesAttemptLog sink(out);
  for (const auto& record : records) sink.append(record);
  return out.str();
}

int run_pipeline(const BenchOptions& options, RunMode mode,
                 const std::filesystem::path& fixture_path, std::ostream& out, std::ostream& err) {
  Json config_doc;
  CommitteeConfig config;
  std::vector<Query> corpus;
  std::shared_ptr<const ReplayFixture> fixture;
  try {
    config_doc = read_config_document(options.config);
    config = config_from_json(config_doc, options.config.parent_path());
    apply_overrides(config, options.overrides);
    corpus = load_corpus(options.corpus);
    if (mode == RunMode::Replay) {
      fixture = std::make_shared<const ReplayFixture>(ReplayFixture::load(fixture_path.string()));
      auto replay = [&](ModelEndpoint& endpoint) {
        endpoint.kind = ReplayEndpoint{fixture_path.string(), fixture};
      };
      for (auto& proponent : config.proponents) replay(proponent);
      replay(config.adjudicator);
    }
    if (options.parallelism < 1) throw ConfigError("--parallelism must be >= 1");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    std::filesystem::create_directories(options.out_dir);
    auto recorder = mode == RunMode::Record ? std::make_shared<CompletionRecorder>() : nullptr;
    auto log = std::make_shared<MemoryAttemptLog>();
    const Committee committee(config, recorder, log);

    const auto started = std::chrono::system_clock::now();
    const auto results = committee.answer_batch(corpus, options.parallelism);
    const auto finished = std::chrono::system_clock::now();

    RunInfo info;
    info.config_hash = config_hash(config_doc);
    info.started = utc_timestamp(started);
    info.finished = utc_timestamp(finished);
    if (mode == RunMode::Replay) {
      info.started = meta(*fixture, "started").value_or(info.started);
      info.finished = meta(*fixture, "finished").value_or(info.finished);
      info.run_id = meta(*fixture, "run_id").value_or("");
    }
    if (info.run_id.empty()) {
      info.run_id = fmt::format(
          "run-{:016x}", fnv1a64(info.config_hash + "\n" + serialize_corpus(corpus) + "\n" +
                                 info.started));
    }

    // The manifest goes first so partial results survive a failing report.
    write_file(options.out_dir / kManifestFile, run_manifest(info, results).dump(2) + "\n");
    write_file(options.out_dir / kAttemptLogFile, sorted_attempt_log(*log));
    if (recorder) {
      recorder->record({kRunMetaEndpoint, "run_id", 0}, info.run_id);
      recorder->record({kRunMetaEndpoint, "started", 0}, info.started);
      recorder->record({kRunMetaEndpoint, "finished", 0}, info.finished);
      recorder->snapshot().save((options.out_dir / kFixtureFile).string());
    }

    const auto records = score(results, corpus);
    const auto report = aggregate(records, options.baselines, options.label);
    for (const auto format : options.formats) {
      const auto path =
          options.out_dir / fmt::format("{}.{}", kReportStem, file_extension(format));
      write_file(path, emit_report(report, format));
    }

    const auto failures = std::count_if(results.begin(), results.end(),
                                        [](const QueryResult& r) { return r.failure(); });
    out << emit_report(report, ReportFormat::Table);
    out << fmt::format("run {}: {} queries, {} failed, outputs in {}\n", info.run_id,
                       results.size(), failures, options.out_dir.string());
    return failures > 0 ? kQueryErrors : kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

std::optional<bool> on_off(const std::string& value) {
  if (value.empty()) return std::nullopt;
  return value == "on";
}

}  // namespace

void apply_overrides(CommitteeConfig& config, const Overrides& overrides) {
  if (overrides.confidence) config.features.confidence_enabled = *overrides.confidence;
  if (overrides.fast_path) config.features.fast_path_unanimous = *overrides.fast_path;
  if (overrides.seed) {
    auto reseed = [&](ModelEndpoint& endpoint) {
      if (auto* scripted = std::get_if<ScriptedEndpoint>(&endpoint.kind)) {
        if (auto* p = std::get_if<ProbabilisticPolicy>(&scripted->policy.mode)) p->seed = *overrides.seed;
      }
    };
    for (auto& proponent : config.proponents) reseed(proponent);
    reseed(config.adjudicator);
  }
}

int run_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  return run_pipeline(options, RunMode::Live, {}, out, err);
}

int run_record(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  return run_pipeline(options, RunMode::Record, {}, out, err);
}

int run_replay(const BenchOptions& options, const std::filesystem::path& fixture,
               std::ostream& out, std::ostream& err) {
  return run_pipeline(options, RunMode::Replay, fixture, out, err);
}

int run_ask(const AskOptions& options, std::ostream& out, std::ostream& err) {
  CommitteeConfig config;
  Query query;
  try {
    config = load_config(options.config);
    apply_overrides(config, options.overrides);
    query = options.options.empty()
                ? Query::free_form(options.id, options.question)
                : Query::multiple_choice(options.id, options.question, options.options);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  try {
    const Committee committee(std::move(config));
    out << outcome_record(committee.answer_query(query)).dump(2) << '\n';
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

int run_validate_config(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  try {
    const auto config = load_config(path);
    out << fmt::format("{}: ok ({} proponents, adjudicator {}, {} execution)\n", path.string(),
                       config.proponents.size(), config.adjudicator.name,
                       config.execution.mode == ExecutionMode::Parallel ? "parallel"
                                                                        : "sequential");
    return kSuccess;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

namespace {
MockServer* g_mock_server = nullptr;
extern "C" void stop_mock_server(int) {
  if (g_mock_server) g_mock_server->stop();
}
}  // namespace

int run_mock_serve(const std::string& host, int port, const std::filesystem::path& policy_file,
                   std::ostream& out, std::ostream& err) {
  MockPolicySet policies;
  try {
    policies = load_mock_policies(policy_file);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  try {
    MockServer server(std::move(policies));
    g_mock_server = &server;
    std::signal(SIGINT, stop_mock_server);
    std::signal(SIGTERM, stop_mock_server);
    out << fmt::format("serving chat completions on http://{}:{}/v1\n", host, port) << std::flush;
    server.serve_forever(host, port);
    g_mock_server = nullptr;
    return kSuccess;
  } catch (const std::exception& e) {
    g_mock_server = nullptr;
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Committee-of-models question answering and benchmarking"};
  app.require_subcommand(1);

  BenchOptions bench;
  std::vector<std::string> formats;
  std::string confidence;
  std::string fast_path;
  std::uint64_t seed = 0;
  std::vector<std::string> baselines;
  std::filesystem::path fixture;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for probabilistic scripted endpoints");
    cmd->add_option("--confidence", confidence, "Confidence levelling")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--fast-path", fast_path, "Skip adjudication on unanimous committees")
        ->check(CLI::IsMember({"on", "off"}));
  };
  auto add_bench = [&](CLI::App* cmd) {
    cmd->add_option("--config", bench.config, "Committee configuration file")->required();
    cmd->add_option("--corpus", bench.corpus, "Question corpus")->required();
    cmd->add_option("--out", bench.out_dir, "Output directory")->required();
    cmd->add_option("--format", formats, "Report formats: json, csv, table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    cmd->add_option("--parallelism", bench.parallelism, "Queries answered concurrently");
    cmd->add_option("--label", bench.label, "Row label in reports");
    cmd->add_option("--baseline", baselines, "NAME=ACCURACY to compare against");
    add_overrides(cmd);
  };

  auto* bench_cmd = app.add_subcommand("bench", "Answer a corpus and write reports");
  add_bench(bench_cmd);
  auto* record_cmd = app.add_subcommand("record", "Bench while capturing a replay fixture");
  add_bench(record_cmd);
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a recorded bench from its fixture");
  add_bench(replay_cmd);
  replay_cmd->add_option("--fixture", fixture, "Fixture written by record")->required();

  AskOptions ask;
  auto* ask_cmd = app.add_subcommand("ask", "Answer one question and print the outcome");
  ask_cmd->add_option("--config", ask.config, "Committee configuration file")->required();
  ask_cmd->add_option("--question", ask.question, "Question text")->required();
  ask_cmd->add_option("--option", ask.options, "Answer option, in order (repeatable)");
  ask_cmd->add_option("--id", ask.id, "Query id");
  add_overrides(ask_cmd);

  std::filesystem::path validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "Check a configuration file");
  validate_cmd->add_option("--config,config", validate_path, "Configuration file")->required();

  std::string host = "127.0.0.1";
  int port = 8000;
  std::filesystem::path policy_file;
  auto* mock_cmd = app.add_subcommand("mock-serve", "Serve scripted models over HTTP");
  mock_cmd->add_option("--port", port, "Port to listen on");
  mock_cmd->add_option("--host", host, "Address to bind");
  mock_cmd->add_option("--policy", policy_file, "Mock policy file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageError;
  }

  Overrides overrides;
  overrides.confidence = on_off(confidence);
  overrides.fast_path = on_off(fast_path);
  auto seed_given = [&](CLI::App* cmd) { return cmd->count("--seed") > 0; };

  if (*ask_cmd) {
    if (seed_given(ask_cmd)) overrides.seed = seed;
    ask.overrides = overrides;
    return run_ask(ask, std::cout, std::cerr);
  }
  if (*validate_cmd) return run_validate_config(validate_path, std::cout, std::cerr);
  if (*mock_cmd) return run_mock_serve(host, port, policy_file, std::cout, std::cerr);

  CLI::App* active = *bench_cmd ? bench_cmd : (*record_cmd ? record_cmd : replay_cmd);
  if (seed_given(active)) overrides.seed = seed;
  bench.overrides = overrides;
  if (!formats.empty()) {
    bench.formats.clear();
    for (const auto& token : formats) bench.formats.push_back(*parse_report_format(token));
  }
  for (const auto& entry : baselines) {
    const auto eq = entry.find('=');
    try {
      if (eq == std::string::npos) throw std::invalid_argument(entry);
      bench.baselines[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "error: --baseline expects NAME=ACCURACY, got " << entry << '\n';
      return kUsageError;
    }
  }

  if (*bench_cmd) return run_bench(bench, std::cout, std::cerr);
  if (*record_cmd) return run_record(bench, std::cout, std::cerr);
  return run_replay(bench, fixture, std::cout, std::cerr);
}

}  // namespace committee::cli
