#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "committee/adjudication.hpp"
#include "committee/benchmark.hpp"
#include "committee/orchestrator.hpp"
#include "committee/prompts.hpp"
#include "committee/structured_response.hpp"

namespace committee {
namespace {

Query sample_query() {
  return Query::multiple_choice(
      "bench-q", "Which layer handles retransmission in this scenario?",
      {"Physical layer", "MAC layer", "RLC layer", "Application layer"},
      Category::standards_specifications(), OptionId{3});
}

std::vector<ProponentResponse> candidates(int n) {
  std::vector<ProponentResponse> out;
  for (int i = 0; i < n; ++i) {
    ProponentResponse r;
    r.proponent_id = "m" + std::to_string(i);
    r.answer = OptionId{1 + i % 3};
    r.reason = "Reason given by model " + std::to_string(i) + " for its pick.";
    r.validation = Validation::Valid;
    out.push_back(std::move(r));
  }
  return out;
}

void BM_SummarizeConsensus(benchmark::State& state) {
  const auto c = candidates(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(summarize_consensus(c));
}
BENCHMARK(BM_SummarizeConsensus)->Arg(4)->Arg(16)->Arg(64);

void BM_ParseStructuredResponse(benchmark::State& state) {
  const auto query = sample_query();
  const std::string raw =
      "Let me think about it.\n```json\n{\"answer\": 3, \"reason\": \"RLC in AM mode "
      "retransmits missing PDUs.\", \"confidence\": 82}\n```\n";
  for (auto _ : state) benchmark::DoNotOptimize(parse_structured_response(raw, query));
}
BENCHMARK(BM_ParseStructuredResponse);

void BM_RenderProponentPrompt(benchmark::State& state) {
  const auto query = sample_query();
  const auto tmpl = default_proponent_template();
  for (auto _ : state) benchmark::DoNotOptimize(render_proponent_prompt(tmpl, query));
}
BENCHMARK(BM_RenderProponentPrompt);

void BM_RenderAdjudicatorPrompt(benchmark::State& state) {
  const auto query = sample_query();
  const auto tmpl = default_adjudicator_template();
  const auto c = candidates(4);
  for (auto _ : state) benchmark::DoNotOptimize(render_adjudicator_prompt(tmpl, query, c));
}
BENCHMARK(BM_RenderAdjudicatorPrompt);

void BM_Aggregate(benchmark::State& state) {
  std::mt19937 rng(1);
  const std::vector<Category> categories{Category::lexicon(), Category::research_overview(),
                                         Category::research_publications(),
                                         Category::standards_overview(),
                                         Category::standards_specifications()};
  std::vector<BenchmarkRecord> records(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    r.query_id = "q" + std::to_string(i);
    r.category = categories[rng() % categories.size()];
    r.ground_truth = OptionId{1};
    r.correct = rng() % 4 != 0;
    r.predicted = r.correct ? OptionId{1} : OptionId{2};
    r.confidence_level = static_cast<ConfidenceLevel>(rng() % 3);
  }
  for (auto _ : state) benchmark::DoNotOptimize(aggregate(records));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Aggregate)->Arg(1000)->Arg(10000);

}  // namespace
}  // namespace committee

BENCHMARK_MAIN();
