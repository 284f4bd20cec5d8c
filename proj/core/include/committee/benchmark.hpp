// Multiple-choice benchmark harness: corpus ingestion, exact-match scoring,
// per-category aggregation and report rendering.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "committee/domain.hpp"
#include "committee/orchestrator.hpp"

namespace committee {

/// Reads a keyed-record corpus:
///   {"question 0": {"question": "...", "option 1": "...", ..., "answer": "option 3: ...",
///                   "explanation": "...", "category": "Research publications"}, ...}
/// Records keep file order; the record key becomes the query id. Empty input
/// yields an empty corpus. Throws IngestError naming the offending record.
std::vector<Query> load_corpus(const std::filesystem::path& path);
std::vector<Query> parse_corpus(std::string_view text);

/// Writes queries back in the same keyed-record format.
std::string serialize_corpus(std::span<const Query> queries);

struct BenchmarkRecord {
  std::string query_id;
  Category category;
  OptionId ground_truth;
  std::optional<OptionId> predicted;
  bool correct = false;
  std::optional<ConsensusKind> consensus_kind;
  std::optional<ConfidenceLevel> confidence_level;
  bool needs_human_review = false;

  friend bool operator==(const BenchmarkRecord&, const BenchmarkRecord&) = default;
};

/// One record per result, exact-match scored. Failed queries score as wrong
/// with no prediction. Throws ScoreError for ids missing from the corpus or
/// corpus entries without ground truth.
std::vector<BenchmarkRecord> score(std::span<const QueryResult> results,
                                   std::span<const Query> corpus);

struct CategoryStats {
  long long n = 0;
  long long n_correct = 0;

  /// 100 * n_correct / n; 0 when n == 0.
  double accuracy() const;
  void add(bool correct) {
    ++n;
    if (correct) ++n_correct;
  }
  void merge(const CategoryStats& other) {
    n += other.n;
    n_correct += other.n_correct;
  }

  friend bool operator==(const CategoryStats&, const CategoryStats&) = default;
};

enum class ConfidenceBucket { High, Medium, Low, Unrated };

std::string_view to_string(ConfidenceBucket bucket);
ConfidenceBucket bucket_of(const std::optional<ConfidenceLevel>& level);

struct BenchmarkReport {
  std::string label = "committee";
  /// Ordered Le, RO, RP, SO, SS, then other categories by label.
  std::map<Category, CategoryStats> per_category;
  CategoryStats overall;
  double micro_accuracy = 0.0;
  double macro_accuracy = 0.0;
  /// Present when any record carries a confidence level; records without one
  /// land in Unrated so the buckets partition the run.
  std::map<ConfidenceBucket, std::map<Category, CategoryStats>> per_confidence;
  std::map<ConfidenceBucket, CategoryStats> per_confidence_total;
  std::map<std::string, double> baselines;
  std::map<std::string, double> improvement_vs;
  long long needs_human_review = 0;
};

/// 100 * (accuracy - baseline) / baseline. Throws AggregateError unless baseline > 0.
double relative_improvement(double accuracy, double baseline);

/// Integer counts, mergeable in any order; accuracies are computed once in
/// report().
class ScoreTally {
 public:
  void add(const BenchmarkRecord& record);
  void merge(const ScoreTally& other);
  bool empty() const { return overall_.n == 0; }

  /// Throws AggregateError when empty.
  BenchmarkReport report(std::string label = "committee",
                         const std::map<std::string, double>& baselines = {}) const;

 private:
  std::map<Category, CategoryStats> per_category_;
  std::map<ConfidenceBucket, std::map<Category, CategoryStats>> per_confidence_;
  CategoryStats overall_;
  long long review_ = 0;
  bool any_confidence_ = false;
};

BenchmarkReport aggregate(std::span<const BenchmarkRecord> records,
                          const std::map<std::string, double>& baselines = {},
                          std::string label = "committee");

enum class ReportFormat { Json, Csv, Table };

std::optional<ReportFormat> parse_report_format(std::string_view token);
std::string_view file_extension(ReportFormat format);

/// Deterministic rendering. The table mirrors the per-category accuracy
/// layout (Le RO RP SO SS Avg.) followed by a confidence x category grid when
/// confidence levels are present; csv has one row per category per
/// confidence level.
std::string emit_report(const BenchmarkReport& report, ReportFormat format);

}  // namespace committee
