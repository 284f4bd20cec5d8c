#include <algorithm>

#include <fmt/format.h>

#include "committee/benchmark.hpp"

namespace committee {

namespace {

constexpr int kValueWidth = 5;

std::string cell(const CategoryStats& stats) {
  if (stats.n == 0) return fmt::format("{:>{}}", "-", kValueWidth);
  return fmt::format("{:>{}.2f}", stats.accuracy(), kValueWidth);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

Json stats_json(const CategoryStats& stats) {
  Json out;
  out["n"] = stats.n;
  out["n_correct"] = stats.n_correct;
  out["accuracy"] = stats.accuracy();
  return out;
}

std::string render_table(const BenchmarkReport& report) {
  std::vector<Category> columns;
  for (const auto& [category, stats] : report.per_category) columns.push_back(category);

  std::size_t label_width = std::max<std::size_t>(report.label.size(), 5);
  std::string out = fmt::format("{:<{}}", "Model", label_width);
  for (const auto& category : columns) {
    out += fmt::format(" {:>{}}", category.abbreviation(), kValueWidth);
  }
  out += fmt::format(" {:>{}}\n", "Avg.", kValueWidth);

  out += fmt::format("{:<{}}", report.label, label_width);
  for (const auto& category : columns) out += " " + cell(report.per_category.at(category));
  out += fmt::format(" {:>{}.2f}\n", report.micro_accuracy, kValueWidth);

  out += fmt::format("\nQuestions: {} ({} correct)\n", report.overall.n, report.overall.n_correct);
  out += fmt::format("Macro average: {:.2f}\n", report.macro_accuracy);
  if (report.needs_human_review > 0) {
    out += fmt::format("Flagged for human review: {}\n", report.needs_human_review);
  }
  for (const auto& [name, gain] : report.improvement_vs) {
    out += fmt::format("Improvement vs {} ({:.2f}): {:+.2f}%\n", name, report.baselines.at(name),
                       gain);
  }

  if (!report.per_confidence.empty()) {
    constexpr int kLevelWidth = 10;
    out += "\nAccuracy by adjudicator confidence\n";
    out += fmt::format("{:<{}}", "Level", kLevelWidth);
    for (const auto& category : columns) {
      out += fmt::format(" {:>{}}", category.abbreviation(), kValueWidth);
    }
    out += fmt::format(" {:>{}} {:>6}\n", "All", kValueWidth, "n");
    for (const auto& [bucket, categories] : report.per_confidence) {
      out += fmt::format("{:<{}}", to_string(bucket), kLevelWidth);
      for (const auto& category : columns) {
        const auto it = categories.find(category);
        out += " " + cell(it == categories.end() ? CategoryStats{} : it->second);
      }
      const auto& total = report.per_confidence_total.at(bucket);
      out += fmt::format(" {} {:>6}\n", cell(total), total.n);
    }
  }
  return out;
}

std::string render_csv(const BenchmarkReport& report) {
  std::string out = "category,confidence,n,n_correct,accuracy\n";
  auto row = [&](const std::string& category, std::string_view level, const CategoryStats& stats) {
    out += fmt::format("{},{},{},{},{:.4f}\n", csv_field(category), level, stats.n,
                       stats.n_correct, stats.accuracy());
  };
  for (const auto& [category, stats] : report.per_category) {
    row(category.label(), "all", stats);
    for (const auto& [bucket, categories] : report.per_confidence) {
      const auto it = categories.find(category);
      row(category.label(), to_string(bucket), it == categories.end() ? CategoryStats{} : it->second);
    }
  }
  row("All", "all", report.overall);
  for (const auto& [bucket, stats] : report.per_confidence_total) {
    row("All", to_string(bucket), stats);
  }
  return out;
}

std::string render_json(const BenchmarkReport& report) {
  Json out;
  out["label"] = report.label;
  out["n"] = report.overall.n;
  out["n_correct"] = report.overall.n_correct;
  out["micro_accuracy"] = report.micro_accuracy;
  out["macro_accuracy"] = report.macro_accuracy;
  out["needs_human_review"] = report.needs_human_review;
  Json categories = Json::array();
  for (const auto& [category, stats] : report.per_category) {
    Json entry;
    entry["category"] = category.label();
    entry["abbreviation"] = category.abbreviation();
    entry.update(stats_json(stats));
    categories.push_back(std::move(entry));
  }
  out["per_category"] = std::move(categories);
  Json confidence = Json::object();
  for (const auto& [bucket, per_category] : report.per_confidence) {
    Json level;
    level["overall"] = stats_json(report.per_confidence_total.at(bucket));
    Json entries = Json::array();
    for (const auto& [category, stats] : per_category) {
      Json entry;
      entry["category"] = category.label();
      entry.update(stats_json(stats));
      entries.push_back(std::move(entry));
    }
    level["per_category"] = std::move(entries);
    confidence[std::string(to_string(bucket))] = std::move(level);
  }
  out["per_confidence"] = std::move(confidence);
  Json improvements = Json::object();
  for (const auto& [name, gain] : report.improvement_vs) {
    Json entry;
    entry["baseline"] = report.baselines.at(name);
    entry["relative_gain_percent"] = gain;
    improvements[name] = std::move(entry);
  }
  out["improvement_vs"] = std::move(improvements);
  return out.dump(2) + "\n";
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view token) {
  if (token == "json") return ReportFormat::Json;
  if (token == "csv") return ReportFormat::Csv;
  if (token == "table" || token == "text-table" || token == "txt") return ReportFormat::Table;
  return std::nullopt;
}

std::string_view file_extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Table: return "txt";
  }
  return "txt";
}

std::string emit_report(const BenchmarkReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Table: return render_table(report);
  }
  return render_table(report);
}

}  // namespace committee
