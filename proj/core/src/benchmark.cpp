#include "committee/benchmark.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

namespace committee {

namespace {

// "option 3", "Option 3: text" -> 3.
std::optional<int> option_number(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  constexpr std::string_view kPrefix = "option";
  if (text.size() - i < kPrefix.size()) return std::nullopt;
  for (std::size_t j = 0; j < kPrefix.size(); ++j) {
    if (std::tolower(static_cast<unsigned char>(text[i + j])) != kPrefix[j]) return std::nullopt;
  }
  i += kPrefix.size();
  while (i < text.size() && text[i] == ' ') ++i;
  const std::size_t start = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == start || i - start > 6) return std::nullopt;
  return std::stoi(std::string(text.substr(start, i - start)));
}

Query query_from_record(const std::string& key, const Json& record) {
  if (!record.is_object()) throw IngestError("record \"" + key + "\" is not an object");
  const auto question = record.find("question");
  if (question == record.end() || !question->is_string()) {
    throw IngestError("record \"" + key + "\" has no question text");
  }

  std::map<int, std::string> by_number;
  for (const auto& [field, value] : record.items()) {
    const auto number = option_number(field);
    if (!number || field.find(':') != std::string::npos) continue;
    if (!value.is_string()) {
      throw IngestError(fmt::format("record \"{}\": {} is not a string", key, field));
    }
    if (!by_number.emplace(*number, value.get<std::string>()).second) {
      throw IngestError(fmt::format("record \"{}\": option {} appears twice", key, *number));
    }
  }
  std::vector<std::string> options;
  for (const auto& [number, text] : by_number) {
    if (number != static_cast<int>(options.size()) + 1) {
      throw IngestError(fmt::format("record \"{}\": options are not numbered 1..k", key));
    }
    options.push_back(text);
  }

  std::optional<OptionId> truth;
  if (const auto answer = record.find("answer"); answer != record.end() && !answer->is_null()) {
    std::optional<int> number;
    if (answer->is_number_integer()) {
      number = answer->get<int>();
    } else if (answer->is_string()) {
      number = option_number(answer->get<std::string>());
    }
    if (!number) throw IngestError(fmt::format("record \"{}\": cannot read answer {}", key,
                                               answer->dump()));
    if (*number < 1 || *number > static_cast<int>(options.size())) {
      throw IngestError(fmt::format("record \"{}\": answer option {} does not exist ({} options)",
                                    key, *number, options.size()));
    }
    truth = OptionId{*number};
  }

  Category category = Category::other("unspecified");
  if (const auto label = record.find("category"); label != record.end() && label->is_string()) {
    category = Category::from_label(label->get<std::string>());
  }

  if (options.empty()) return Query::free_form(key, question->get<std::string>(), category);
  return Query::multiple_choice(key, question->get<std::string>(), options, category, truth);
}

}  // namespace

std::vector<Query> parse_corpus(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw IngestError(std::string("corpus is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IngestError("corpus must be an object keyed by question id");
  std::vector<Query> queries;
  queries.reserve(doc.size());
  for (const auto& [key, record] : doc.items()) {
    try {
      queries.push_back(query_from_record(key, record));
    } catch (const DomainError& e) {
      throw IngestError("record \"" + key + "\": " + e.what());
    }
  }
  return queries;
}

std::vector<Query> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open corpus " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str());
}

std::string serialize_corpus(std::span<const Query> queries) {
  Json doc = Json::object();
  for (const auto& query : queries) {
    Json record;
    record["question"] = query.text();
    for (const auto& option : query.options()) {
      record[fmt::format("option {}", option.id.value)] = option.text;
    }
    if (query.ground_truth()) {
      const auto& truth = query.options()[static_cast<std::size_t>(query.ground_truth()->value - 1)];
      record["answer"] = fmt::format("option {}: {}", truth.id.value, truth.text);
    }
    record["category"] = query.category().label();
    doc[query.id()] = std::move(record);
  }
  return doc.dump(2) + "\n";
}

std::vector<BenchmarkRecord> score(std::span<const QueryResult> results,
                                   std::span<const Query> corpus) {
  std::unordered_map<std::string, const Query*> by_id;
  for (const auto& query : corpus) by_id.emplace(query.id(), &query);

  std::vector<BenchmarkRecord> records;
  records.reserve(results.size());
  for (const auto& result : results) {
    const auto it = by_id.find(result.query_id);
    if (it == by_id.end()) throw ScoreError("query " + result.query_id + " is not in the corpus");
    const Query& query = *it->second;
    if (!query.ground_truth()) throw ScoreError("query " + query.id() + " has no ground truth");

    BenchmarkRecord record;
    record.query_id = query.id();
    record.category = query.category();
    record.ground_truth = *query.ground_truth();
    if (const auto* outcome = result.outcome()) {
      if (const auto* id = std::get_if<OptionId>(&outcome->final_answer)) record.predicted = *id;
      record.consensus_kind = outcome->consensus.kind;
      record.confidence_level = outcome->adjudicator_confidence;
      record.needs_human_review = outcome->needs_human_review;
    }
    record.correct = record.predicted && *record.predicted == record.ground_truth;
    records.push_back(std::move(record));
  }
  return records;
}

double CategoryStats::accuracy() const {
  if (n == 0) return 0.0;
  return 100.0 * static_cast<double>(n_correct) / static_cast<double>(n);
}

std::string_view to_string(ConfidenceBucket bucket) {
  switch (bucket) {
    case ConfidenceBucket::High: return "high";
    case ConfidenceBucket::Medium: return "medium";
    case ConfidenceBucket::Low: return "low";
    case ConfidenceBucket::Unrated: return "unrated";
  }
  return "unrated";
}

ConfidenceBucket bucket_of(const std::optional<ConfidenceLevel>& level) {
  if (!level) return ConfidenceBucket::Unrated;
  switch (*level) {
    case ConfidenceLevel::High: return ConfidenceBucket::High;
    case ConfidenceLevel::Medium: return ConfidenceBucket::Medium;
    case ConfidenceLevel::Low: return ConfidenceBucket::Low;
  }
  return ConfidenceBucket::Unrated;
}

double relative_improvement(double accuracy, double baseline) {
  if (!(baseline > 0.0)) throw AggregateError(fmt::format("baseline {} must be > 0", baseline));
  return 100.0 * (accuracy - baseline) / baseline;
}

void ScoreTally::add(const BenchmarkRecord& record) {
  if (record.correct != (record.predicted && *record.predicted == record.ground_truth)) {
    throw AggregateError("record " + record.query_id + " has an inconsistent correct flag");
  }
  per_category_[record.category].add(record.correct);
  per_confidence_[bucket_of(record.confidence_level)][record.category].add(record.correct);
  overall_.add(record.correct);
  if (record.needs_human_review) ++review_;
  any_confidence_ = any_confidence_ || record.confidence_level.has_value();
}

void ScoreTally::merge(const ScoreTally& other) {
  for (const auto& [category, stats] : other.per_category_) per_category_[category].merge(stats);
  for (const auto& [bucket, categories] : other.per_confidence_) {
    for (const auto& [category, stats] : categories) {
      per_confidence_[bucket][category].merge(stats);
    }
  }
  overall_.merge(other.overall_);
  review_ += other.review_;
  any_confidence_ = any_confidence_ || other.any_confidence_;
}

BenchmarkReport ScoreTally::report(std::string label,
                                   const std::map<std::string, double>& baselines) const {
  if (empty()) throw AggregateError("cannot aggregate an empty set of records");
  BenchmarkReport report;
  report.label = std::move(label);
  report.per_category = per_category_;
  report.overall = overall_;
  report.micro_accuracy = overall_.accuracy();
  double sum = 0.0;
  for (const auto& [category, stats] : per_category_) sum += stats.accuracy();
  report.macro_accuracy = sum / static_cast<double>(per_category_.size());
  if (any_confidence_) {
    report.per_confidence = per_confidence_;
    for (const auto& [bucket, categories] : per_confidence_) {
      auto& total = report.per_confidence_total[bucket];
      for (const auto& [category, stats] : categories) total.merge(stats);
    }
  }
  report.baselines = baselines;
  for (const auto& [name, baseline] : baselines) {
    report.improvement_vs[name] = relative_improvement(report.micro_accuracy, baseline);
  }
  report.needs_human_review = review_;
  return report;
}

BenchmarkReport aggregate(std::span<const BenchmarkRecord> records,
                          const std::map<std::string, double>& baselines, std::string label) {
  ScoreTally tally;
  for (const auto& record : records) tally.add(record);
  return tally.report(std::move(label), baselines);
}

}  // namespace committee
