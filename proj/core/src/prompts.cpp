#include "committee/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "committee/serialization.hpp"

namespace committee {

namespace {

constexpr std::string_view kProponentSystem =
    "You are an expert in an telecommunication technical committee. Your role is to give "
    "suggestion to the adjudicator who make final decisions.";

constexpr std::string_view kProponentUser =
    "Please provide the answers to the following telecommunications related questions. The "
    "questions will be in a JSON format, the answers must also be in a JSON format as follows:\n"
    "{format_requirement}\n"
    "Question: {question}";

constexpr std::string_view kAdjudicatorSystem =
    "You are an expert in telecommunication field, good at analyzing and giving answers to "
    "complicated questions.";

constexpr std::string_view kAdjudicatorUser =
    "Based on the information given below, answers the question in the telecommunication "
    "field.\n"
    "Question: {question}\n"
    "Answer by each model and reason:\n"
    "{candidates_block}\n"
    "Analyse the information given, and give your answer.\n"
    "Respond in JSON with the following structure:\n"
    "{format_requirement}";

constexpr std::string_view kFormatRequirement =
    R"({"answer": {answer_spec}, "reason": "<the reasoning that supports your answer>"{confidence_spec}})";

constexpr std::string_view kRedraft =
    "Your previous response did not pass the automatic quality check: {diagnostic}. Please "
    "redraft and resubmit your answer as a single JSON object in the required format.";

constexpr std::string_view kChoiceAnswerSpec = "<the number of the selected option, an integer>";
constexpr std::string_view kFreeAnswerSpec = "\"<your answer>\"";
constexpr std::string_view kConfidenceSpec =
    R"(, "confidence": <your certainty in the answer, a number from 0 to 100>)";

bool is_ident_start(char c) {
  return std::islower(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

// Length of the identifier placeholder starting at text[pos] == '{', or 0.
std::size_t placeholder_length(std::string_view text, std::size_t pos) {
  std::size_t i = pos + 1;
  if (i >= text.size() || !is_ident_start(text[i])) return 0;
  while (i < text.size() && is_ident_char(text[i])) ++i;
  if (i >= text.size() || text[i] != '}') return 0;
  return i - pos + 1;
}

std::string answer_text(const Answer& answer) {
  if (const auto* id = std::get_if<OptionId>(&answer)) return fmt::format("option {}", id->value);
  return std::get<std::string>(answer);
}

using Values = std::map<std::string, std::string, std::less<>>;

Values query_values(const Query& query) {
  Values values;
  values["question"] = render_question_block(query);
  values["question_text"] = query.text();
  if (query.is_multiple_choice()) {
    std::string lines;
    for (const auto& option : query.options()) {
      if (!lines.empty()) lines += '\n';
      lines += fmt::format("option {}: {}", option.id.value, option.text);
    }
    values["options"] = std::move(lines);
  }
  return values;
}

std::string render_user(const PromptTemplate& tmpl, const Values& values, const Query& query) {
  try {
    return render_placeholders(tmpl.user_template, values);
  } catch (const RenderError& e) {
    if (!query.is_multiple_choice() && tmpl.user_template.find("{options}") != std::string::npos) {
      throw RenderError("query " + query.id() + " is free-form but the template requires options");
    }
    throw;
  }
}

void check_query(const Query& query) {
  if (is_blank(query.text())) throw RenderError("query " + query.id() + " has empty text");
}

const char* role_key(PromptRole role) {
  return role == PromptRole::Proponent ? "proponent" : "adjudicator";
}

void apply_overrides(PromptTemplate& tmpl, const Json& doc) {
  if (!doc.is_object()) throw ConfigError(std::string(role_key(tmpl.role)) + " must be an object");
  auto field = [&](const char* key, std::string& target) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_string()) {
      throw ConfigError(fmt::format("{}.{} must be a string", role_key(tmpl.role), key));
    }
    target = doc.at(key).get<std::string>();
  };
  field("system_text", tmpl.system_text);
  field("user_template", tmpl.user_template);
  field("format_requirement", tmpl.format_requirement);
  field("redraft_text", tmpl.redraft_text);
}

}  // namespace

PromptTemplate default_proponent_template() {
  return {PromptRole::Proponent, std::string(kProponentSystem), std::string(kProponentUser),
          std::string(kFormatRequirement), std::string(kRedraft)};
}

PromptTemplate default_adjudicator_template() {
  return {PromptRole::Adjudicator, std::string(kAdjudicatorSystem),
          std::string(kAdjudicatorUser), std::string(kFormatRequirement), std::string(kRedraft)};
}

TemplateSet default_templates() {
  return {default_proponent_template(), default_adjudicator_template()};
}

std::string render_placeholders(std::string_view text, const Values& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t brace = text.find('{', pos);
    if (brace == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, brace - pos));
    const std::size_t len = placeholder_length(text, brace);
    if (len == 0) {
      out.push_back('{');
      pos = brace + 1;
      continue;
    }
    const auto name = text.substr(brace + 1, len - 2);
    const auto it = values.find(name);
    if (it == values.end()) {
      throw RenderError(fmt::format("unsubstituted placeholder {{{}}}", name));
    }
    out.append(it->second);
    pos = brace + len;
  }
  return out;
}

std::vector<std::string> placeholder_names(std::string_view text) {
  std::vector<std::string> names;
  for (std::size_t pos = text.find('{'); pos != std::string_view::npos;
       pos = text.find('{', pos + 1)) {
    if (const auto len = placeholder_length(text, pos)) {
      names.emplace_back(text.substr(pos + 1, len - 2));
    }
  }
  return names;
}

std::string render_question_block(const Query& query) {
  Json block;
  block["question"] = query.text();
  for (const auto& option : query.options()) {
    block[fmt::format("option {}", option.id.value)] = option.text;
  }
  return block.dump(2);
}

std::string render_format_requirement(const PromptTemplate& tmpl, const Query& query,
                                      const RenderOptions& options) {
  Values values;
  values["answer_spec"] =
      std::string(query.is_multiple_choice() ? kChoiceAnswerSpec : kFreeAnswerSpec);
  values["confidence_spec"] = options.confidence_enabled ? std::string(kConfidenceSpec) : "";
  return render_placeholders(tmpl.format_requirement, values);
}

std::vector<ChatMessage> render_proponent_prompt(const PromptTemplate& tmpl, const Query& query,
                                                 const RenderOptions& options) {
  if (tmpl.role != PromptRole::Proponent) {
    throw RenderError("render_proponent_prompt requires a proponent template");
  }
  check_query(query);
  Values values = query_values(query);
  values["format_requirement"] = render_format_requirement(tmpl, query, options);
  return {{"system", tmpl.system_text}, {"user", render_user(tmpl, values, query)}};
}

std::string render_candidates_block(std::span<const ProponentResponse> candidates,
                                    const RenderOptions& options) {
  std::string block;
  int index = 1;
  for (const auto& candidate : candidates) {
    if (!block.empty()) block += '\n';
    block += fmt::format("{}: {}", candidate.proponent_id, answer_text(candidate.answer));
    if (options.confidence_enabled && candidate.confidence_level) {
      block += fmt::format(" (confidence: {})", to_string(*candidate.confidence_level));
    }
    block += fmt::format("\nReason {}: {}", index++, candidate.reason);
  }
  return block;
}

std::vector<ChatMessage> render_adjudicator_prompt(const PromptTemplate& tmpl, const Query& query,
                                                   std::span<const ProponentResponse> candidates,
                                                   const RenderOptions& options) {
  if (tmpl.role != PromptRole::Adjudicator) {
    throw RenderError("render_adjudicator_prompt requires an adjudicator template");
  }
  if (candidates.empty()) throw RenderError("adjudicator prompt needs at least one candidate");
  for (const auto& candidate : candidates) {
    if (!candidate.is_valid()) {
      throw RenderError("candidate from " + candidate.proponent_id + " is not valid");
    }
  }
  check_query(query);
  Values values = query_values(query);
  values["format_requirement"] = render_format_requirement(tmpl, query, options);
  values["candidates_block"] = render_candidates_block(candidates, options);
  return {{"system", tmpl.system_text}, {"user", render_user(tmpl, values, query)}};
}

ChatMessage render_redraft_message(const PromptTemplate& tmpl, std::string_view diagnostic) {
  Values values;
  values["diagnostic"] = std::string(diagnostic);
  return {"user", render_placeholders(tmpl.redraft_text, values)};
}

void validate_template(const PromptTemplate& tmpl) {
  const std::string role = role_key(tmpl.role);
  auto check = [&](std::string_view field, std::string_view text,
                   const std::set<std::string, std::less<>>& allowed,
                   const std::vector<std::string_view>& required) {
    const auto names = placeholder_names(text);
    for (const auto& name : names) {
      if (!allowed.contains(name)) {
        throw ConfigError(fmt::format("{}.{}: unknown placeholder {{{}}}", role, field, name));
      }
    }
    for (auto name : required) {
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw ConfigError(fmt::format("{}.{}: missing placeholder {{{}}}", role, field, name));
      }
    }
  };
  std::set<std::string, std::less<>> user_allowed{"question", "question_text", "options",
                                                  "format_requirement"};
  std::vector<std::string_view> user_required{"format_requirement"};
  if (tmpl.role == PromptRole::Adjudicator) {
    user_allowed.insert("candidates_block");
    user_required.push_back("candidates_block");
  }
  check("user_template", tmpl.user_template, user_allowed, user_required);
  const auto names = placeholder_names(tmpl.user_template);
  if (std::find(names.begin(), names.end(), "question") == names.end() &&
      std::find(names.begin(), names.end(), "question_text") == names.end()) {
    throw ConfigError(role + ".user_template: missing placeholder {question}");
  }
  check("format_requirement", tmpl.format_requirement, {"answer_spec", "confidence_spec"}, {});
  check("redraft_text", tmpl.redraft_text, {"diagnostic"}, {});
  check("system_text", tmpl.system_text, {}, {});
}

TemplateSet templates_from_json_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("template file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("template file must be an object keyed by role");
  TemplateSet set = default_templates();
  for (const auto& [key, value] : doc.items()) {
    if (key == "proponent") {
      apply_overrides(set.proponent, value);
    } else if (key == "adjudicator") {
      apply_overrides(set.adjudicator, value);
    } else {
      throw ConfigError("unknown template role \"" + key + "\"");
    }
  }
  validate_template(set.proponent);
  validate_template(set.adjudicator);
  return set;
}

TemplateSet load_templates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open template file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return templates_from_json_text(buffer.str());
}

}  // namespace committee
