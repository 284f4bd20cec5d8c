// Prompt templates for proponents and the adjudicator.
//
// Templates use named-brace placeholders such as {question}. A brace that is
// not followed by an identifier and a closing brace is literal text, so JSON
// snippets can appear in a template unescaped. Rendering fails on any
// placeholder that has no value.
//
// Placeholders understood by the renderers:
//   {question}            the query as a JSON object ("question", "option 1", ...)
//   {question_text}       the bare question text
//   {options}             "option i: text" lines; a render error for free-form queries
//   {format_requirement}  the rendered structured-answer schema
//   {candidates_block}    adjudicator only: every candidate's answer and reason
// and inside format_requirement:
//   {answer_spec}, {confidence_spec}
// and inside redraft_text:
//   {diagnostic}

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "committee/domain.hpp"

namespace committee {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

enum class PromptRole { Proponent, Adjudicator };

struct PromptTemplate {
  PromptRole role = PromptRole::Proponent;
  std::string system_text;
  std::string user_template;
  std::string format_requirement;
  std::string redraft_text;

  friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

struct TemplateSet {
  PromptTemplate proponent;
  PromptTemplate adjudicator;
};

struct RenderOptions {
  bool confidence_enabled = false;
};

PromptTemplate default_proponent_template();
PromptTemplate default_adjudicator_template();
TemplateSet default_templates();

/// Substitutes every {name} in text. Throws RenderError naming the first
/// placeholder without a value.
std::string render_placeholders(std::string_view text,
                                const std::map<std::string, std::string, std::less<>>& values);

/// Names of all placeholders occurring in text, in order of appearance.
std::vector<std::string> placeholder_names(std::string_view text);

/// The query as a JSON object with "question" and "option i" keys.
std::string render_question_block(const Query& query);

std::string render_format_requirement(const PromptTemplate& tmpl, const Query& query,
                                      const RenderOptions& options);

/// System + user messages for one proponent.
std::vector<ChatMessage> render_proponent_prompt(const PromptTemplate& tmpl, const Query& query,
                                                 const RenderOptions& options = {});

std::string render_candidates_block(std::span<const ProponentResponse> candidates,
                                    const RenderOptions& options = {});

/// System + user messages for the adjudicator. Candidates must be non-empty
/// and Valid.
std::vector<ChatMessage> render_adjudicator_prompt(const PromptTemplate& tmpl, const Query& query,
                                                   std::span<const ProponentResponse> candidates,
                                                   const RenderOptions& options = {});

/// Feedback message sent after a rejected draft.
ChatMessage render_redraft_message(const PromptTemplate& tmpl, std::string_view diagnostic);

/// Throws ConfigError when a template lacks a required placeholder or uses an
/// unknown one.
void validate_template(const PromptTemplate& tmpl);

/// Reads a template override document keyed by role ("proponent",
/// "adjudicator"); absent fields keep their defaults.
TemplateSet load_templates(const std::string& path);
TemplateSet templates_from_json_text(std::string_view text);

}  // namespace committee
