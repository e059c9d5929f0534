#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errsynth/lexicon.hpp"
#include "errsynth/prompts.hpp"
#include "errsynth/report.hpp"
#include "errsynth/sampler.hpp"
#include "errsynth/splice.hpp"

namespace errsynth {

class LlmClient;
class AuditLog;

struct InjectionResult {
  std::string error_text;
  std::vector<std::string> error_sentences;
  /// One entry per error-report sentence. Exact for the rule backend; parsed
  /// from the trailing dictionary for the LLM backend when it is readable.
  std::optional<std::vector<DeclaredChange>> declared;
  std::string backend;  // "rules" or "llm"
  ErrorPlan plan;
  bool flagged = false;
  std::vector<std::string> violations;
  std::string raw_response;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Structural checks on an injection: something changed, the sentence count
/// moved by -2..+3, no prompt delimiters leaked, declared indices in range.
ValidationReport validate_injection(const Report& original, const InjectionResult& result);

/// Applies each planned class once at a uniformly drawn site, one error per
/// sentence. Every placement is re-checked end to end (re-split, alignment
/// and labeling recover it), so `declared` is ground truth.
/// Throws Error(NoEligibleSite) naming the class that could not be placed.
InjectionResult inject_with_rules(const Report& report, const ErrorPlan& plan, std::uint64_t seed,
                                  const Lexicon& lex = Lexicon::builtin());

enum class ValidationPolicy { KeepWithFlag, Reject };

struct LlmInjectOptions {
  PromptStyle style = PromptStyle::Long;
  double temperature = 0.7;
  ValidationPolicy policy = ValidationPolicy::KeepWithFlag;
  AuditLog* audit = nullptr;
};

/// Sends the assembled prompt, reads "report text, blank line, trailing
/// dictionary", strips leaked delimiters and validates.
/// Throws Error(BackendUnavailable), Error(UnparseableResponse) or, under
/// ValidationPolicy::Reject, Error(ValidationFailed).
InjectionResult inject_with_llm(const Report& report, const ErrorPlan& plan, LlmClient& client,
                                const TemplateStore& templates, const LlmInjectOptions& options = {});

/// Reads the {error index : [label, explanation, original index]} dictionary.
/// Returns nullopt when it is not in that shape.
std::optional<std::vector<DeclaredChange>> declared_from_dictionary(const py::Value& dict);

}  // namespace errsynth
