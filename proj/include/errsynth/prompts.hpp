#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "errsynth/error_class.hpp"
#include "errsynth/report.hpp"

namespace errsynth {

struct ErrorPlan;

enum class PromptStyle { Long, Baseline };

/// Prompt text shipped under assets/prompts.
///
///   injection_base.txt    base prompt with {{ERROR_1..3}} slots
///   errors/<slug>.txt     long-form instruction per class
///   baseline.json         one-line instruction per class
///   splice.txt, label.txt sentence splicing / labeling prompts
class TemplateStore {
 public:
  static TemplateStore load(const std::filesystem::path& dir);
  static const TemplateStore& builtin();

  const std::string& base() const { return base_; }
  const std::string& splice() const { return splice_; }
  const std::string& label() const { return label_; }

  /// Throws Error(MissingTemplate).
  std::string error_prompt(ErrorClass c, PromptStyle style = PromptStyle::Long) const;
  bool has(ErrorClass c, PromptStyle style) const;

  void set_error_prompt(ErrorClass c, PromptStyle style, std::string text);

 private:
  std::string base_;
  std::string splice_;
  std::string label_;
  std::map<ErrorClass, std::string> long_;
  std::map<ErrorClass, std::string> baseline_;
};

/// File stem used for a class under errors/, e.g. "false_negation".
std::string_view template_slug(ErrorClass c);

/// Classes whose instruction carries the "[priority error]" marker.
bool is_priority(ErrorClass c);

struct PromptBundle {
  std::string system;                     // base prompt with the three slots filled
  std::array<std::string, 3> error_prompts;  // context, content, linguistic
  std::string report_text;

  /// system, a blank line, then the report.
  std::string assembled() const;
};

/// Throws Error(MissingTemplate).
PromptBundle build_injection_prompt(const Report& report, const ErrorPlan& plan, const TemplateStore& templates,
                                    PromptStyle style = PromptStyle::Long);

std::string build_splice_prompt(std::span<const std::string> original, std::span<const std::string> error,
                                const TemplateStore& templates);

/// `dictionary` is the rendered {original : error} mapping.
std::string build_label_prompt(const std::string& dictionary, const TemplateStore& templates);

/// Removes "<<<", ">>>" and any "<<<n>>>" marker.
std::string strip_delimiters(std::string_view s);

}  // namespace errsynth
