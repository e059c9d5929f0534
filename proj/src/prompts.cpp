#include "errsynth/prompts.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "errsynth/error.hpp"
#include "errsynth/lexicon.hpp"
#include "errsynth/sampler.hpp"

namespace errsynth {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingTemplate, "missing template " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string_view template_slug(ErrorClass c) {
  switch (c) {
    case ErrorClass::AddMedicalDevice: return "add_medical_device";
    case ErrorClass::ChangeNameOfDevice: return "change_name_of_device";
    case ErrorClass::ChangePositionOfDevice: return "change_position_of_device";
    case ErrorClass::ChangeSeverity: return "change_severity";
    case ErrorClass::ChangeLocation: return "change_location";
    case ErrorClass::FalseNegation: return "false_negation";
    case ErrorClass::FalsePrediction: return "false_prediction";
    case ErrorClass::ChangeMeasurement: return "change_measurement";
    case ErrorClass::AddOppositeSentence: return "add_opposite_sentence";
    case ErrorClass::AddRepetitions: return "add_repetitions";
    case ErrorClass::ChangeToHomophone: return "change_to_homophone";
    case ErrorClass::AddTypo: return "add_typo";
    case ErrorClass::NotApplicable: return "not_applicable";
  }
  return "not_applicable";
}

bool is_priority(ErrorClass c) {
  return c == ErrorClass::FalsePrediction || c == ErrorClass::FalseNegation || c == ErrorClass::AddOppositeSentence;
}

TemplateStore TemplateStore::load(const std::filesystem::path& dir) {
  TemplateStore ts;
  ts.base_ = chomp(read_text(dir / "injection_base.txt"));
  ts.splice_ = chomp(read_text(dir / "splice.txt"));
  ts.label_ = chomp(read_text(dir / "label.txt"));
  for (ErrorClass c : kInjectableClasses) {
    auto path = dir / "errors" / (std::string(template_slug(c)) + ".txt");
    if (std::filesystem::exists(path)) ts.long_[c] = chomp(read_text(path));
  }
  auto baseline_path = dir / "baseline.json";
  if (std::filesystem::exists(baseline_path)) {
    try {
      auto j = nlohmann::json::parse(read_text(baseline_path));
      for (auto& [name, text] : j.items()) {
        auto c = parse_error_class(name);
        if (!c) throw Error(ErrorCode::ConfigError, "baseline.json: unknown class '" + name + "'");
        std::string t = text.get<std::string>();
        if (is_priority(*c)) t = "[priority error] " + t;
        ts.baseline_[*c] = std::move(t);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ConfigError, std::string("baseline.json: ") + e.what());
    }
  }
  return ts;
}

const TemplateStore& TemplateStore::builtin() {
  static const TemplateStore ts = load(default_asset_dir() / "prompts");
  return ts;
}

bool TemplateStore::has(ErrorClass c, PromptStyle style) const {
  const auto& m = style == PromptStyle::Long ? long_ : baseline_;
  return m.count(c) > 0;
}

std::string TemplateStore::error_prompt(ErrorClass c, PromptStyle style) const {
  const auto& m = style == PromptStyle::Long ? long_ : baseline_;
  auto it = m.find(c);
  if (it == m.end()) {
    throw Error(ErrorCode::MissingTemplate, "no template for " + std::string(display_name(c)));
  }
  return it->second;
}

void TemplateStore::set_error_prompt(ErrorClass c, PromptStyle style, std::string text) {
  auto& m = style == PromptStyle::Long ? long_ : baseline_;
  if (text.empty()) {
    m.erase(c);
  } else {
    m[c] = std::move(text);
  }
}

std::string PromptBundle::assembled() const { return system + "\n\n" + report_text; }

std::string strip_delimiters(std::string_view s) {
  static const std::regex re("<<<\\s*\\d*\\s*>>>|<<<|>>>");
  return std::regex_replace(std::string(s), re, "");
}

PromptBundle build_injection_prompt(const Report& report, const ErrorPlan& plan, const TemplateStore& templates,
                                    PromptStyle style) {
  if (templates.base().empty()) throw Error(ErrorCode::MissingTemplate, "base injection prompt is empty");
  PromptBundle b;
  auto classes = plan.classes();
  for (std::size_t i = 0; i < 3; ++i) {
    b.error_prompts[i] = strip_delimiters(templates.error_prompt(classes[i], style));
  }
  b.system = templates.base();
  for (std::size_t i = 0; i < 3; ++i) {
    std::string slot = "{{ERROR_" + std::to_string(i + 1) + "}}";
    if (b.system.find(slot) == std::string::npos) {
      throw Error(ErrorCode::MissingTemplate, "base prompt lacks slot " + slot);
    }
    // a trailing space keeps the next "<<<n>>>" off the instruction text
    replace_all(b.system, slot, b.error_prompts[i] + " ");
  }
  b.report_text = strip_delimiters(report.normalized);
  return b;
}

std::string build_splice_prompt(std::span<const std::string> original, std::span<const std::string> error,
                                const TemplateStore& templates) {
  std::string p = templates.splice();
  replace_all(p, "{{ORIGINAL_LENGTH}}", std::to_string(original.size()));
  replace_all(p, "{{ERROR_LENGTH}}", std::to_string(error.size()));
  std::string o = reassemble(original);
  std::string e = reassemble(error);
  // reports go in last so that braces inside them are never re-expanded
  replace_all(p, "{{ORIGINAL}}", "\x01");
  replace_all(p, "{{ERROR}}", "\x02");
  replace_all(p, "\x01", o);
  replace_all(p, "\x02", e);
  return p;
}

std::string build_label_prompt(const std::string& dictionary, const TemplateStore& templates) {
  std::string p = templates.label();
  replace_all(p, "{{DICTIONARY}}", dictionary);
  return p;
}

}  // namespace errsynth
