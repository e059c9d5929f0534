#include "errsynth/error_class.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>

#include "errsynth/error.hpp"

namespace errsynth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyReport: return "EmptyReport";
    case ErrorCode::NonContiguousIndices: return "NonContiguousIndices";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::InconsistentPlan: return "InconsistentPlan";
    case ErrorCode::MissingTemplate: return "MissingTemplate";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::UnparseableResponse: return "UnparseableResponse";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::NoEligibleSite: return "NoEligibleSite";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::AbortedSession: return "AbortedSession";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Category category_of(ErrorClass c) {
  switch (c) {
    case ErrorClass::AddMedicalDevice:
    case ErrorClass::FalsePrediction:
    case ErrorClass::FalseNegation:
      return Category::ContentAddition;
    case ErrorClass::AddOppositeSentence:
    case ErrorClass::AddRepetitions:
    case ErrorClass::ChangeToHomophone:
    case ErrorClass::AddTypo:
      return Category::LinguisticQuality;
    case ErrorClass::ChangeNameOfDevice:
    case ErrorClass::ChangePositionOfDevice:
    case ErrorClass::ChangeSeverity:
    case ErrorClass::ChangeLocation:
    case ErrorClass::ChangeMeasurement:
      return Category::ContextDependent;
    case ErrorClass::NotApplicable:
      return Category::None;
  }
  return Category::None;
}

std::optional<Tag> required_tag(ErrorClass c) {
  switch (c) {
    case ErrorClass::ChangeNameOfDevice:
    case ErrorClass::ChangePositionOfDevice:
      return Tag::Device;
    case ErrorClass::ChangeSeverity: return Tag::Severity;
    case ErrorClass::ChangeLocation: return Tag::Location;
    case ErrorClass::ChangeMeasurement: return Tag::Measurement;
    default: return std::nullopt;
  }
}

int context_error_count(Tag t) {
  int n = 0;
  for (ErrorClass c : kContextDependent) {
    if (required_tag(c) == t) ++n;
  }
  return n;
}

std::string_view display_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::AddMedicalDevice: return "Add Medical Device";
    case ErrorClass::ChangeNameOfDevice: return "Change Name of Device";
    case ErrorClass::ChangePositionOfDevice: return "Change Position of Device";
    case ErrorClass::ChangeSeverity: return "Change Severity";
    case ErrorClass::ChangeLocation: return "Change Location";
    case ErrorClass::FalseNegation: return "False Negation";
    case ErrorClass::FalsePrediction: return "False Prediction";
    case ErrorClass::ChangeMeasurement: return "Change Measurement";
    case ErrorClass::AddOppositeSentence: return "Add Opposite Sentence";
    case ErrorClass::AddRepetitions: return "Add Repetitions";
    case ErrorClass::ChangeToHomophone: return "Change to Homophone";
    case ErrorClass::AddTypo: return "Add Typo";
    case ErrorClass::NotApplicable: return "Not Applicable";
  }
  return "Not Applicable";
}

std::string_view enum_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::AddMedicalDevice: return "AddMedicalDevice";
    case ErrorClass::ChangeNameOfDevice: return "ChangeNameOfDevice";
    case ErrorClass::ChangePositionOfDevice: return "ChangePositionOfDevice";
    case ErrorClass::ChangeSeverity: return "ChangeSeverity";
    case ErrorClass::ChangeLocation: return "ChangeLocation";
    case ErrorClass::FalseNegation: return "FalseNegation";
    case ErrorClass::FalsePrediction: return "FalsePrediction";
    case ErrorClass::ChangeMeasurement: return "ChangeMeasurement";
    case ErrorClass::AddOppositeSentence: return "AddOppositeSentence";
    case ErrorClass::AddRepetitions: return "AddRepetitions";
    case ErrorClass::ChangeToHomophone: return "ChangeToHomophone";
    case ErrorClass::AddTypo: return "AddTypo";
    case ErrorClass::NotApplicable: return "NotApplicable";
  }
  return "NotApplicable";
}

int class_code(ErrorClass c) { return static_cast<int>(c); }

std::optional<ErrorClass> class_from_code(int code) {
  if (code < 1 || code > 13) return std::nullopt;
  return static_cast<ErrorClass>(code);
}

namespace {

// Lowercase and keep only letters/digits so that "Change to Homophone",
// "change_to_homophone" and "ChangeToHomophone" compare equal.
std::string squash(std::string_view s) {
  std::string out;
  for (char ch : s) {
    auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

struct Alias {
  std::string_view text;
  ErrorClass cls;
};

constexpr Alias kAliases[] = {
    {"Change Name of Already Present Device", ErrorClass::ChangeNameOfDevice},
    {"Change Position of Already Present Device", ErrorClass::ChangePositionOfDevice},
    {"Change Already Present Severity", ErrorClass::ChangeSeverity},
    {"Add Contradictions", ErrorClass::AddOppositeSentence},
    {"Add Contradiction", ErrorClass::AddOppositeSentence},
    {"Add Medical Devices", ErrorClass::AddMedicalDevice},
    {"Add Repetition", ErrorClass::AddRepetitions},
    {"Add False Predictions", ErrorClass::FalsePrediction},
    {"Not applicable", ErrorClass::NotApplicable},
    {"NA", ErrorClass::NotApplicable},
};

}  // namespace

std::optional<ErrorClass> parse_error_class(std::string_view text) {
  std::string key = squash(text);
  if (key.empty()) return std::nullopt;
  if (std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    int code = 0;
    auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), code);
    if (ec != std::errc()) return std::nullopt;
    return class_from_code(code);
  }
  for (int code = 1; code <= 13; ++code) {
    auto c = static_cast<ErrorClass>(code);
    if (key == squash(display_name(c)) || key == squash(enum_name(c))) return c;
  }
  for (const auto& a : kAliases) {
    if (key == squash(a.text)) return a.cls;
  }
  return std::nullopt;
}

std::string_view tag_name(Tag t) {
  switch (t) {
    case Tag::Device: return "device";
    case Tag::Measurement: return "measurement";
    case Tag::Location: return "location";
    case Tag::Severity: return "severity";
  }
  return "device";
}

std::optional<Tag> parse_tag(std::string_view text) {
  std::string key = squash(text);
  for (Tag t : kAllTags) {
    if (key == tag_name(t)) return t;
  }
  return std::nullopt;
}

}  // namespace errsynth
