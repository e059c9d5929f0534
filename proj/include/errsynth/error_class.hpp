#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace errsynth {

/// The twelve injectable error classes plus the labeling-only NotApplicable.
///
/// Numeric values follow the 1..13 labeling scheme used in dataset rows and
/// in the sentence-labeling prompt.
enum class ErrorClass : std::uint8_t {
  AddMedicalDevice = 1,
  ChangeNameOfDevice = 2,
  ChangePositionOfDevice = 3,
  ChangeSeverity = 4,
  ChangeLocation = 5,
  FalseNegation = 6,
  FalsePrediction = 7,
  ChangeMeasurement = 8,
  AddOppositeSentence = 9,
  AddRepetitions = 10,
  ChangeToHomophone = 11,
  AddTypo = 12,
  NotApplicable = 13,
};

enum class Category { ContentAddition, LinguisticQuality, ContextDependent, None };

enum class Tag : std::uint8_t { Device = 0, Measurement = 1, Location = 2, Severity = 3 };

inline constexpr std::array<Tag, 4> kAllTags = {Tag::Device, Tag::Measurement, Tag::Location,
                                                Tag::Severity};

inline constexpr std::array<ErrorClass, 12> kInjectableClasses = {
    ErrorClass::AddMedicalDevice,    ErrorClass::ChangeNameOfDevice,
    ErrorClass::ChangePositionOfDevice, ErrorClass::ChangeSeverity,
    ErrorClass::ChangeLocation,      ErrorClass::FalsePrediction,
    ErrorClass::FalseNegation,       ErrorClass::ChangeMeasurement,
    ErrorClass::AddOppositeSentence, ErrorClass::AddRepetitions,
    ErrorClass::ChangeToHomophone,   ErrorClass::AddTypo,
};

inline constexpr std::array<ErrorClass, 3> kContentAddition = {
    ErrorClass::AddMedicalDevice, ErrorClass::FalsePrediction, ErrorClass::FalseNegation};

inline constexpr std::array<ErrorClass, 4> kLinguisticQuality = {
    ErrorClass::AddOppositeSentence, ErrorClass::AddRepetitions, ErrorClass::ChangeToHomophone,
    ErrorClass::AddTypo};

inline constexpr std::array<ErrorClass, 5> kContextDependent = {
    ErrorClass::ChangeNameOfDevice, ErrorClass::ChangePositionOfDevice, ErrorClass::ChangeSeverity,
    ErrorClass::ChangeLocation, ErrorClass::ChangeMeasurement};

/// Classes an added sentence (no original counterpart) may carry.
inline constexpr std::array<ErrorClass, 4> kAddedSentenceClasses = {
    ErrorClass::AddMedicalDevice, ErrorClass::FalsePrediction, ErrorClass::AddOppositeSentence,
    ErrorClass::AddRepetitions};

Category category_of(ErrorClass c);

/// Tag a context-dependent class requires; nullopt for the other classes.
std::optional<Tag> required_tag(ErrorClass c);

/// Number of context-dependent classes gated by a tag.
int context_error_count(Tag t);

/// Display name, e.g. "Change Position of Device".
std::string_view display_name(ErrorClass c);

/// Identifier-style name, e.g. "ChangePositionOfDevice".
std::string_view enum_name(ErrorClass c);

int class_code(ErrorClass c);

/// Accepts display names, identifier names, numeric codes and the long-form
/// aliases used by the labeling prompt ("Change Already Present Severity").
std::optional<ErrorClass> parse_error_class(std::string_view text);

std::optional<ErrorClass> class_from_code(int code);

std::string_view tag_name(Tag t);
std::optional<Tag> parse_tag(std::string_view text);

}  // namespace errsynth
