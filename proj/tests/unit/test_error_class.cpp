#include <doctest.h>

#include <set>

#include "errsynth/error_class.hpp"

using namespace errsynth;

TEST_CASE("category membership") {
  CHECK(kContentAddition.size() == 3);
  CHECK(kLinguisticQuality.size() == 4);
  CHECK(kContextDependent.size() == 5);
  std::set<ErrorClass> all;
  for (ErrorClass c : kContentAddition) {
    CHECK(category_of(c) == Category::ContentAddition);
    all.insert(c);
  }
  for (ErrorClass c : kLinguisticQuality) {
    CHECK(category_of(c) == Category::LinguisticQuality);
    all.insert(c);
  }
  for (ErrorClass c : kContextDependent) {
    CHECK(category_of(c) == Category::ContextDependent);
    all.insert(c);
  }
  CHECK(all.size() == 12);
  CHECK(category_of(ErrorClass::NotApplicable) == Category::None);
}

TEST_CASE("context tags and error counts") {
  CHECK(required_tag(ErrorClass::ChangeNameOfDevice) == Tag::Device);
  CHECK(required_tag(ErrorClass::ChangePositionOfDevice) == Tag::Device);
  CHECK(required_tag(ErrorClass::ChangeSeverity) == Tag::Severity);
  CHECK(required_tag(ErrorClass::ChangeLocation) == Tag::Location);
  CHECK(required_tag(ErrorClass::ChangeMeasurement) == Tag::Measurement);
  CHECK_FALSE(required_tag(ErrorClass::AddTypo));
  CHECK(context_error_count(Tag::Device) == 2);
  CHECK(context_error_count(Tag::Measurement) == 1);
  CHECK(context_error_count(Tag::Location) == 1);
  CHECK(context_error_count(Tag::Severity) == 1);
}

TEST_CASE("codes and names") {
  CHECK(class_code(ErrorClass::AddMedicalDevice) == 1);
  CHECK(class_code(ErrorClass::AddTypo) == 12);
  CHECK(class_code(ErrorClass::NotApplicable) == 13);
  CHECK(display_name(ErrorClass::ChangePositionOfDevice) == "Change Position of Device");
  CHECK(enum_name(ErrorClass::ChangePositionOfDevice) == "ChangePositionOfDevice");
  for (int code = 1; code <= 13; ++code) {
    auto c = class_from_code(code);
    REQUIRE(c);
    CHECK(parse_error_class(display_name(*c)) == c);
    CHECK(parse_error_class(enum_name(*c)) == c);
    CHECK(parse_error_class(std::to_string(code)) == c);
  }
  CHECK_FALSE(class_from_code(0));
  CHECK_FALSE(class_from_code(14));
  CHECK(parse_error_class("Change Already Present Severity") == ErrorClass::ChangeSeverity);
  CHECK(parse_error_class("add typo") == ErrorClass::AddTypo);
  CHECK_FALSE(parse_error_class("Change Mood"));
}

TEST_CASE("added-sentence classes") {
  std::set<int> codes;
  for (ErrorClass c : kAddedSentenceClasses) codes.insert(class_code(c));
  CHECK(codes == std::set<int>{1, 7, 9, 10});
}
