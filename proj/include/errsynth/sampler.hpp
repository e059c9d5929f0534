#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errsynth/error_class.hpp"
#include "errsynth/tagger.hpp"

namespace errsynth {

struct ErrorPlan {
  ErrorClass content_addition = ErrorClass::AddMedicalDevice;
  ErrorClass linguistic = ErrorClass::AddTypo;
  ErrorClass context_slot = ErrorClass::ChangeSeverity;
  bool context_fell_back = false;
  std::uint64_t seed = 0;

  /// Prompt slot order: context, content, linguistic.
  std::array<ErrorClass, 3> classes() const { return {context_slot, content_addition, linguistic}; }

  bool operator==(const ErrorPlan&) const = default;

  nlohmann::json to_json() const;
  static ErrorPlan from_json(const nlohmann::json& j);
};

/// Context-slot distribution for a report. Classes appear in a fixed order;
/// probabilities sum to 1. Falls back to uniform over A and L when no
/// weighted tag is present, in which case *fell_back is set.
std::vector<std::pair<ErrorClass, double>> context_distribution(const TagSet& tags, const TagProfile& profile,
                                                                bool* fell_back = nullptr);

/// Throws Error(InvalidProfile).
ErrorPlan sample_plan(const TagSet& tags, const TagProfile& profile, std::uint64_t seed);

/// Exact joint probability. Throws Error(InconsistentPlan) or
/// Error(InvalidProfile).
double plan_probability(const ErrorPlan& plan, const TagSet& tags, const TagProfile& profile);

/// Every plan with nonzero probability, with its probability.
std::vector<std::pair<ErrorPlan, double>> enumerate_plans(const TagSet& tags, const TagProfile& profile);

}  // namespace errsynth
