#include "errsynth/sampler.hpp"

#include <algorithm>

#include <json.hpp>

#include "errsynth/error.hpp"
#include "errsynth/random.hpp"

namespace errsynth {

using nlohmann::json;

namespace {

constexpr std::array<ErrorClass, 7> kFallbackClasses = {
    ErrorClass::AddMedicalDevice,    ErrorClass::FalsePrediction, ErrorClass::FalseNegation,
    ErrorClass::AddOppositeSentence, ErrorClass::AddRepetitions,  ErrorClass::ChangeToHomophone,
    ErrorClass::AddTypo};

template <std::size_t N>
bool member(const std::array<ErrorClass, N>& set, ErrorClass c) {
  return std::find(set.begin(), set.end(), c) != set.end();
}

ErrorClass class_field(const json& j, const char* key) {
  auto c = parse_error_class(j.at(key).get<std::string>());
  if (!c) throw Error(ErrorCode::ParseError, std::string("unknown error class in ") + key);
  return *c;
}

}  // namespace

json ErrorPlan::to_json() const {
  return {{"context_slot", std::string(display_name(context_slot))},
          {"content_addition", std::string(display_name(content_addition))},
          {"linguistic", std::string(display_name(linguistic))},
          {"context_fell_back", context_fell_back},
          {"seed", seed}};
}

ErrorPlan ErrorPlan::from_json(const json& j) {
  try {
    ErrorPlan p;
    p.context_slot = class_field(j, "context_slot");
    p.content_addition = class_field(j, "content_addition");
    p.linguistic = class_field(j, "linguistic");
    p.context_fell_back = j.at("context_fell_back").get<bool>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed plan: ") + e.what());
  }
}

std::vector<std::pair<ErrorClass, double>> context_distribution(const TagSet& tags, const TagProfile& profile,
                                                                bool* fell_back) {
  profile.validate();
  double denom = 0.0;
  for (Tag t : tags.tags()) denom += profile[t].w_norm * profile[t].errors;

  std::vector<std::pair<ErrorClass, double>> out;
  if (denom <= 0.0) {
    if (fell_back) *fell_back = true;
    for (ErrorClass c : kFallbackClasses) out.emplace_back(c, 1.0 / kFallbackClasses.size());
    return out;
  }
  if (fell_back) *fell_back = false;
  for (ErrorClass c : kContextDependent) {
    Tag t = *required_tag(c);
    if (!tags.contains(t) || !profile[t].present) continue;
    out.emplace_back(c, profile[t].w_norm / denom);
  }
  return out;
}

ErrorPlan sample_plan(const TagSet& tags, const TagProfile& profile, std::uint64_t seed) {
  bool fell_back = false;
  auto dist = context_distribution(tags, profile, &fell_back);
  Rng rng(seed);
  ErrorPlan plan;
  plan.seed = seed;
  plan.content_addition = rng.pick(kContentAddition);
  plan.linguistic = rng.pick(kLinguisticQuality);
  plan.context_fell_back = fell_back;
  if (fell_back) {
    plan.context_slot = rng.pick(kFallbackClasses);
    return plan;
  }
  double u = rng.uniform01();
  double acc = 0.0;
  plan.context_slot = dist.back().first;
  for (const auto& [c, p] : dist) {
    acc += p;
    if (u < acc) {
      plan.context_slot = c;
      break;
    }
  }
  return plan;
}

double plan_probability(const ErrorPlan& plan, const TagSet& tags, const TagProfile& profile) {
  if (!member(kContentAddition, plan.content_addition)) {
    throw Error(ErrorCode::InconsistentPlan, "content slot holds " + std::string(display_name(plan.content_addition)));
  }
  if (!member(kLinguisticQuality, plan.linguistic)) {
    throw Error(ErrorCode::InconsistentPlan, "linguistic slot holds " + std::string(display_name(plan.linguistic)));
  }
  bool fell_back = false;
  auto dist = context_distribution(tags, profile, &fell_back);
  if (plan.context_fell_back != fell_back) {
    throw Error(ErrorCode::InconsistentPlan,
                fell_back ? "plan uses a context class but no weighted tag is present"
                          : "plan fell back although a weighted tag is present");
  }
  auto it = std::find_if(dist.begin(), dist.end(), [&](const auto& e) { return e.first == plan.context_slot; });
  if (it == dist.end()) {
    throw Error(ErrorCode::InconsistentPlan,
                std::string(display_name(plan.context_slot)) + " is not available for tags {" + tags.to_string() + "}");
  }
  return (1.0 / kContentAddition.size()) * (1.0 / kLinguisticQuality.size()) * it->second;
}

std::vector<std::pair<ErrorPlan, double>> enumerate_plans(const TagSet& tags, const TagProfile& profile) {
  bool fell_back = false;
  auto dist = context_distribution(tags, profile, &fell_back);
  std::vector<std::pair<ErrorPlan, double>> out;
  for (ErrorClass a : kContentAddition) {
    for (ErrorClass l : kLinguisticQuality) {
      for (const auto& [c, p] : dist) {
        ErrorPlan plan{a, l, c, fell_back, 0};
        out.emplace_back(plan, plan_probability(plan, tags, profile));
      }
    }
  }
  return out;
}

}  // namespace errsynth
