#include <doctest.h>

#include <cmath>
#include <map>

#include "errsynth/error.hpp"
#include "errsynth/random.hpp"
#include "errsynth/sampler.hpp"

using namespace errsynth;

namespace {

const TagProfile kTwoTag = profile_from_frequencies({0.5, 0, 0, 0.25});
const TagProfile kAllFour = profile_from_frequencies({0.8, 0.4, 0.6, 0.2});

double prob_of(const std::vector<std::pair<ErrorClass, double>>& d, ErrorClass c) {
  for (const auto& [k, p] : d) {
    if (k == c) return p;
  }
  return 0.0;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("two-tag context slot probabilities") {
  bool fell_back = true;
  auto d = context_distribution(TagSet{Tag::Device, Tag::Severity}, kTwoTag, &fell_back);
  CHECK_FALSE(fell_back);
  REQUIRE(d.size() == 3);
  CHECK(prob_of(d, ErrorClass::ChangeNameOfDevice) == doctest::Approx(0.25));
  CHECK(prob_of(d, ErrorClass::ChangePositionOfDevice) == doctest::Approx(0.25));
  CHECK(prob_of(d, ErrorClass::ChangeSeverity) == doctest::Approx(0.5));
}

TEST_CASE("empty tag set falls back to uniform over seven classes") {
  bool fell_back = false;
  auto d = context_distribution(TagSet{}, kTwoTag, &fell_back);
  CHECK(fell_back);
  REQUIRE(d.size() == 7);
  for (const auto& [c, p] : d) {
    CHECK(p == doctest::Approx(1.0 / 7));
    CHECK(category_of(c) != Category::ContextDependent);
  }
  auto plan = sample_plan(TagSet{}, kTwoTag, 42);
  CHECK(plan.context_fell_back);
  CHECK(plan.classes().size() == 3);
}

TEST_CASE("tags absent from the profile also fall back") {
  bool fell_back = false;
  auto d = context_distribution(TagSet{Tag::Location}, kTwoTag, &fell_back);
  CHECK(fell_back);
  CHECK(d.size() == 7);
}

TEST_CASE("plan probabilities by hand") {
  TagSet tags{Tag::Device, Tag::Severity};
  ErrorPlan p;
  p.context_slot = ErrorClass::ChangeSeverity;
  p.content_addition = ErrorClass::FalseNegation;
  p.linguistic = ErrorClass::AddTypo;
  CHECK(plan_probability(p, tags, kTwoTag) == doctest::Approx(1.0 / 24));

  ErrorPlan f;
  f.context_fell_back = true;
  f.context_slot = ErrorClass::AddRepetitions;
  f.content_addition = ErrorClass::AddMedicalDevice;
  f.linguistic = ErrorClass::AddRepetitions;
  CHECK(plan_probability(f, TagSet{}, kTwoTag) == doctest::Approx(1.0 / 84));
}

TEST_CASE("inconsistent plans") {
  ErrorPlan p;
  p.context_slot = ErrorClass::ChangeLocation;
  CHECK(code_of([&] { plan_probability(p, TagSet{Tag::Device}, kTwoTag); }) == ErrorCode::InconsistentPlan);
  p.context_slot = ErrorClass::ChangeSeverity;
  p.content_addition = ErrorClass::AddTypo;
  CHECK(code_of([&] { plan_probability(p, TagSet{Tag::Severity}, kTwoTag); }) == ErrorCode::InconsistentPlan);
  p.content_addition = ErrorClass::FalsePrediction;
  p.context_fell_back = true;
  CHECK(code_of([&] { plan_probability(p, TagSet{Tag::Severity}, kTwoTag); }) == ErrorCode::InconsistentPlan);
}

TEST_CASE("invalid profile is rejected") {
  auto bad = kTwoTag;
  bad.stats[3].w_norm = 0.1;
  CHECK(code_of([&] { sample_plan(TagSet{Tag::Severity}, bad, 1); }) == ErrorCode::InvalidProfile);
}

TEST_CASE("exhaustive enumeration sums to one for all sixteen subsets") {
  for (const TagProfile* profile : {&kTwoTag, &kAllFour}) {
    for (unsigned bits = 0; bits < 16; ++bits) {
      TagSet tags = TagSet::from_bits(bits);
      CAPTURE(tags.to_string());
      double sum = 0;
      for (const auto& [plan, p] : enumerate_plans(tags, *profile)) {
        CHECK(p == doctest::Approx(plan_probability(plan, tags, *profile)));
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("empirical frequencies agree with the analytic marginals") {
  const int n = 100000;
  for (unsigned bits : {0u, 9u, 15u, 4u}) {
    TagSet tags = TagSet::from_bits(bits);
    CAPTURE(tags.to_string());
    std::map<ErrorClass, double> expected;
    for (const auto& [plan, p] : enumerate_plans(tags, kAllFour)) {
      expected[plan.context_slot] += p;
    }
    std::map<ErrorClass, int> seen;
    std::map<ErrorClass, int> content, linguistic;
    for (int k = 0; k < n; ++k) {
      auto plan = sample_plan(tags, kAllFour, derive_stream(bits, k));
      ++seen[plan.context_slot];
      ++content[plan.content_addition];
      ++linguistic[plan.linguistic];
    }
    for (const auto& [c, p] : expected) {
      CAPTURE(display_name(c));
      double se = std::sqrt(p * (1 - p) / n);
      CHECK(std::abs(seen[c] / double(n) - p) <= 4 * se);
    }
    for (ErrorClass c : kContentAddition) {
      CHECK(std::abs(content[c] / double(n) - 1.0 / 3) < 4 * std::sqrt((1.0 / 3) * (2.0 / 3) / n));
    }
    for (ErrorClass c : kLinguisticQuality) {
      CHECK(std::abs(linguistic[c] / double(n) - 0.25) < 4 * std::sqrt(0.25 * 0.75 / n));
    }
  }
}

TEST_CASE("content and linguistic marginals are exact for every tag set") {
  for (unsigned bits = 0; bits < 16; ++bits) {
    TagSet tags = TagSet::from_bits(bits);
    std::map<ErrorClass, double> content, linguistic;
    for (const auto& [plan, p] : enumerate_plans(tags, kAllFour)) {
      content[plan.content_addition] += p;
      linguistic[plan.linguistic] += p;
    }
    for (ErrorClass c : kContentAddition) CHECK(content[c] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    for (ErrorClass c : kLinguisticQuality) CHECK(linguistic[c] == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("plans are deterministic and well-formed") {
  Rng rng(8);
  for (int k = 0; k < 2000; ++k) {
    TagSet tags = TagSet::from_bits(static_cast<unsigned>(rng.index(16)));
    std::uint64_t seed = rng.next();
    auto a = sample_plan(tags, kAllFour, seed);
    CHECK(a == sample_plan(tags, kAllFour, seed));
    CHECK(a.seed == seed);
    CHECK(category_of(a.content_addition) == Category::ContentAddition);
    CHECK(category_of(a.linguistic) == Category::LinguisticQuality);
    if (tags.empty()) {
      CHECK(a.context_fell_back);
    } else {
      CHECK_FALSE(a.context_fell_back);
      CHECK(tags.contains(*required_tag(a.context_slot)));
    }
    CHECK(ErrorPlan::from_json(a.to_json()) == a);
  }
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(7, "a") == derive_seed(7, "a"));
  CHECK(derive_seed(7, "a") != derive_seed(7, "b"));
  CHECK(derive_seed(7, "a") != derive_seed(8, "a"));
  CHECK(derive_stream(1, 0) != derive_stream(1, 1));
  Rng r(1);
  for (int k = 0; k < 1000; ++k) {
    double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.index(7) < 7);
  }
}
