#include <doctest.h>

#include <map>
#include <string>

#include "corpus.hpp"
#include "errsynth/error.hpp"
#include "errsynth/injection.hpp"
#include "errsynth/llm.hpp"
#include "errsynth/random.hpp"
#include "errsynth/tagger.hpp"
#include "errsynth/text.hpp"
#include "fixtures.hpp"
#include "scripted_client.hpp"

using namespace errsynth;

namespace {

ErrorPlan plan_of(ErrorClass context, ErrorClass content, ErrorClass linguistic) {
  ErrorPlan p;
  p.context_slot = context;
  p.content_addition = content;
  p.linguistic = linguistic;
  return p;
}

// Plan with `c` in its own slot and easy partners in the others.
ErrorPlan plan_featuring(ErrorClass c) {
  ErrorPlan p = plan_of(ErrorClass::ChangeSeverity, ErrorClass::AddMedicalDevice, ErrorClass::AddTypo);
  switch (category_of(c)) {
    case Category::ContentAddition: p.content_addition = c; break;
    case Category::LinguisticQuality: p.linguistic = c; break;
    default: p.context_slot = c; break;
  }
  if (c == ErrorClass::ChangeSeverity) p.linguistic = ErrorClass::ChangeToHomophone;
  return p;
}

}  // namespace

TEST_CASE("measurement unit swap keeps the value") {
  auto r = parse_report("Findings: The endotracheal tube is in place with the tip located approximately 4.9 cm above "
                        "the carina. The lungs are clear.",
                        "m");
  bool saw_unit = false;
  for (std::uint64_t seed = 0; seed < 40 && !saw_unit; ++seed) {
    auto res = inject_with_rules(r, plan_of(ErrorClass::ChangeMeasurement, ErrorClass::FalsePrediction,
                                            ErrorClass::AddRepetitions),
                                 seed);
    saw_unit = res.error_text.find("4.9 mm above the carina") != std::string::npos;
  }
  CHECK(saw_unit);
}

TEST_CASE("homophone swap on the no/know example") {
  auto r = parse_report(fixtures::kReport2Truth, "h");
  bool saw = false;
  for (std::uint64_t seed = 0; seed < 200 && !saw; ++seed) {
    auto res = inject_with_rules(r, plan_of(ErrorClass::AddRepetitions, ErrorClass::AddMedicalDevice,
                                            ErrorClass::ChangeToHomophone),
                                 seed);
    saw = res.error_text.find("There is know focal consolidation") != std::string::npos;
  }
  CHECK(saw);
}

TEST_CASE("no device means no device site") {
  auto r = parse_report("Findings: The lungs are clear. There is no pleural effusion. Impression: Normal chest.", "n");
  try {
    inject_with_rules(r, plan_of(ErrorClass::ChangeNameOfDevice, ErrorClass::FalsePrediction, ErrorClass::AddTypo), 1);
    FAIL("expected NoEligibleSite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoEligibleSite);
  }
}

TEST_CASE("rule injection is exact, deterministic and one error per sentence") {
  auto corpus = testsupport::all_tags_corpus(60, 11);
  std::map<ErrorClass, int> placed;
  for (ErrorClass c : kInjectableClasses) {
    int ok = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto report = parse_report(corpus[i].text, corpus[i].id);
      auto plan = plan_featuring(c);
      std::uint64_t seed = derive_seed(99, corpus[i].id) + static_cast<std::uint64_t>(c);
      InjectionResult res;
      try {
        res = inject_with_rules(report, plan, seed);
      } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::NoEligibleSite);
        continue;
      }
      ++ok;
      CAPTURE(report.normalized);
      CAPTURE(res.error_text);
      CHECK(res.violations.empty());
      REQUIRE(res.declared);
      const auto& declared = *res.declared;
      CHECK(declared.size() == res.error_sentences.size());

      int planted = 0;
      std::map<std::size_t, int> used_original;
      for (const auto& d : declared) {
        planted += d.label;
        if (d.original_index) CHECK(++used_original[*d.original_index] == 1);
      }
      CHECK(planted == 3);

      auto orig = report.sentence_texts();
      auto records = splice(orig, res.error_sentences);
      REQUIRE(records.size() == declared.size());
      for (std::size_t k = 0; k < records.size(); ++k) {
        CHECK(records[k].error_index == declared[k].error_index);
        CHECK(records[k].original_index == declared[k].original_index);
        if (declared[k].label == 1) {
          CHECK(records[k].label == 1);
          CHECK(records[k].error_class == declared[k].cls);
        } else {
          CHECK(records[k].label == (screen_neutral(res.error_sentences[k]) ? 2 : 0));
        }
        if (declared[k].cls == ErrorClass::AddRepetitions) {
          auto first = std::find(res.error_sentences.begin(), res.error_sentences.end(), res.error_sentences[k]);
          CHECK(static_cast<std::size_t>(first - res.error_sentences.begin()) < k);
        }
        if (declared[k].cls == ErrorClass::ChangeMeasurement) {
          CHECK(classify_change(*records[k].original_sentence, *records[k].error_sentence).cls ==
                ErrorClass::ChangeMeasurement);
        }
        if (declared[k].cls == ErrorClass::FalseNegation && declared[k].original_index) {
          const auto& lex = Lexicon::builtin();
          for (const auto& t : text::tokenize(orig[*declared[k].original_index])) {
            if (!t.is_word || !(lex.is_severity_term(t.text) || lex.is_location_term(t.text))) continue;
            CHECK(text::find_word(res.error_sentences[k], t.text) == std::string::npos);
          }
        }
      }

      auto again = inject_with_rules(report, plan, seed);
      CHECK(again.error_text == res.error_text);
      CHECK(*again.declared == declared);
    }
    placed[c] = ok;
  }
  for (auto [c, n] : placed) {
    CAPTURE(display_name(c));
    CHECK(n >= 50);
  }
}

TEST_CASE("validate_injection") {
  auto r = parse_report("Findings: A. B. C.", "v");
  InjectionResult same;
  same.error_text = r.normalized;
  same.error_sentences = r.sentence_texts();
  CHECK(validate_injection(r, same).violations == std::vector<std::string>{"no change applied"});

  InjectionResult bad = same;
  bad.error_text = "Findings: A. B. D.";
  bad.declared = std::vector<DeclaredChange>{{7, 1, ErrorClass::AddTypo, "", 0}};
  auto v = validate_injection(r, bad);
  REQUIRE(v.violations.size() == 1);
  CHECK(v.violations[0].find("out of range") != std::string::npos);

  InjectionResult leak = same;
  leak.error_text = "Findings: A. <<<2>>> B.";
  CHECK_FALSE(validate_injection(r, leak).ok());
}

TEST_CASE("llm injection parsing") {
  auto report = parse_report(fixtures::kReport3Truth, "r3");
  auto plan = plan_of(ErrorClass::ChangeMeasurement, ErrorClass::FalseNegation, ErrorClass::AddTypo);
  const auto& templates = TemplateStore::builtin();

  SUBCASE("text plus dictionary") {
    testsupport::ScriptedClient client(
        {fixtures::kReport3Error + "\n\n{2: [1, 'cm to mm', 2], 4: [1, 'negated', 4], 5: [1, 'typo', 5]}"});
    auto res = inject_with_llm(report, plan, client, templates);
    CHECK(res.backend == "llm");
    CHECK(res.error_text == text::normalize_whitespace(fixtures::kReport3Error));
    REQUIRE(res.declared);
    CHECK(res.declared->size() == 3);
    CHECK_FALSE(res.flagged);
    auto reqs = client.requests();
    REQUIRE(reqs.size() == 1);
    CHECK(reqs[0].user == report.normalized);
    CHECK(reqs[0].system.find("[priority error]") != std::string::npos);
  }
  SUBCASE("leaked delimiters are stripped") {
    testsupport::ScriptedClient client({"<<<2>>> " + fixtures::kReport3Error + " <<<3>>>"});
    auto res = inject_with_llm(report, plan, client, templates);
    CHECK(res.error_text.find("<<<") == std::string::npos);
    CHECK(res.error_text.find(">>>") == std::string::npos);
    CHECK_FALSE(res.declared);
  }
  SUBCASE("empty response") {
    testsupport::ScriptedClient client({"   "});
    try {
      inject_with_llm(report, plan, client, templates);
      FAIL("expected UnparseableResponse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnparseableResponse);
    }
  }
  SUBCASE("unchanged report is flagged or rejected") {
    testsupport::ScriptedClient keep({report.normalized});
    CHECK(inject_with_llm(report, plan, keep, templates).flagged);
    testsupport::ScriptedClient reject({report.normalized});
    LlmInjectOptions opts;
    opts.policy = ValidationPolicy::Reject;
    CHECK_THROWS_AS(inject_with_llm(report, plan, reject, templates, opts), Error);
  }
}
