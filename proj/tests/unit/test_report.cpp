#include <doctest.h>

#include "errsynth/error.hpp"
#include "errsynth/report.hpp"
#include "errsynth/text.hpp"
#include "fixtures.hpp"

using namespace errsynth;

TEST_CASE("two markers give two sections") {
  auto r = parse_report("Findings: A. Impression: B.", "x");
  REQUIRE(r.sections.size() == 2);
  CHECK(r.sections[0].kind == SectionKind::Findings);
  CHECK(r.sections[0].text == "Findings: A.");
  CHECK(r.sections[1].kind == SectionKind::Impression);
  CHECK(r.sections[1].text == "Impression: B.");
  REQUIRE(r.sentences.size() == 2);
  CHECK(r.sentences[1].section == SectionKind::Impression);
}

TEST_CASE("markers match case-insensitively and stay verbatim") {
  auto r = parse_report("FINDINGS: Lungs clear. impression: Normal.", "x");
  REQUIRE(r.sections.size() == 2);
  CHECK(r.sections[0].text == "FINDINGS: Lungs clear.");
  CHECK(r.sections[1].kind == SectionKind::Impression);
  CHECK(r.sentences[1].text == "impression: Normal.");
}

TEST_CASE("markerless input is one Other section") {
  auto r = parse_report("No acute process.", "x");
  REQUIRE(r.sections.size() == 1);
  CHECK(r.sections[0].kind == SectionKind::Other);
  CHECK(r.sentences.size() == 1);
}

TEST_CASE("text before a marker goes to Other") {
  auto r = parse_report("Portable view. Findings: Lungs clear.", "x");
  REQUIRE(r.sections.size() == 2);
  CHECK(r.sections[0].kind == SectionKind::Other);
  CHECK(r.sentences[0].section == SectionKind::Other);
  CHECK(r.sentences[1].section == SectionKind::Findings);
}

TEST_CASE("blank input is EmptyReport") {
  for (const char* raw : {"", "   ", "\n\t \n"}) {
    try {
      parse_report(raw, "x");
      FAIL("expected EmptyReport");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyReport);
    }
  }
}

TEST_CASE("second report example segments into five findings and one impression") {
  auto r = parse_report(fixtures::kReport2Truth, "t3r2");
  REQUIRE(r.sentences.size() == 6);
  for (int k = 0; k < 5; ++k) CHECK(r.sentences[k].section == SectionKind::Findings);
  CHECK(r.sentences[5].section == SectionKind::Impression);
  CHECK(r.sentences[0].text == "Findings: Single frontal view of the chest provided.");
  CHECK(r.sentences[5].text == "Impression: No acute intrathoracic process.");
}

TEST_CASE("split_sentences protected tokens") {
  CHECK(split_sentences("Findings: Comparison is made to previous study from ___.") ==
        std::vector<std::string>{"Findings: Comparison is made to previous study from ___."});
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("Impression: 1. Severe acute pulmonary edema. 2. Endotracheal tube ending 4.3 cm above the "
                        "carina.") ==
        std::vector<std::string>{"Impression: 1. Severe acute pulmonary edema.",
                                 "2. Endotracheal tube ending 4.3 cm above the carina."});
  CHECK(split_sentences("Dr. ___ was paged at 3:30 p.m. on ___. Findings discussed.") ==
        std::vector<std::string>{"Dr. ___ was paged at 3:30 p.m. on ___.", "Findings discussed."});
  CHECK(split_sentences("Is there a leak? No! Fine.") ==
        std::vector<std::string>{"Is there a leak?", "No!", "Fine."});
}

TEST_CASE("no split inside protected strings") {
  const std::vector<std::string> protected_strings = {
      "4.3 cm", "0.5 mm", "12.25 cm", "3:30 p.m.", "8:55 a.m.", "Dr. ___", "___", "e.g. edema", "i.e. effusion",
  };
  for (const auto& p : protected_strings) {
    CAPTURE(p);
    auto out = split_sentences("The finding " + p + " is noted here.");
    CHECK(out.size() == 1);
  }
}

TEST_CASE("reassemble") {
  CHECK(reassemble(std::vector<std::string>{"A.", "B."}) == "A. B.");
  CHECK(reassemble(std::vector<std::string>{}) == "");
  std::vector<Sentence> gap = {{0, "A.", SectionKind::Other}, {2, "B.", SectionKind::Other}};
  try {
    reassemble(gap);
    FAIL("expected NonContiguousIndices");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonContiguousIndices);
  }
}

TEST_CASE("split then reassemble is byte-identical to the normalized text") {
  for (const auto* raw : {&fixtures::kReport1Truth, &fixtures::kReport1Error, &fixtures::kReport2Truth,
                          &fixtures::kReport2Error, &fixtures::kReport3Truth, &fixtures::kReport3Error,
                          &fixtures::kSpliceOriginal1, &fixtures::kSpliceOriginal2}) {
    auto r = parse_report(*raw, "x");
    CHECK(reassemble(r.sentences) == r.normalized);
    CHECK(r.normalized == text::normalize_whitespace(*raw));
    for (std::size_t k = 0; k < r.sentences.size(); ++k) {
      CHECK(r.sentences[k].index == k);
      CHECK_FALSE(r.sentences[k].text.empty());
      CHECK(r.sentences[k].text.find('\n') == std::string::npos);
    }
  }
}

TEST_CASE("sentence prefixes") {
  CHECK(sentence_prefix("Impression: 1. Severe edema.") == "Impression: 1. ");
  CHECK(sentence_prefix("Findings: Lungs clear.") == "Findings: ");
  CHECK(sentence_prefix("Lungs clear.") == "");
  CHECK(starts_with_section_marker("findings: x"));
  CHECK_FALSE(starts_with_section_marker("The findings: x"));
}
