#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "errsynth/error.hpp"
#include "errsynth/pipeline.hpp"
#include "errsynth/random.hpp"
#include "errsynth/sampler.hpp"
#include "errsynth/stats.hpp"

using namespace errsynth;

namespace {

ReportRecord plan_record(const std::string& id, Split split, const ErrorPlan& p) {
  ReportRecord r;
  r.id = id;
  r.split = split;
  auto c = p.classes();
  r.error_categories.assign(c.begin(), c.end());
  return r;
}

}  // namespace

TEST_CASE("empty record set raises EmptySplit") {
  std::vector<ReportRecord> none;
  CHECK_THROWS_AS(compute_distribution(none), Error);
  try {
    compute_distribution(none, Split::Dev);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySplit);
  }
}

TEST_CASE("percentages count reports whose plan holds the class") {
  std::vector<ReportRecord> recs;
  recs.push_back(plan_record("a", Split::Train, {ErrorClass::AddMedicalDevice, ErrorClass::AddTypo, ErrorClass::ChangeSeverity}));
  recs.push_back(plan_record("b", Split::Train, {ErrorClass::FalseNegation, ErrorClass::AddTypo, ErrorClass::ChangeLocation}));
  recs.push_back(plan_record("c", Split::Train, {ErrorClass::FalseNegation, ErrorClass::AddRepetitions, ErrorClass::FalseNegation}));
  recs.push_back(plan_record("d", Split::Test, {ErrorClass::FalsePrediction, ErrorClass::AddTypo, ErrorClass::AddTypo}));
  auto d = compute_distribution(recs, Split::Train);
  CHECK(d.reports == 3);
  CHECK(d.percent(ErrorClass::AddTypo) == doctest::Approx(200.0 / 3));
  // A class sampled twice in one report counts that report once.
  CHECK(d.count(ErrorClass::FalseNegation) == 2);
  CHECK(d.percent(ErrorClass::AddMedicalDevice) == doctest::Approx(100.0 / 3));
  CHECK(d.percent(ErrorClass::ChangeMeasurement) == 0.0);

  auto all = compute_distribution(recs);
  REQUIRE(all.splits.size() == 2);
  CHECK(all.find(Split::Dev) == nullptr);
  CHECK(all.find(Split::Test)->percent(ErrorClass::AddTypo) == 100.0);
}

TEST_CASE("table layout uses two decimals") {
  std::vector<ReportRecord> recs;
  recs.push_back(plan_record("a", Split::Train, {ErrorClass::AddMedicalDevice, ErrorClass::AddTypo, ErrorClass::ChangeSeverity}));
  recs.push_back(plan_record("b", Split::Train, {ErrorClass::FalseNegation, ErrorClass::AddTypo, ErrorClass::ChangeLocation}));
  recs.push_back(plan_record("c", Split::Train, {ErrorClass::FalsePrediction, ErrorClass::AddRepetitions, ErrorClass::ChangeLocation}));
  auto table = compute_distribution(recs).render_table();
  CHECK(table.find("Content addition") != std::string::npos);
  CHECK(table.find("  Add Medical Device") != std::string::npos);
  CHECK(table.find("33.33") != std::string::npos);
  CHECK(table.find("66.67") != std::string::npos);
  auto csv = compute_distribution(recs).render_csv();
  CHECK(csv.rfind("category,error_class,train\n", 0) == 0);
  CHECK(csv.find("Content addition,Add Medical Device,33.33\n") != std::string::npos);
  CHECK(csv.find(",reports,3\n") != std::string::npos);
  CHECK(format_percent(25.0) == "25.00");
}

TEST_CASE("sampled plans reproduce the category marginals") {
  auto profile = profile_from_frequencies({1, 1, 1, 1});
  TagSet all{Tag::Device, Tag::Measurement, Tag::Location, Tag::Severity};
  std::vector<ReportRecord> recs;
  for (int k = 0; k < 10000; ++k) {
    recs.push_back(plan_record("r" + std::to_string(k), Split::Train, sample_plan(all, profile, derive_seed(1, "r" + std::to_string(k)))));
  }
  auto d = compute_distribution(recs, Split::Train);
  for (ErrorClass c : kContentAddition) CHECK(std::abs(d.percent(c) - 100.0 / 3) < 1.5);
  for (ErrorClass c : kLinguisticQuality) CHECK(std::abs(d.percent(c) - 25.0) < 1.5);
}

TEST_CASE("two-tag corpus puts half the context slots on severity") {
  // w'(device) = 1/3, w'(severity) = 2/3; a {device, severity} report gives
  // ChangeSeverity 1/2 and each device class 1/4.
  auto profile = profile_from_frequencies({0.5, 0, 0, 0.25});
  TagSet tags{Tag::Device, Tag::Severity};
  std::vector<ReportRecord> recs;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    auto plan = sample_plan(tags, profile, derive_seed(9, std::to_string(k)));
    recs.push_back(plan_record(std::to_string(k), Split::Dev, plan));
  }
  auto d = compute_distribution(recs, Split::Dev);
  auto se = [&](double p) { return 100.0 * 4 * std::sqrt(p * (1 - p) / n); };
  CHECK(std::abs(d.percent(ErrorClass::ChangeSeverity) - 50.0) < se(0.5));
  CHECK(std::abs(d.percent(ErrorClass::ChangeNameOfDevice) - 25.0) < se(0.25));
  CHECK(std::abs(d.percent(ErrorClass::ChangePositionOfDevice) - 25.0) < se(0.25));
}

TEST_CASE("plans and labeled sentences give the same distribution") {
  auto corpus = testsupport::all_tags_corpus(60, 77);
  std::vector<Report> reports;
  std::vector<TagSet> tags;
  for (const auto& c : corpus) {
    reports.push_back(parse_report(c.text, c.id));
    tags.push_back(tag_report(reports.back(), KeywordConfig::builtin()));
  }
  auto profile = compute_tag_profile(tags);
  RunContext ctx;
  ctx.profile = &profile;
  std::vector<ReportRecord> recs;
  std::vector<SentenceDatasetRow> rows;
  for (const auto& r : reports) {
    auto o = process_report(r, Split::Train, 5, ctx);
    recs.push_back(o.record);
    rows.insert(rows.end(), o.rows.begin(), o.rows.end());
  }
  auto from_plans = compute_distribution(recs, Split::Train);
  auto from_rows = distribution_from_sentences(rows);
  CHECK(from_rows.reports == from_plans.reports);
  for (ErrorClass c : kInjectableClasses) {
    CAPTURE(display_name(c));
    CHECK(std::abs(from_rows.percent(c) - from_plans.percent(c)) <= 0.1);
  }
}
