#include "errsynth/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "errsynth/error.hpp"

namespace errsynth {

namespace {

std::size_t slot(ErrorClass c) {
  auto it = std::find(kInjectableClasses.begin(), kInjectableClasses.end(), c);
  return static_cast<std::size_t>(it - kInjectableClasses.begin());
}

struct Group {
  const char* title;
  std::span<const ErrorClass> classes;
};

const std::array<Group, 3> kGroups = {{
    {"Content addition", kContentAddition},
    {"Linguistic quality", kLinguisticQuality},
    {"Context dependent", kContextDependent},
}};

std::string pad(std::string s, std::size_t width, bool left = true) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::size_t SplitDistribution::count(ErrorClass c) const {
  std::size_t i = slot(c);
  return i < counts.size() ? counts[i] : 0;
}

double SplitDistribution::percent(ErrorClass c) const {
  return reports == 0 ? 0.0 : 100.0 * static_cast<double>(count(c)) / static_cast<double>(reports);
}

const SplitDistribution* DistributionReport::find(Split s) const {
  for (const auto& d : splits) {
    if (d.split == s) return &d;
  }
  return nullptr;
}

SplitDistribution compute_distribution(std::span<const ReportRecord> records, Split split) {
  SplitDistribution d;
  d.split = split;
  for (const auto& r : records) {
    if (r.split != split) continue;
    ++d.reports;
    std::set<ErrorClass> seen(r.error_categories.begin(), r.error_categories.end());
    for (ErrorClass c : seen) {
      std::size_t i = slot(c);
      if (i < d.counts.size()) ++d.counts[i];
    }
  }
  if (d.reports == 0) throw Error(ErrorCode::EmptySplit, "no records in split " + std::string(split_name(split)));
  return d;
}

DistributionReport compute_distribution(std::span<const ReportRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptySplit, "no records");
  DistributionReport rep;
  for (Split s : {Split::Train, Split::Dev, Split::Test}) {
    bool any = std::any_of(records.begin(), records.end(), [&](const ReportRecord& r) { return r.split == s; });
    if (any) rep.splits.push_back(compute_distribution(records, s));
  }
  return rep;
}

SplitDistribution distribution_from_sentences(std::span<const SentenceDatasetRow> rows, Split split) {
  if (rows.empty()) throw Error(ErrorCode::EmptySplit, "no sentence rows");
  std::map<std::string, std::set<ErrorClass>> per_report;
  for (const auto& r : rows) {
    auto& classes = per_report[r.report_id];
    if (r.label == 1 && r.error_class != ErrorClass::NotApplicable) classes.insert(r.error_class);
  }
  SplitDistribution d;
  d.split = split;
  d.reports = per_report.size();
  for (const auto& [id, classes] : per_report) {
    for (ErrorClass c : classes) ++d.counts[slot(c)];
  }
  return d;
}

std::string DistributionReport::render_table() const {
  constexpr std::size_t kName = 28, kCol = 9;
  std::string out = pad("Error", kName);
  for (const auto& d : splits) out += pad(std::string(split_name(d.split)), kCol, false);
  out += '\n';
  for (const auto& g : kGroups) {
    out += g.title;
    out += '\n';
    for (ErrorClass c : g.classes) {
      out += pad("  " + std::string(display_name(c)), kName);
      for (const auto& d : splits) out += pad(format_percent(d.percent(c)), kCol, false);
      out += '\n';
    }
  }
  out += pad("Reports", kName);
  for (const auto& d : splits) out += pad(std::to_string(d.reports), kCol, false);
  out += '\n';
  return out;
}

std::string DistributionReport::render_csv() const {
  std::string out = "category,error_class";
  for (const auto& d : splits) out += "," + std::string(split_name(d.split));
  out += '\n';
  for (const auto& g : kGroups) {
    for (ErrorClass c : g.classes) {
      out += std::string(g.title) + "," + std::string(display_name(c));
      for (const auto& d : splits) out += "," + format_percent(d.percent(c));
      out += '\n';
    }
  }
  out += ",reports";
  for (const auto& d : splits) out += "," + std::to_string(d.reports);
  out += '\n';
  return out;
}

}  // namespace errsynth
