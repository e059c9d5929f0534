#include "errsynth/dataset.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "errsynth/error.hpp"
#include "errsynth/report.hpp"

#ifndef ERRSYNTH_VERSION
#define ERRSYNTH_VERSION "0.0.0"
#endif

namespace errsynth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<Split, 3> kSplits = {Split::Train, Split::Dev, Split::Test};

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaViolation, what); }

ErrorClass class_field(const json& v, const char* field) {
  if (!v.is_string()) schema(std::string(field) + " must be a class name");
  auto c = parse_error_class(v.get<std::string>());
  if (!c) schema(std::string(field) + ": unknown class '" + v.get<std::string>() + "'");
  return *c;
}

std::optional<std::string> nullable_string(const json& j, const char* field) {
  const auto& v = j.at(field);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) schema(std::string(field) + " must be a string or null");
  return v.get<std::string>();
}

template <typename T>
T typed(const json& j, const char* field) {
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    schema(std::string("missing or mistyped field '") + field + "'");
  }
}

std::size_t count_sentences(const std::string& text) {
  return parse_report(text, "count").sentences.size();
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

template <typename T, typename ToJson>
std::size_t write_jsonl(std::span<const T> items, const std::filesystem::path& path, ToJson to) {
  std::string buf;
  for (const auto& item : items) {
    buf += to(item).dump(-1, ' ', false, json::error_handler_t::strict);
    buf += '\n';
  }
  write_file_synced(path, buf);
  return items.size();
}

template <typename T, typename FromJson, typename Check>
ReadResult<T> read_jsonl(const std::filesystem::path& path, bool permissive, FromJson from, Check check) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  ReadResult<T> out;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) {
      out.violations.push_back({n, "blank line"});
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      out.violations.push_back({n, "invalid JSON (truncated or corrupt line)"});
      continue;
    }
    try {
      T rec = from(j);
      auto problems = check(rec);
      if (!problems.empty()) {
        for (auto& p : problems) out.violations.push_back({n, std::move(p)});
        continue;
      }
      out.records.push_back(std::move(rec));
      lines.push_back(n);
    } catch (const Error& e) {
      out.violations.push_back({n, e.what()});
    }
  }
  if constexpr (std::is_same_v<T, SentenceDatasetRow>) {
    for (auto v : check_sentence_table(out.records)) {
      v.line = lines[v.line - 1];
      out.violations.push_back(std::move(v));
    }
    std::stable_sort(out.violations.begin(), out.violations.end(),
                     [](const Violation& a, const Violation& b) { return a.line < b.line; });
  }
  if (!permissive && !out.violations.empty()) out.records.clear();
  return out;
}

}  // namespace

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view s) {
  for (Split x : kSplits) {
    if (split_name(x) == s) return x;
  }
  return std::nullopt;
}

std::string_view tool_version() { return ERRSYNTH_VERSION; }

ordered_json to_json(const ReportRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["split"] = split_name(r.split);
  j["ground_truth"] = r.ground_truth;
  j["error_report"] = r.error_report;
  j["error_categories"] = ordered_json::array();
  for (auto c : r.error_categories) j["error_categories"].push_back(display_name(c));
  j["index_map"] = ordered_json::array();
  for (const auto& e : r.index_map) {
    ordered_json orig = e.original_index ? ordered_json(*e.original_index) : ordered_json(nullptr);
    j["index_map"].push_back(ordered_json::array({e.error_index, e.label, display_name(e.error_class), orig}));
  }
  j["plan_seed"] = r.plan_seed;
  j["backend"] = r.backend;
  j["validation"] = r.validation;
  return j;
}

ordered_json to_json(const SentenceDatasetRow& r) {
  ordered_json j;
  j["report_id"] = r.report_id;
  j["index"] = r.index;
  j["original_sentence"] = r.original_sentence ? ordered_json(*r.original_sentence) : ordered_json(nullptr);
  j["error_sentence"] = r.error_sentence ? ordered_json(*r.error_sentence) : ordered_json(nullptr);
  j["label"] = r.label;
  j["error_class"] = display_name(r.error_class);
  return j;
}

ReportRecord report_record_from_json(const json& j) {
  if (!j.is_object()) schema("record is not an object");
  ReportRecord r;
  r.id = typed<std::string>(j, "id");
  auto split = parse_split(typed<std::string>(j, "split"));
  if (!split) schema("unknown split");
  r.split = *split;
  r.ground_truth = typed<std::string>(j, "ground_truth");
  r.error_report = typed<std::string>(j, "error_report");
  const auto& cats = j.contains("error_categories") ? j.at("error_categories") : json();
  if (!cats.is_array()) schema("error_categories must be a list");
  for (const auto& c : cats) r.error_categories.push_back(class_field(c, "error_categories"));
  const auto& map = j.contains("index_map") ? j.at("index_map") : json();
  if (!map.is_array()) schema("index_map must be a list");
  for (const auto& e : map) {
    if (!e.is_array() || e.size() != 4 || !e[0].is_number_unsigned() || !e[1].is_number_integer() ||
        !(e[3].is_null() || e[3].is_number_unsigned())) {
      schema("index_map entries are [error index, label, class, original index or null]");
    }
    IndexMapEntry m;
    m.error_index = e[0].get<std::size_t>();
    m.label = e[1].get<int>();
    m.error_class = class_field(e[2], "index_map class");
    if (!e[3].is_null()) m.original_index = e[3].get<std::size_t>();
    r.index_map.push_back(m);
  }
  if (!j.contains("plan_seed") || !j.at("plan_seed").is_number_unsigned()) schema("plan_seed must be unsigned");
  r.plan_seed = j.at("plan_seed").get<std::uint64_t>();
  r.backend = typed<std::string>(j, "backend");
  r.validation = typed<std::vector<std::string>>(j, "validation");
  return r;
}

SentenceDatasetRow sentence_row_from_json(const json& j) {
  if (!j.is_object()) schema("row is not an object");
  SentenceDatasetRow r;
  r.report_id = typed<std::string>(j, "report_id");
  if (!j.contains("index") || !j.at("index").is_number_unsigned()) schema("index must be a nonnegative integer");
  r.index = j.at("index").get<std::size_t>();
  if (!j.contains("original_sentence") || !j.contains("error_sentence")) schema("missing sentence field");
  r.original_sentence = nullable_string(j, "original_sentence");
  r.error_sentence = nullable_string(j, "error_sentence");
  if (!j.contains("label") || !j.at("label").is_number_integer()) schema("label must be an integer");
  r.label = j.at("label").get<int>();
  if (!j.contains("error_class")) schema("missing field 'error_class'");
  r.error_class = class_field(j.at("error_class"), "error_class");
  return r;
}

std::vector<std::string> check_report_record(const ReportRecord& r) {
  std::vector<std::string> v;
  if (r.id.empty()) v.emplace_back("empty id");
  if (r.error_categories.size() != 3) {
    v.push_back("expected 3 error categories, found " + std::to_string(r.error_categories.size()));
  }
  for (auto c : r.error_categories) {
    if (c == ErrorClass::NotApplicable) v.emplace_back("error category cannot be Not Applicable");
  }
  if (r.backend != "rules" && r.backend != "llm") v.push_back("unknown backend '" + r.backend + "'");

  std::size_t n_err = 0, n_orig = 0;
  try {
    n_err = count_sentences(r.error_report);
  } catch (const Error&) {
    v.emplace_back("empty error report");
  }
  try {
    n_orig = count_sentences(r.ground_truth);
  } catch (const Error&) {
    v.emplace_back("empty ground truth");
  }
  if (r.index_map.size() != n_err) {
    v.push_back("index_map has " + std::to_string(r.index_map.size()) + " entries for " + std::to_string(n_err) +
                " error-report sentences");
  }
  for (std::size_t k = 0; k < r.index_map.size(); ++k) {
    const auto& e = r.index_map[k];
    const std::string at = "index_map[" + std::to_string(k) + "]: ";
    if (e.error_index != k) v.push_back(at + "error index " + std::to_string(e.error_index) + " out of order");
    if (e.label < 0 || e.label > 2) v.push_back(at + "label " + std::to_string(e.label) + " not in {0,1,2}");
    if (e.label == 0 && e.error_class != ErrorClass::NotApplicable) v.push_back(at + "label 0 with an error class");
    if (e.label == 1 && e.error_class == ErrorClass::NotApplicable) v.push_back(at + "label 1 without an error class");
    if (e.original_index && *e.original_index >= n_orig) v.push_back(at + "original index out of range");
  }
  return v;
}

std::vector<std::string> check_sentence_row(const SentenceDatasetRow& r) {
  std::vector<std::string> v;
  if (r.report_id.empty()) v.emplace_back("empty report_id");
  if (r.label < 0 || r.label > 2) v.push_back("label " + std::to_string(r.label) + " not in {0,1,2}");
  const bool has_o = r.original_sentence.has_value(), has_e = r.error_sentence.has_value();
  if (!has_o && !has_e) v.emplace_back("both sentences are null");
  if ((has_o && r.original_sentence->empty()) || (has_e && r.error_sentence->empty())) {
    v.emplace_back("empty sentence (use null for a missing side)");
  }
  if (r.label == 0) {
    if (r.error_class != ErrorClass::NotApplicable) v.emplace_back("label 0 with an error class");
    if (!has_o || !has_e || *r.original_sentence != *r.error_sentence) v.emplace_back("label 0 but sentences differ");
  }
  if (r.label == 1) {
    if (r.error_class == ErrorClass::NotApplicable) v.emplace_back("label 1 with class Not Applicable");
    if (has_o && has_e && *r.original_sentence == *r.error_sentence) v.emplace_back("label 1 but sentences are equal");
  }
  if (!has_o && has_e && r.label != 0) {
    bool ok = std::find(kAddedSentenceClasses.begin(), kAddedSentenceClasses.end(), r.error_class) !=
              kAddedSentenceClasses.end();
    if (!ok) v.push_back("added sentence with class " + std::string(display_name(r.error_class)));
  }
  if (has_o && !has_e && r.error_class != ErrorClass::FalseNegation) {
    v.push_back("omitted sentence with class " + std::string(display_name(r.error_class)));
  }
  return v;
}

std::vector<Violation> check_sentence_table(std::span<const SentenceDatasetRow> rows) {
  std::vector<Violation> v;
  std::map<std::string, std::size_t> next;
  std::set<std::pair<std::string, std::size_t>> seen;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (!seen.insert({r.report_id, r.index}).second) {
      v.push_back({k + 1, "duplicate (report_id, index) (" + r.report_id + ", " + std::to_string(r.index) + ")"});
      continue;
    }
    std::size_t& expected = next[r.report_id];
    if (r.index != expected) {
      v.push_back({k + 1, "report " + r.report_id + ": index " + std::to_string(r.index) + " where " +
                              std::to_string(expected) + " was expected"});
    }
    expected = r.index + 1;
  }
  return v;
}

std::size_t write_report_records(std::span<const ReportRecord> records, const std::filesystem::path& path) {
  for (std::size_t k = 0; k < records.size(); ++k) {
    auto problems = check_report_record(records[k]);
    if (!problems.empty()) schema("record " + std::to_string(k) + " (" + records[k].id + "): " + problems.front());
  }
  return write_jsonl(records, path, [](const ReportRecord& r) { return to_json(r); });
}

std::size_t write_sentence_records(std::span<const SentenceDatasetRow> rows, const std::filesystem::path& path) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto problems = check_sentence_row(rows[k]);
    if (!problems.empty()) schema("row " + std::to_string(k) + ": " + problems.front());
  }
  auto table = check_sentence_table(rows);
  if (!table.empty()) schema("row " + std::to_string(table.front().line - 1) + ": " + table.front().reason);
  return write_jsonl(rows, path, [](const SentenceDatasetRow& r) { return to_json(r); });
}

std::size_t write_sentence_csv(std::span<const SentenceDatasetRow> rows, const std::filesystem::path& path) {
  std::string buf = "report_id,index,original_sentence,error_sentence,label,error_class\n";
  for (const auto& r : rows) {
    buf += csv_field(r.report_id) + ',' + std::to_string(r.index) + ',' + csv_field(r.original_sentence.value_or("")) +
           ',' + csv_field(r.error_sentence.value_or("")) + ',' + std::to_string(r.label) + ',' +
           csv_field(display_name(r.error_class)) + '\n';
  }
  write_file_synced(path, buf);
  return rows.size();
}

ReadResult<ReportRecord> read_report_records(const std::filesystem::path& path, bool permissive) {
  return read_jsonl<ReportRecord>(path, permissive, report_record_from_json, check_report_record);
}

ReadResult<SentenceDatasetRow> read_sentence_records(const std::filesystem::path& path, bool permissive) {
  return read_jsonl<SentenceDatasetRow>(path, permissive, sentence_row_from_json, check_sentence_row);
}

std::optional<Schema> detect_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    try {
      auto j = json::parse(line);
      if (j.is_object() && j.contains("index_map")) return Schema::Reports;
      if (j.is_object() && j.contains("report_id")) return Schema::Sentences;
    } catch (const json::exception&) {
    }
  }
  return std::nullopt;
}

ordered_json SplitManifest::to_json() const {
  ordered_json j;
  j["splits"] = ordered_json::object();
  for (Split s : kSplits) {
    auto it = splits.find(std::string(split_name(s)));
    j["splits"][std::string(split_name(s))] = it == splits.end() ? std::vector<std::string>{} : it->second;
  }
  for (const auto& [name, ids] : splits) {
    if (!parse_split(name)) j["splits"][name] = ids;
  }
  j["corpus_hash"] = corpus_hash;
  j["run_seed"] = run_seed;
  j["tool_version"] = tool_version;
  return j;
}

SplitManifest SplitManifest::from_json(const json& j) {
  SplitManifest m;
  try {
    for (const auto& [name, ids] : j.at("splits").items()) m.splits[name] = ids.get<std::vector<std::string>>();
    m.corpus_hash = j.value("corpus_hash", "");
    m.run_seed = j.value("run_seed", std::uint64_t{0});
    m.tool_version = j.value("tool_version", "");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("manifest: ") + e.what());
  }
  return m;
}

std::vector<std::string> SplitManifest::check() const {
  std::vector<std::string> v;
  std::map<std::string, std::string> owner;
  for (const auto& [name, ids] : splits) {
    if (!parse_split(name)) v.push_back("unknown split '" + name + "'");
    for (const auto& id : ids) {
      auto [it, fresh] = owner.emplace(id, name);
      if (!fresh) v.push_back("id '" + id + "' is in both " + it->second + " and " + name);
    }
  }
  return v;
}

std::optional<Split> SplitManifest::split_of(std::string_view id) const {
  for (const auto& [name, ids] : splits) {
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) return parse_split(name);
  }
  return std::nullopt;
}

void write_file_synced(const std::filesystem::path& path, std::string_view contents) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::IOError, what + " " + path.string() + ": " + std::strerror(errno));
  };
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail("cannot create");
  std::size_t done = 0;
  while (done < contents.size()) {
    ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      fail("cannot write");
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    fail("cannot sync");
  }
  if (::close(fd) != 0) fail("cannot close");
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IOError, "cannot move " + tmp.string() + " into place: " + ec.message());
}

}  // namespace errsynth
