#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errsynth/error_class.hpp"

namespace errsynth {

enum class Split { Train, Dev, Test };

std::string_view split_name(Split s);
std::optional<Split> parse_split(std::string_view s);

/// Library version written into manifests.
std::string_view tool_version();

struct Violation {
  std::size_t line = 0;  // 1-based; 0 for file-level findings
  std::string reason;

  bool operator==(const Violation&) const = default;
};

/// One error-report sentence: its label, class and source sentence.
struct IndexMapEntry {
  std::size_t error_index = 0;
  int label = 0;
  ErrorClass error_class = ErrorClass::NotApplicable;
  std::optional<std::size_t> original_index;

  bool operator==(const IndexMapEntry&) const = default;
};

struct ReportRecord {
  std::string id;
  Split split = Split::Train;
  std::string ground_truth;
  std::string error_report;
  std::vector<ErrorClass> error_categories;  // context, content, linguistic
  std::vector<IndexMapEntry> index_map;
  std::uint64_t plan_seed = 0;
  std::string backend;  // "rules" or "llm"
  std::vector<std::string> validation;  // injection findings kept with the record

  bool operator==(const ReportRecord&) const = default;
};

struct SentenceDatasetRow {
  std::string report_id;
  std::size_t index = 0;
  std::optional<std::string> original_sentence;
  std::optional<std::string> error_sentence;
  int label = 0;
  ErrorClass error_class = ErrorClass::NotApplicable;

  bool operator==(const SentenceDatasetRow&) const = default;
};

nlohmann::ordered_json to_json(const ReportRecord& r);
nlohmann::ordered_json to_json(const SentenceDatasetRow& r);
/// Throw Error(SchemaViolation) on missing or mistyped fields.
ReportRecord report_record_from_json(const nlohmann::json& j);
SentenceDatasetRow sentence_row_from_json(const nlohmann::json& j);

/// Invariant checks; an empty list means the record is valid.
std::vector<std::string> check_report_record(const ReportRecord& r);
std::vector<std::string> check_sentence_row(const SentenceDatasetRow& r);
/// Cross-row checks: unique (report_id, index), contiguous ordered indices.
/// `line` is the 1-based row position.
std::vector<Violation> check_sentence_table(std::span<const SentenceDatasetRow> rows);

/// Validate then write JSONL (one object per line, fixed field order,
/// fsync on close). Throws Error(SchemaViolation) naming the first bad
/// record, or Error(IOError).
std::size_t write_report_records(std::span<const ReportRecord> records, const std::filesystem::path& path);
std::size_t write_sentence_records(std::span<const SentenceDatasetRow> rows, const std::filesystem::path& path);

/// Flat CSV with a header row; null sides are empty fields.
std::size_t write_sentence_csv(std::span<const SentenceDatasetRow> rows, const std::filesystem::path& path);

template <typename T>
struct ReadResult {
  std::vector<T> records;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Parses and checks every line. Unless `permissive`, any violation empties
/// `records`. Throws Error(IOError) when the file cannot be read.
ReadResult<ReportRecord> read_report_records(const std::filesystem::path& path, bool permissive = false);
ReadResult<SentenceDatasetRow> read_sentence_records(const std::filesystem::path& path, bool permissive = false);

enum class Schema { Reports, Sentences };

/// Guesses the schema from the first parseable line.
std::optional<Schema> detect_schema(const std::filesystem::path& path);

struct SplitManifest {
  std::map<std::string, std::vector<std::string>> splits;  // split name -> ids
  std::string corpus_hash;
  std::uint64_t run_seed = 0;
  std::string tool_version;

  nlohmann::ordered_json to_json() const;
  static SplitManifest from_json(const nlohmann::json& j);
  /// Split names must be known and the id lists disjoint.
  std::vector<std::string> check() const;
  std::optional<Split> split_of(std::string_view id) const;

  bool operator==(const SplitManifest&) const = default;
};

/// Writes text through a temporary file, fsyncs and renames into place.
void write_file_synced(const std::filesystem::path& path, std::string_view contents);

}  // namespace errsynth
