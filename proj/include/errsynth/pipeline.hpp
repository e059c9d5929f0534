#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "errsynth/dataset.hpp"
#include "errsynth/injection.hpp"
#include "errsynth/llm.hpp"
#include "errsynth/prompts.hpp"
#include "errsynth/tagger.hpp"

namespace errsynth {

/// Run settings. Stored as a flat JSON object; see README for the keys.
struct PipelineConfig {
  std::filesystem::path corpus;  // directory of .txt files or a JSONL file of {id, text}
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::string backend = "rules";  // rules | llm
  std::optional<std::filesystem::path> manifest;  // fixed split assignment
  std::optional<std::filesystem::path> profile;   // fixed TagProfile instead of the corpus one
  std::optional<std::filesystem::path> keywords;
  std::optional<std::filesystem::path> templates;
  std::size_t workers = 1;
  int max_replans = 8;
  PromptStyle prompt_style = PromptStyle::Long;
  ValidationPolicy validation = ValidationPolicy::KeepWithFlag;
  bool llm_splice = false;  // align and label through the backend too (opt-in)
  HttpLlmConfig llm;

  /// Relative paths are taken against `base`. Throws Error(ConfigError).
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
  /// Throws Error(IOError) or Error(ConfigError).
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;

  /// Seed present, backend known, and for llm an endpoint, a model and the
  /// credential variable set. Throws Error(ConfigError).
  void validate() const;
};

struct CorpusEntry {
  std::string id;
  std::string text;
};

struct Failure {
  std::string id;
  std::string reason;

  bool operator==(const Failure&) const = default;
};

struct CorpusLoad {
  std::vector<CorpusEntry> entries;  // sorted by id
  std::vector<Failure> failures;     // entries that could not be read
};

/// Throws Error(IOError) when the path is missing or unreadable as a whole.
CorpusLoad load_corpus(const std::filesystem::path& path);

/// sha256 over the sorted (id, text) pairs.
std::string corpus_hash(const std::vector<CorpusEntry>& entries);

/// 80/10/10 by a hash of the id alone.
Split hash_split(std::string_view id);

/// Everything one report contributes to the datasets.
struct ReportOutcome {
  ReportRecord record;
  std::vector<SentenceDatasetRow> rows;
  ErrorPlan plan;
  int replans = 0;
};

/// Shared, read-only state for per-report work.
struct RunContext {
  const KeywordConfig* keywords = nullptr;
  const TagProfile* profile = nullptr;
  const Lexicon* lexicon = nullptr;
  const TemplateStore* templates = nullptr;
  LlmClient* client = nullptr;  // llm backend only
  AuditLog* audit = nullptr;
  std::string backend = "rules";
  int max_replans = 8;
  PromptStyle prompt_style = PromptStyle::Long;
  ValidationPolicy validation = ValidationPolicy::KeepWithFlag;
  bool llm_splice = false;
};

/// Tag, plan (re-planning with derived seeds when a class has no site),
/// inject, align, label. Throws Error on anything that fails the report.
ReportOutcome process_report(const Report& report, Split split, std::uint64_t run_seed, const RunContext& ctx);

struct RunSummary {
  std::size_t processed = 0;
  std::size_t injected = 0;
  std::size_t failed = 0;
  std::size_t replans = 0;
  std::map<ErrorClass, std::size_t> per_class;  // plan counts over injected reports
  std::vector<Failure> failures;
  double wall_seconds = 0.0;
  std::string backend;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
};

/// Full run. Writes reports.jsonl, sentences.jsonl, sentences.csv,
/// manifest.json, profile.json, distribution.csv and summary.json under
/// config.out. `client` overrides the HTTP backend (tests).
/// Throws Error(ConfigError), Error(IOError) for the output directory or the
/// corpus as a whole, Error(EmptyCorpus) when no report parses.
RunSummary run_pipeline(const PipelineConfig& config, LlmClient* client = nullptr);

}  // namespace errsynth
