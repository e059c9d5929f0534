#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errsynth/error_class.hpp"
#include "errsynth/lexicon.hpp"
#include "errsynth/pyliteral.hpp"
#include "errsynth/report.hpp"

namespace errsynth {

class LlmClient;
class AuditLog;
class TemplateStore;

inline constexpr double kMatchThreshold = 0.5;

/// One aligned pair. Exactly one side may be absent: no original means an
/// added sentence, no error sentence means an omitted one.
struct MappingEntry {
  std::optional<std::size_t> original_index;
  std::optional<std::size_t> error_index;
  double similarity = 0.0;

  bool operator==(const MappingEntry&) const = default;
};

/// Monotone alignment maximising total token similarity. Pairs below
/// `threshold` never match. An error sentence whose text has already been
/// used up by the original's copies of it is forced to be an addition, so a
/// repeated sentence lands on its later occurrence.
std::vector<MappingEntry> align_sentences(std::span<const std::string> original, std::span<const std::string> error,
                                          double threshold = kMatchThreshold);
std::vector<MappingEntry> align_sentences(const Report& original, const Report& error,
                                          double threshold = kMatchThreshold);

/// Prior/comparison or administrative sentence (label 2 when unchanged).
bool screen_neutral(std::string_view sentence, const Lexicon& lex = Lexicon::builtin());

struct ChangeClass {
  ErrorClass cls = ErrorClass::FalsePrediction;
  bool low_confidence = false;
};

/// Rule cascade over the token diff of two differing sentences.
ChangeClass classify_change(std::string_view original, std::string_view error,
                            const Lexicon& lex = Lexicon::builtin());

/// Class of a sentence with no original counterpart, given the error-report
/// sentences before it.
ErrorClass classify_added(std::string_view sentence, std::span<const std::string> prior,
                          const Lexicon& lex = Lexicon::builtin());

/// Ground truth the injector declares for one error-report sentence.
struct DeclaredChange {
  std::size_t error_index = 0;
  int label = 0;  // 0 unchanged, 1 changed
  ErrorClass cls = ErrorClass::NotApplicable;
  std::string explanation;
  std::optional<std::size_t> original_index;

  bool operator==(const DeclaredChange&) const = default;
};

struct SentenceRecord {
  std::size_t index = 0;  // row position
  std::optional<std::size_t> original_index;
  std::optional<std::size_t> error_index;
  std::optional<std::string> original_sentence;
  std::optional<std::string> error_sentence;
  int label = 0;
  ErrorClass error_class = ErrorClass::NotApplicable;
  bool low_confidence = false;
  bool inconsistent = false;  // declared class disagrees with the observed diff

  bool operator==(const SentenceRecord&) const = default;
};

/// Labels an alignment. With `declared`, changed sentences take the declared
/// class; disagreements with the observed diff set `inconsistent`.
std::vector<SentenceRecord> label_mapping(const std::vector<MappingEntry>& mapping,
                                          std::span<const std::string> original, std::span<const std::string> error,
                                          const std::vector<DeclaredChange>* declared = nullptr,
                                          const Lexicon& lex = Lexicon::builtin());

/// Align then label.
std::vector<SentenceRecord> splice(std::span<const std::string> original, std::span<const std::string> error,
                                   const std::vector<DeclaredChange>* declared = nullptr,
                                   const Lexicon& lex = Lexicon::builtin());

/// {original : error} with '' for gaps, in record order.
py::Value splice_dictionary(const std::vector<SentenceRecord>& records);
/// {original : [label, class code, error]}.
py::Value label_dictionary(const std::vector<SentenceRecord>& records);

/// Strict reading of a splice response: every sentence of both reports must
/// appear once, in order. Throws Error(UnparseableResponse).
std::vector<MappingEntry> mapping_from_dictionary(const py::Value& dict, std::span<const std::string> original,
                                                  std::span<const std::string> error);

/// Strict reading of a label response against the mapping it was asked
/// about. Throws Error(UnparseableResponse).
std::vector<SentenceRecord> records_from_label_dictionary(const py::Value& dict,
                                                          const std::vector<MappingEntry>& mapping,
                                                          std::span<const std::string> original,
                                                          std::span<const std::string> error);

struct SpliceOutcome {
  std::vector<SentenceRecord> records;
  std::string backend;  // "llm" or "rules"
  std::string fallback_reason;
};

/// Splice/label prompts through a backend. Any transport or parse failure
/// falls back to the deterministic path and says why.
SpliceOutcome splice_with_llm(std::span<const std::string> original, std::span<const std::string> error,
                              LlmClient& client, const TemplateStore& templates, AuditLog* audit = nullptr,
                              std::string_view report_id = {}, double temperature = 0.0,
                              const Lexicon& lex = Lexicon::builtin());

}  // namespace errsynth
