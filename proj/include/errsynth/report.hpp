#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace errsynth {

enum class SectionKind { Findings, Impression, Other };

std::string_view section_name(SectionKind kind);

struct Section {
  SectionKind kind = SectionKind::Other;
  std::string text;  // header kept verbatim, e.g. "Findings: ..."
};

struct Sentence {
  std::size_t index = 0;  // report-global, 0-based
  std::string text;
  SectionKind section = SectionKind::Other;
};

struct Report {
  std::string id;
  std::string raw;
  std::string normalized;
  std::vector<Section> sections;
  std::vector<Sentence> sentences;

  std::vector<std::string> sentence_texts() const;
};

/// Parse raw report text into marker-delimited sections and sentences.
/// Throws Error(EmptyReport) when the text is blank after normalization.
Report parse_report(std::string_view raw, std::string_view id);

/// Split one normalized section into trimmed, non-empty sentences.
///
/// Boundaries are ". ", "? ", "! " and end of text. A period never ends a
/// sentence when it belongs to an abbreviation (Dr., e.g., a.m./p.m., ...)
/// or to a bare list enumerator ("1.") that opens a sentence. Decimals,
/// clock times and de-identification blanks contain no boundary by
/// construction.
std::vector<std::string> split_sentences(std::string_view section_text);

/// Single-space join in index order. Throws Error(NonContiguousIndices).
std::string reassemble(std::span<const Sentence> sentences);
std::string reassemble(std::span<const std::string> sentences);

/// Header/enumerator prefix of a sentence ("Impression: 1. "), possibly empty.
std::string_view sentence_prefix(std::string_view sentence);

bool starts_with_section_marker(std::string_view sentence);

}  // namespace errsynth
