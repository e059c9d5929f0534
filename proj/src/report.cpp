#include "errsynth/report.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "errsynth/error.hpp"
#include "errsynth/text.hpp"

namespace errsynth {

namespace {

struct Marker {
  std::string_view literal;
  SectionKind kind;
};

constexpr std::array<Marker, 2> kMarkers = {{{"Findings:", SectionKind::Findings},
                                             {"Impression:", SectionKind::Impression}}};

constexpr std::array<std::string_view, 14> kAbbreviations = {
    "dr.", "drs.", "mr.", "mrs.", "ms.", "vs.", "e.g.", "i.e.", "a.m.", "p.m.", "approx.", "st.",
    "etc.", "no."};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_enumerator(std::string_view word) {
  if (word.size() < 2 || word.size() > 3 || word.back() != '.') return false;
  return std::all_of(word.begin(), word.end() - 1, is_digit);
}

// "No." only abbreviates "number" when a digit follows ("No. 2").
bool protects_boundary(std::string_view word, std::string_view rest) {
  std::string lw = text::to_lower(word);
  if (lw == "no.") return !rest.empty() && is_digit(rest.front());
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lw) != kAbbreviations.end();
}

// True when `so_far` (the open sentence before the current word) is empty or
// only a section header, i.e. the word opens the sentence.
bool opens_sentence(std::string_view so_far) {
  std::string t = text::trim(so_far);
  if (t.empty()) return true;
  for (const auto& m : kMarkers) {
    if (text::iequals(t, m.literal)) return true;
  }
  return false;
}

std::size_t find_marker(std::string_view s, std::size_t from, SectionKind* kind) {
  std::size_t best = std::string_view::npos;
  for (const auto& m : kMarkers) {
    for (std::size_t pos = from; pos + m.literal.size() <= s.size(); ++pos) {
      if (pos > 0 && s[pos - 1] != ' ') continue;
      if (!text::iequals(s.substr(pos, m.literal.size()), m.literal)) continue;
      if (pos < best) {
        best = pos;
        *kind = m.kind;
      }
      break;
    }
  }
  return best;
}

}  // namespace

std::string_view section_name(SectionKind kind) {
  switch (kind) {
    case SectionKind::Findings: return "Findings";
    case SectionKind::Impression: return "Impression";
    case SectionKind::Other: return "Other";
  }
  return "Other";
}

std::vector<std::string> Report::sentence_texts() const {
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.text);
  return out;
}

std::vector<std::string> split_sentences(std::string_view section_text) {
  std::vector<std::string> out;
  const std::string_view s = section_text;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c != '.' && c != '?' && c != '!') continue;
    if (i + 1 < s.size() && s[i + 1] != ' ') continue;
    if (c == '.') {
      std::size_t wstart = s.rfind(' ', i);
      wstart = (wstart == std::string_view::npos || wstart < start) ? start : wstart + 1;
      std::string_view word = s.substr(wstart, i + 1 - wstart);
      std::string_view rest = i + 2 <= s.size() ? s.substr(std::min(i + 2, s.size())) : "";
      if (protects_boundary(word, rest)) continue;
      if (is_enumerator(word) && opens_sentence(s.substr(start, wstart - start))) continue;
    }
    std::string sentence = text::trim(s.substr(start, i + 1 - start));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    start = i + 1;
  }
  std::string tail = text::trim(s.substr(std::min(start, s.size())));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

Report parse_report(std::string_view raw, std::string_view id) {
  Report report;
  report.id = std::string(id);
  report.raw = std::string(raw);
  report.normalized = text::normalize_whitespace(raw);
  if (report.normalized.empty()) {
    throw Error(ErrorCode::EmptyReport, "report '" + report.id + "' is empty");
  }
  const std::string& s = report.normalized;

  SectionKind kind = SectionKind::Other;
  std::size_t first = find_marker(s, 0, &kind);
  std::vector<std::pair<std::size_t, SectionKind>> cuts;
  if (first != 0) cuts.emplace_back(0, SectionKind::Other);
  std::size_t pos = first;
  while (pos != std::string::npos) {
    cuts.emplace_back(pos, kind);
    SectionKind next_kind = SectionKind::Other;
    std::size_t next = find_marker(s, pos + 1, &next_kind);
    pos = next;
    kind = next_kind;
  }
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    std::size_t b = cuts[k].first;
    std::size_t e = k + 1 < cuts.size() ? cuts[k + 1].first : s.size();
    std::string body = text::trim(std::string_view(s).substr(b, e - b));
    if (body.empty()) continue;
    report.sections.push_back(Section{cuts[k].second, body});
  }
  for (const auto& sec : report.sections) {
    for (auto& t : split_sentences(sec.text)) {
      report.sentences.push_back(Sentence{report.sentences.size(), std::move(t), sec.kind});
    }
  }
  return report;
}

std::string reassemble(std::span<const Sentence> sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].index != i) {
      throw Error(ErrorCode::NonContiguousIndices,
                  "expected index " + std::to_string(i) + ", found " +
                      std::to_string(sentences[i].index));
    }
    if (i) out.push_back(' ');
    out += sentences[i].text;
  }
  return out;
}

std::string reassemble(std::span<const std::string> sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out.push_back(' ');
    out += sentences[i];
  }
  return out;
}

bool starts_with_section_marker(std::string_view sentence) {
  for (const auto& m : kMarkers) {
    if (text::starts_with_icase(sentence, m.literal)) return true;
  }
  return false;
}

std::string_view sentence_prefix(std::string_view sentence) {
  std::size_t pos = 0;
  for (const auto& m : kMarkers) {
    if (text::starts_with_icase(sentence, m.literal)) {
      pos = m.literal.size();
      while (pos < sentence.size() && sentence[pos] == ' ') ++pos;
      break;
    }
  }
  std::size_t p = pos;
  while (p < sentence.size() && is_digit(sentence[p])) ++p;
  if (p > pos && p < sentence.size() && sentence[p] == '.' && p - pos <= 2) {
    ++p;
    while (p < sentence.size() && sentence[p] == ' ') ++p;
    pos = p;
  }
  return sentence.substr(0, pos);
}

}  // namespace errsynth
