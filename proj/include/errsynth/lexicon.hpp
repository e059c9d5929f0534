#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace errsynth {

/// Directory holding keywords.json, lexicons.json and prompts/. Resolved from
/// $ERRSYNTH_ASSETS, falling back to the path compiled into the library.
std::filesystem::path default_asset_dir();

struct DeviceEntry {
  std::string family;
  std::vector<std::string> names;  // synonyms, first is canonical
};

struct PositionFamily {
  std::string family;
  std::vector<std::string> phrases;
};

struct FindingEntry {
  std::string id;
  std::vector<std::string> words;
  std::string phrase;    // detail-free noun phrase used in negations
  std::string positive;  // a standalone positive sentence for this finding
};

/// A phrase occurrence inside a sentence.
struct PhraseHit {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t entry = 0;  // index into the owning list
};

/// Word lists shared by the rule-based injector and the change classifier.
class Lexicon {
 public:
  static Lexicon load(const std::filesystem::path& path);
  static const Lexicon& builtin();

  const std::vector<std::vector<std::string>>& homophones() const { return homophones_; }
  const std::vector<std::vector<std::string>>& severity_ladders() const { return ladders_; }
  const std::map<std::string, std::vector<std::string>>& location_swaps() const { return location_swaps_; }
  const std::vector<DeviceEntry>& devices() const { return devices_; }
  const std::vector<PositionFamily>& positions() const { return positions_; }
  const std::vector<FindingEntry>& findings() const { return findings_; }
  const std::vector<std::string>& device_insertions() const { return device_insertions_; }
  const std::vector<std::string>& units() const { return units_; }

  /// Alternatives for a homophone (excluding the word itself); empty if none.
  std::vector<std::string> homophones_of(std::string_view word) const;
  bool are_homophones(std::string_view a, std::string_view b) const;

  /// Ladder index containing the word, if any.
  std::optional<std::size_t> ladder_of(std::string_view word) const;
  bool is_severity_term(std::string_view word) const;
  bool is_location_term(std::string_view word) const;
  bool is_unit(std::string_view word) const;
  bool is_negation_cue(std::string_view word) const;

  /// True when the word belongs to any list (used to tell typos from
  /// deliberate word swaps).
  bool is_vocabulary(std::string_view word) const;

  /// Non-overlapping device-name hits, longest name first.
  std::vector<PhraseHit> find_devices(std::string_view sentence) const;
  bool mentions_device(std::string_view sentence) const;
  std::vector<PhraseHit> find_positions(std::string_view sentence) const;
  std::size_t position_family_of(std::size_t flat_index) const;
  const std::string& position_phrase(std::size_t flat_index) const;
  std::size_t position_count() const { return flat_positions_.size(); }

  /// Finding ids mentioned in the sentence with their polarity (true when a
  /// negation cue precedes the mention).
  std::vector<std::pair<std::size_t, bool>> find_findings(std::string_view sentence) const;

  bool is_negative(std::string_view sentence) const;

  bool screen_neutral(std::string_view sentence) const;
  bool comparison_led(std::string_view sentence) const;

 private:
  std::vector<std::vector<std::string>> homophones_;
  std::vector<std::vector<std::string>> ladders_;
  std::set<std::string> severity_terms_;
  std::map<std::string, std::vector<std::string>> location_swaps_;
  std::set<std::string> location_terms_;
  std::vector<std::string> units_;
  std::vector<DeviceEntry> devices_;
  std::vector<std::string> device_terms_;
  std::vector<PositionFamily> positions_;
  std::vector<std::pair<std::string, std::size_t>> flat_positions_;  // phrase, family
  std::vector<FindingEntry> findings_;
  std::vector<std::string> device_insertions_;
  std::set<std::string> negation_cues_;
  std::set<std::string> vocabulary_;
  std::vector<std::regex> neutral_cues_;
  std::vector<std::regex> leading_cues_;
};

}  // namespace errsynth
