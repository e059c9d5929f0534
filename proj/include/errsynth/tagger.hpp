#pragma once

#include <array>
#include <bitset>
#include <filesystem>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "errsynth/error_class.hpp"
#include "errsynth/report.hpp"

namespace errsynth {

/// Regex patterns per tag. Patterns of one tag are OR-ed together and
/// matched case-insensitively on word boundaries.
class KeywordConfig {
 public:
  static KeywordConfig load(const std::filesystem::path& path);
  static KeywordConfig from_json(const nlohmann::json& j);
  static const KeywordConfig& builtin();

  const std::vector<std::string>& patterns(Tag t) const { return patterns_[idx(t)]; }
  bool matches(Tag t, std::string_view sentence) const;

 private:
  static std::size_t idx(Tag t) { return static_cast<std::size_t>(t); }
  std::array<std::vector<std::string>, 4> patterns_;
  std::array<std::regex, 4> compiled_;
  std::array<bool, 4> empty_{true, true, true, true};
};

class TagSet {
 public:
  TagSet() = default;
  TagSet(std::initializer_list<Tag> tags) {
    for (Tag t : tags) insert(t);
  }
  static TagSet from_bits(unsigned bits) {
    TagSet s;
    s.bits_ = std::bitset<4>(bits & 0xFu);
    return s;
  }

  void insert(Tag t) { bits_.set(static_cast<std::size_t>(t)); }
  bool contains(Tag t) const { return bits_.test(static_cast<std::size_t>(t)); }
  bool empty() const { return bits_.none(); }
  std::size_t size() const { return bits_.count(); }
  unsigned bits() const { return static_cast<unsigned>(bits_.to_ulong()); }
  std::vector<Tag> tags() const;
  std::string to_string() const;  // "device,severity"; "" when empty

  /// Parses a comma list; throws Error(ParseError) on unknown tags.
  static TagSet parse(std::string_view list);

  bool operator==(const TagSet&) const = default;

 private:
  std::bitset<4> bits_;
};

TagSet tag_report(const Report& report, const KeywordConfig& keywords);

struct TagStat {
  double f = 0.0;       // fraction of reports carrying the tag
  double w = 0.0;       // 1/f, 0 when absent
  double w_norm = 0.0;  // w / W
  int errors = 0;       // context-dependent classes gated by the tag
  bool present = false;
};

struct TagProfile {
  std::array<TagStat, 4> stats{};
  std::size_t corpus_size = 0;
  bool all_tags_absent = false;

  const TagStat& operator[](Tag t) const { return stats[static_cast<std::size_t>(t)]; }

  /// Throws Error(InvalidProfile) unless present weights sum to 1 and absent
  /// tags carry no weight.
  void validate() const;

  nlohmann::json to_json() const;
  static TagProfile from_json(const nlohmann::json& j);
};

/// Throws Error(EmptyCorpus) for an empty corpus. A corpus without any tag
/// yields a profile with all_tags_absent set.
TagProfile compute_tag_profile(std::span<const TagSet> corpus);

/// Builds a profile straight from frequencies (f = 0 marks an absent tag).
TagProfile profile_from_frequencies(const std::array<double, 4>& f, std::size_t corpus_size = 0);

}  // namespace errsynth
