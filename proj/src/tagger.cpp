#include "errsynth/tagger.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "errsynth/error.hpp"
#include "errsynth/lexicon.hpp"
#include "errsynth/text.hpp"

namespace errsynth {

using nlohmann::json;

KeywordConfig KeywordConfig::from_json(const json& j) {
  KeywordConfig kc;
  for (Tag t : kAllTags) {
    std::string key(tag_name(t));
    if (!j.contains(key)) continue;
    try {
      kc.patterns_[idx(t)] = j.at(key).get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigError, "keywords." + key + ": " + e.what());
    }
    if (kc.patterns_[idx(t)].empty()) continue;
    std::string alt;
    for (const auto& p : kc.patterns_[idx(t)]) {
      if (!alt.empty()) alt += '|';
      alt += "(?:" + p + ")";
    }
    try {
      kc.compiled_[idx(t)] = std::regex("\\b(?:" + alt + ")\\b",
                                        std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::ConfigError, "keywords." + key + ": bad pattern: " + e.what());
    }
    kc.empty_[idx(t)] = false;
  }
  return kc;
}

KeywordConfig KeywordConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return from_json(j);
}

const KeywordConfig& KeywordConfig::builtin() {
  static const KeywordConfig kc = load(default_asset_dir() / "keywords.json");
  return kc;
}

bool KeywordConfig::matches(Tag t, std::string_view sentence) const {
  if (empty_[idx(t)]) return false;
  return std::regex_search(sentence.begin(), sentence.end(), compiled_[idx(t)]);
}

std::vector<Tag> TagSet::tags() const {
  std::vector<Tag> out;
  for (Tag t : kAllTags) {
    if (contains(t)) out.push_back(t);
  }
  return out;
}

std::string TagSet::to_string() const {
  std::string out;
  for (Tag t : tags()) {
    if (!out.empty()) out += ',';
    out += tag_name(t);
  }
  return out;
}

TagSet TagSet::parse(std::string_view list) {
  TagSet s;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    std::string item = text::trim(list.substr(start, comma - start));
    if (!item.empty()) {
      auto t = parse_tag(item);
      if (!t) throw Error(ErrorCode::ParseError, "unknown tag '" + item + "'");
      s.insert(*t);
    }
    start = comma + 1;
  }
  return s;
}

TagSet tag_report(const Report& report, const KeywordConfig& keywords) {
  TagSet out;
  for (Tag t : kAllTags) {
    for (const auto& s : report.sentences) {
      if (keywords.matches(t, s.text)) {
        out.insert(t);
        break;
      }
    }
  }
  return out;
}

TagProfile profile_from_frequencies(const std::array<double, 4>& f, std::size_t corpus_size) {
  TagProfile p;
  p.corpus_size = corpus_size;
  double W = 0.0;
  for (Tag t : kAllTags) {
    auto& s = p.stats[static_cast<std::size_t>(t)];
    s.f = f[static_cast<std::size_t>(t)];
    if (s.f < 0.0 || s.f > 1.0 || std::isnan(s.f)) {
      throw Error(ErrorCode::InvalidProfile, "frequency out of [0,1] for " + std::string(tag_name(t)));
    }
    s.errors = context_error_count(t);
    s.present = s.f > 0.0;
    s.w = s.present ? 1.0 / s.f : 0.0;
    W += s.w;
  }
  p.all_tags_absent = W == 0.0;
  for (auto& s : p.stats) s.w_norm = s.present ? s.w / W : 0.0;
  return p;
}

TagProfile compute_tag_profile(std::span<const TagSet> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot profile an empty corpus");
  std::array<std::size_t, 4> counts{};
  for (const auto& ts : corpus) {
    for (Tag t : kAllTags) {
      if (ts.contains(t)) ++counts[static_cast<std::size_t>(t)];
    }
  }
  std::array<double, 4> f{};
  for (std::size_t i = 0; i < 4; ++i) {
    f[i] = static_cast<double>(counts[i]) / static_cast<double>(corpus.size());
  }
  return profile_from_frequencies(f, corpus.size());
}

void TagProfile::validate() const {
  double sum = 0.0;
  bool any = false;
  for (Tag t : kAllTags) {
    const auto& s = (*this)[t];
    if (s.errors != context_error_count(t)) {
      throw Error(ErrorCode::InvalidProfile, "wrong error count for " + std::string(tag_name(t)));
    }
    if (!s.present) {
      if (s.w_norm != 0.0) {
        throw Error(ErrorCode::InvalidProfile, std::string(tag_name(t)) + " is absent but weighted");
      }
      continue;
    }
    if (!(s.w_norm > 0.0)) {
      throw Error(ErrorCode::InvalidProfile, std::string(tag_name(t)) + " is present without weight");
    }
    any = true;
    sum += s.w_norm;
  }
  if (any && std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidProfile, "normalized weights sum to " + std::to_string(sum));
  }
  if (any == all_tags_absent) {
    throw Error(ErrorCode::InvalidProfile, "all_tags_absent flag disagrees with weights");
  }
}

json TagProfile::to_json() const {
  json tags = json::object();
  for (Tag t : kAllTags) {
    const auto& s = (*this)[t];
    tags[std::string(tag_name(t))] = {{"f", s.f}, {"w", s.w}, {"w_norm", s.w_norm},
                                      {"errors", s.errors}, {"present", s.present}};
  }
  return {{"corpus_size", corpus_size}, {"all_tags_absent", all_tags_absent}, {"tags", tags}};
}

TagProfile TagProfile::from_json(const json& j) {
  TagProfile p;
  try {
    p.corpus_size = j.value("corpus_size", std::size_t{0});
    for (Tag t : kAllTags) {
      const auto& s = j.at("tags").at(std::string(tag_name(t)));
      auto& out = p.stats[static_cast<std::size_t>(t)];
      out.f = s.at("f").get<double>();
      out.w = s.at("w").get<double>();
      out.w_norm = s.at("w_norm").get<double>();
      out.errors = s.value("errors", context_error_count(t));
      out.present = s.value("present", out.f > 0.0);
    }
    p.all_tags_absent = j.value("all_tags_absent", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidProfile, std::string("malformed profile: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace errsynth
