#include "errsynth/lexicon.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "errsynth/error.hpp"
#include "errsynth/report.hpp"
#include "errsynth/text.hpp"

#ifndef ERRSYNTH_DEFAULT_ASSET_DIR
#define ERRSYNTH_DEFAULT_ASSET_DIR "assets"
#endif

namespace errsynth {

using nlohmann::json;

std::filesystem::path default_asset_dir() {
  if (const char* env = std::getenv("ERRSYNTH_ASSETS"); env != nullptr && *env != '\0') {
    return env;
  }
  return ERRSYNTH_DEFAULT_ASSET_DIR;
}

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

std::vector<std::string> lower_all(std::vector<std::string> v) {
  for (auto& s : v) s = text::to_lower(s);
  return v;
}

constexpr auto kRegexFlags = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;

}  // namespace

Lexicon Lexicon::load(const std::filesystem::path& path) {
  json j = read_json_file(path);
  Lexicon lx;
  try {
    for (auto& group : j.at("homophones")) lx.homophones_.push_back(lower_all(group.get<std::vector<std::string>>()));
    for (auto& ladder : j.at("severity_ladders")) lx.ladders_.push_back(lower_all(ladder.get<std::vector<std::string>>()));
    for (auto& ladder : lx.ladders_) lx.severity_terms_.insert(ladder.begin(), ladder.end());
    for (auto& t : j.at("severity_terms")) lx.severity_terms_.insert(text::to_lower(t.get<std::string>()));
    for (auto& [k, v] : j.at("location_swaps").items()) {
      lx.location_swaps_[text::to_lower(k)] = lower_all(v.get<std::vector<std::string>>());
      lx.location_terms_.insert(text::to_lower(k));
    }
    for (auto& t : j.at("location_terms")) lx.location_terms_.insert(text::to_lower(t.get<std::string>()));
    lx.units_ = lower_all(j.at("units").get<std::vector<std::string>>());
    for (auto& d : j.at("devices")) {
      lx.devices_.push_back({d.at("family").get<std::string>(), d.at("names").get<std::vector<std::string>>()});
    }
    lx.device_terms_ = j.at("device_terms").get<std::vector<std::string>>();
    for (auto& p : j.at("device_positions")) {
      PositionFamily fam{p.at("family").get<std::string>(), p.at("phrases").get<std::vector<std::string>>()};
      for (auto& ph : fam.phrases) lx.flat_positions_.emplace_back(ph, lx.positions_.size());
      lx.positions_.push_back(std::move(fam));
    }
    for (auto& f : j.at("findings")) {
      lx.findings_.push_back({f.at("id").get<std::string>(), lower_all(f.at("words").get<std::vector<std::string>>()),
                              f.at("phrase").get<std::string>(), f.at("positive").get<std::string>()});
    }
    lx.device_insertions_ = j.at("device_insertions").get<std::vector<std::string>>();
    for (auto& t : j.at("negation_cues")) lx.negation_cues_.insert(text::to_lower(t.get<std::string>()));
    for (auto& c : j.at("neutral_cues")) lx.neutral_cues_.emplace_back(c.get<std::string>(), kRegexFlags);
    for (auto& c : j.at("neutral_leading_cues")) {
      lx.leading_cues_.emplace_back("^(?:" + c.get<std::string>() + ")", kRegexFlags);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": bad cue pattern: " + e.what());
  }

  auto add_words = [&](std::string_view phrase) {
    for (auto& t : text::tokenize(phrase)) {
      if (t.is_word && !t.is_number) lx.vocabulary_.insert(text::to_lower(t.text));
    }
  };
  for (auto& g : lx.homophones_) for (auto& w : g) add_words(w);
  for (auto& w : lx.severity_terms_) add_words(w);
  for (auto& w : lx.location_terms_) add_words(w);
  for (auto& w : lx.units_) add_words(w);
  for (auto& d : lx.devices_) for (auto& n : d.names) add_words(n);
  for (auto& w : lx.device_terms_) add_words(w);
  for (auto& p : lx.flat_positions_) add_words(p.first);
  for (auto& w : lx.negation_cues_) add_words(w);
  for (auto& f : lx.findings_) for (auto& w : f.words) add_words(w);
  return lx;
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lx = load(default_asset_dir() / "lexicons.json");
  return lx;
}

std::vector<std::string> Lexicon::homophones_of(std::string_view word) const {
  std::string lw = text::to_lower(word);
  std::vector<std::string> out;
  for (const auto& g : homophones_) {
    if (std::find(g.begin(), g.end(), lw) == g.end()) continue;
    for (const auto& w : g) {
      if (w != lw) out.push_back(w);
    }
  }
  return out;
}

bool Lexicon::are_homophones(std::string_view a, std::string_view b) const {
  std::string lb = text::to_lower(b);
  auto alts = homophones_of(a);
  return std::find(alts.begin(), alts.end(), lb) != alts.end();
}

std::optional<std::size_t> Lexicon::ladder_of(std::string_view word) const {
  std::string lw = text::to_lower(word);
  for (std::size_t i = 0; i < ladders_.size(); ++i) {
    if (std::find(ladders_[i].begin(), ladders_[i].end(), lw) != ladders_[i].end()) return i;
  }
  return std::nullopt;
}

bool Lexicon::is_severity_term(std::string_view word) const {
  return severity_terms_.count(text::to_lower(word)) > 0;
}

bool Lexicon::is_location_term(std::string_view word) const {
  return location_terms_.count(text::to_lower(word)) > 0;
}

bool Lexicon::is_unit(std::string_view word) const {
  return std::find(units_.begin(), units_.end(), text::to_lower(word)) != units_.end();
}

bool Lexicon::is_negation_cue(std::string_view word) const {
  return negation_cues_.count(text::to_lower(word)) > 0;
}

bool Lexicon::is_vocabulary(std::string_view word) const {
  return vocabulary_.count(text::to_lower(word)) > 0;
}

std::vector<PhraseHit> Lexicon::find_devices(std::string_view sentence) const {
  std::vector<std::pair<std::string_view, std::size_t>> names;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    for (const auto& n : devices_[i].names) names.emplace_back(n, i);
  }
  std::stable_sort(names.begin(), names.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  std::vector<PhraseHit> hits;
  for (const auto& [name, entry] : names) {
    for (std::size_t pos : text::find_all_words(sentence, name)) {
      std::size_t end = pos + name.size();
      bool overlaps = std::any_of(hits.begin(), hits.end(), [&](const PhraseHit& h) {
        return pos < h.end && h.begin < end;
      });
      if (!overlaps) hits.push_back({pos, end, entry});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const PhraseHit& a, const PhraseHit& b) { return a.begin < b.begin; });
  return hits;
}

bool Lexicon::mentions_device(std::string_view sentence) const {
  if (!find_devices(sentence).empty()) return true;
  return std::any_of(device_terms_.begin(), device_terms_.end(), [&](const std::string& t) {
    return text::find_word(sentence, t) != std::string_view::npos;
  });
}

std::vector<PhraseHit> Lexicon::find_positions(std::string_view sentence) const {
  std::vector<std::size_t> order(flat_positions_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return flat_positions_[a].first.size() > flat_positions_[b].first.size();
  });
  std::vector<PhraseHit> hits;
  for (std::size_t idx : order) {
    const auto& phrase = flat_positions_[idx].first;
    for (std::size_t pos : text::find_all_words(sentence, phrase)) {
      std::size_t end = pos + phrase.size();
      bool overlaps = std::any_of(hits.begin(), hits.end(), [&](const PhraseHit& h) {
        return pos < h.end && h.begin < end;
      });
      if (!overlaps) hits.push_back({pos, end, idx});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const PhraseHit& a, const PhraseHit& b) { return a.begin < b.begin; });
  return hits;
}

std::size_t Lexicon::position_family_of(std::size_t flat_index) const {
  return flat_positions_.at(flat_index).second;
}

const std::string& Lexicon::position_phrase(std::size_t flat_index) const {
  return flat_positions_.at(flat_index).first;
}

std::vector<std::pair<std::size_t, bool>> Lexicon::find_findings(std::string_view sentence) const {
  auto tokens = text::tokenize(sentence);
  std::vector<std::pair<std::size_t, bool>> out;
  for (std::size_t f = 0; f < findings_.size(); ++f) {
    std::optional<std::size_t> first;
    for (const auto& w : findings_[f].words) {
      for (const auto& t : tokens) {
        if (t.is_word && text::iequals(t.text, w)) {
          if (!first || t.begin < *first) first = t.begin;
          break;
        }
      }
    }
    if (!first) continue;
    bool negative = std::any_of(tokens.begin(), tokens.end(), [&](const text::Token& t) {
      return t.begin < *first && t.is_word && is_negation_cue(t.text);
    });
    out.emplace_back(f, negative);
  }
  return out;
}

bool Lexicon::is_negative(std::string_view sentence) const {
  for (const auto& t : text::tokenize(sentence)) {
    if (t.is_word && is_negation_cue(t.text)) return true;
  }
  return false;
}

bool Lexicon::screen_neutral(std::string_view sentence) const {
  std::string s(sentence);
  return std::any_of(neutral_cues_.begin(), neutral_cues_.end(),
                     [&](const std::regex& re) { return std::regex_search(s, re); });
}

bool Lexicon::comparison_led(std::string_view sentence) const {
  std::string body(sentence.substr(sentence_prefix(sentence).size()));
  return std::any_of(leading_cues_.begin(), leading_cues_.end(),
                     [&](const std::regex& re) { return std::regex_search(body, re); });
}

}  // namespace errsynth
