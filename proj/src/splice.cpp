#include "errsynth/splice.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <regex>

#include <json.hpp>

#include "errsynth/error.hpp"
#include "errsynth/llm.hpp"
#include "errsynth/prompts.hpp"
#include "errsynth/text.hpp"

namespace errsynth {

namespace {

using Tokens = std::vector<std::string>;

double token_similarity(const Tokens& a, const Tokens& b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(text::token_edit_distance(a, b)) / static_cast<double>(longest);
}

bool is_alpha_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

struct Measurement {
  std::string value;
  std::string unit;
};

// Measurements in token order, plus the token stream with each measurement
// collapsed to a placeholder.
std::pair<std::vector<Measurement>, Tokens> measurements(const Tokens& toks, const Lexicon& lex) {
  static const std::regex glued(R"(^(\d+(?:\.\d+)?)([A-Za-z]+)$)");
  std::vector<Measurement> ms;
  Tokens rest;
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const auto& t = toks[k];
    bool numeric = !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return (c >= '0' && c <= '9') || c == '.'; }) &&
                   t.front() != '.' && t.back() != '.';
    if (numeric && k + 1 < toks.size() && lex.is_unit(toks[k + 1])) {
      ms.push_back({t, text::to_lower(toks[k + 1])});
      rest.emplace_back("\x01");
      ++k;
      continue;
    }
    std::smatch m;
    if (std::regex_match(t, m, glued) && lex.is_unit(m[2].str())) {
      ms.push_back({m[1].str(), text::to_lower(m[2].str())});
      rest.emplace_back("\x01");
      continue;
    }
    rest.push_back(t);
  }
  return {ms, rest};
}

bool is_measurement_change(const Tokens& a, const Tokens& b, const Lexicon& lex) {
  auto [ma, ra] = measurements(a, lex);
  auto [mb, rb] = measurements(b, lex);
  if (ma.empty() || ma.size() != mb.size() || ra != rb) return false;
  int differing = 0;
  bool exclusive = true;
  for (std::size_t k = 0; k < ma.size(); ++k) {
    bool v = ma[k].value != mb[k].value;
    bool u = ma[k].unit != mb[k].unit;
    if (v || u) {
      ++differing;
      exclusive = exclusive && (v != u);
    }
  }
  return differing == 1 && exclusive;
}

template <typename Pred>
bool all_pairs(const std::vector<text::Hunk>& hunks, Pred pred) {
  if (hunks.empty()) return false;
  for (const auto& h : hunks) {
    if (h.removed.empty() || h.removed.size() != h.inserted.size()) return false;
    for (std::size_t k = 0; k < h.removed.size(); ++k) {
      if (text::iequals(h.removed[k], h.inserted[k])) return false;
      if (!pred(h.removed[k]) || !pred(h.inserted[k])) return false;
    }
  }
  return true;
}

bool is_typo(const std::vector<text::Hunk>& hunks, const Lexicon& lex) {
  if (hunks.size() != 1) return false;
  const auto& h = hunks.front();
  if (h.removed.size() == 1 && h.inserted.size() == 1) {
    const auto& from = h.removed[0];
    const auto& to = h.inserted[0];
    if (!is_alpha_word(from) || !is_alpha_word(to) || text::iequals(from, to)) return false;
    if (lex.is_vocabulary(to) || lex.are_homophones(from, to)) return false;
    return text::char_edit_distance(text::to_lower(from), text::to_lower(to)) <= 2;
  }
  // a short stray or dropped word ("which is stable" -> "which stable")
  const auto& side = h.removed.empty() ? h.inserted : h.removed;
  if (h.removed.empty() == h.inserted.empty() || side.size() != 1) return false;
  return is_alpha_word(side[0]) && side[0].size() <= 3 && !lex.is_vocabulary(side[0]);
}

bool is_homophone_swap(const std::vector<text::Hunk>& hunks, const Lexicon& lex) {
  if (hunks.size() != 1) return false;
  const auto& h = hunks.front();
  return h.removed.size() == 1 && h.inserted.size() == 1 && lex.are_homophones(h.removed[0], h.inserted[0]);
}

std::vector<std::size_t> device_ids(std::string_view s, const Lexicon& lex) {
  std::vector<std::size_t> ids;
  for (const auto& h : lex.find_devices(s)) ids.push_back(h.entry);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::string> position_set(std::string_view s, const Lexicon& lex) {
  std::vector<std::string> out;
  for (const auto& h : lex.find_positions(s)) out.push_back(text::to_lower(lex.position_phrase(h.entry)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<std::size_t, bool> polarity(std::string_view s, const Lexicon& lex) {
  std::map<std::size_t, bool> out;
  for (auto [f, neg] : lex.find_findings(s)) out.emplace(f, neg);
  return out;
}

std::string same_text_key(std::string_view s) { return text::normalize_whitespace(s); }

}  // namespace

std::vector<MappingEntry> align_sentences(std::span<const std::string> original, std::span<const std::string> error,
                                          double threshold) {
  const std::size_t m = original.size(), n = error.size();
  std::vector<Tokens> to(m), te(n);
  for (std::size_t i = 0; i < m; ++i) to[i] = text::token_texts(original[i]);
  for (std::size_t j = 0; j < n; ++j) te[j] = text::token_texts(error[j]);

  std::vector<bool> forced(n, false);
  {
    std::map<std::string, std::size_t> in_original, seen;
    for (const auto& s : original) ++in_original[s];
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t c = ++seen[error[j]];
      auto it = in_original.find(error[j]);
      forced[j] = it != in_original.end() && c > it->second;
    }
  }

  constexpr double kNo = -1.0;
  std::vector<double> sim(m * n, kNo);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (forced[j]) continue;
      double s = original[i] == error[j] ? 1.0 : token_similarity(to[i], te[j]);
      if (s >= threshold) sim[i * n + j] = s;
    }
  }

  // best[i][j]: optimal total for original[i:], error[j:]
  std::vector<double> best((m + 1) * (n + 1), 0.0);
  auto B = [&](std::size_t i, std::size_t j) -> double& { return best[i * (n + 1) + j]; };
  for (std::size_t i = m; i-- > 0;) {
    for (std::size_t j = n; j-- > 0;) {
      double v = std::max(B(i, j + 1), B(i + 1, j));
      double s = sim[i * n + j];
      if (s >= 0.0) v = std::max(v, s + B(i + 1, j + 1));
      B(i, j) = v;
    }
  }

  constexpr double kEps = 1e-12;
  std::vector<MappingEntry> out;
  std::size_t i = 0, j = 0;
  while (i < m && j < n) {
    double s = sim[i * n + j];
    if (s >= 0.0 && s + B(i + 1, j + 1) >= B(i, j) - kEps) {
      out.push_back({i, j, s});
      ++i;
      ++j;
    } else if (B(i, j + 1) >= B(i, j) - kEps) {
      out.push_back({std::nullopt, j, 0.0});
      ++j;
    } else {
      out.push_back({i, std::nullopt, 0.0});
      ++i;
    }
  }
  for (; j < n; ++j) out.push_back({std::nullopt, j, 0.0});
  for (; i < m; ++i) out.push_back({i, std::nullopt, 0.0});
  return out;
}

std::vector<MappingEntry> align_sentences(const Report& original, const Report& error, double threshold) {
  auto o = original.sentence_texts();
  auto e = error.sentence_texts();
  return align_sentences(o, e, threshold);
}

bool screen_neutral(std::string_view sentence, const Lexicon& lex) { return lex.screen_neutral(sentence); }

ChangeClass classify_change(std::string_view original, std::string_view error, const Lexicon& lex) {
  Tokens a = text::token_texts(original);
  Tokens b = text::token_texts(error);
  auto hunks = text::diff_tokens(a, b);

  if (is_typo(hunks, lex)) return {ErrorClass::AddTypo};
  if (is_homophone_swap(hunks, lex)) return {ErrorClass::ChangeToHomophone};
  if (is_measurement_change(a, b, lex)) return {ErrorClass::ChangeMeasurement};
  if (all_pairs(hunks, [&](const std::string& w) { return lex.is_severity_term(w); })) {
    return {ErrorClass::ChangeSeverity};
  }
  if (all_pairs(hunks, [&](const std::string& w) { return lex.is_location_term(w); })) {
    return {ErrorClass::ChangeLocation};
  }
  if (device_ids(original, lex) != device_ids(error, lex)) return {ErrorClass::ChangeNameOfDevice};
  if ((lex.mentions_device(original) || lex.mentions_device(error)) &&
      position_set(original, lex) != position_set(error, lex)) {
    return {ErrorClass::ChangePositionOfDevice};
  }

  auto po = polarity(original, lex);
  auto pe = polarity(error, lex);
  const bool neg_o = lex.is_negative(original);
  const bool neg_e = lex.is_negative(error);
  for (auto [f, neg] : po) {
    if (neg) continue;
    auto it = pe.find(f);
    if ((it != pe.end() && it->second) || (it == pe.end() && neg_e)) return {ErrorClass::FalseNegation};
  }
  if (!neg_o && neg_e && pe.empty()) return {ErrorClass::FalseNegation};
  for (auto [f, neg] : pe) {
    if (neg) continue;
    auto it = po.find(f);
    if (it == po.end() || it->second) return {ErrorClass::FalsePrediction};
  }
  if (neg_o && !neg_e) return {ErrorClass::FalsePrediction};
  return {ErrorClass::FalsePrediction, true};
}

ErrorClass classify_added(std::string_view sentence, std::span<const std::string> prior, const Lexicon& lex) {
  const std::string key = same_text_key(sentence);
  for (const auto& p : prior) {
    if (same_text_key(p) == key) return ErrorClass::AddRepetitions;
  }
  if (lex.mentions_device(sentence)) return ErrorClass::AddMedicalDevice;
  auto mine = polarity(sentence, lex);
  for (const auto& p : prior) {
    for (auto [f, neg] : lex.find_findings(p)) {
      auto it = mine.find(f);
      if (it != mine.end() && it->second != neg) return ErrorClass::AddOppositeSentence;
    }
  }
  return ErrorClass::FalsePrediction;
}

std::vector<SentenceRecord> label_mapping(const std::vector<MappingEntry>& mapping,
                                          std::span<const std::string> original, std::span<const std::string> error,
                                          const std::vector<DeclaredChange>* declared, const Lexicon& lex) {
  std::map<std::size_t, const DeclaredChange*> by_error;
  if (declared) {
    for (const auto& d : *declared) by_error[d.error_index] = &d;
  }

  std::vector<SentenceRecord> out;
  out.reserve(mapping.size());
  for (const auto& e : mapping) {
    SentenceRecord r;
    r.index = out.size();
    r.original_index = e.original_index;
    r.error_index = e.error_index;
    if (e.original_index) r.original_sentence = original[*e.original_index];
    if (e.error_index) r.error_sentence = error[*e.error_index];

    const DeclaredChange* d = nullptr;
    if (e.error_index) {
      auto it = by_error.find(*e.error_index);
      if (it != by_error.end()) d = it->second;
    }

    if (r.original_sentence && r.error_sentence) {
      if (*r.original_sentence == *r.error_sentence) {
        r.label = lex.screen_neutral(*r.error_sentence) ? 2 : 0;
        r.error_class = ErrorClass::NotApplicable;
        if (d && (d->label != 0 || d->original_index != e.original_index)) r.inconsistent = true;
      } else {
        auto observed = classify_change(*r.original_sentence, *r.error_sentence, lex);
        r.error_class = observed.cls;
        r.low_confidence = observed.low_confidence;
        if (d) {
          if (d->label == 1 && d->cls != ErrorClass::NotApplicable) r.error_class = d->cls;
          if (d->label != 1 || d->original_index != e.original_index ||
              (d->cls != ErrorClass::NotApplicable && d->cls != observed.cls)) {
            r.inconsistent = true;
          }
        }
        const auto& s = *r.error_sentence;
        r.label = lex.screen_neutral(s) && lex.comparison_led(s) ? 2 : 1;
      }
    } else if (r.error_sentence) {
      auto prior = error.subspan(0, *e.error_index);
      ErrorClass observed = classify_added(*r.error_sentence, prior, lex);
      r.error_class = observed;
      r.label = 1;
      if (d) {
        if (d->label == 1 && d->cls != ErrorClass::NotApplicable) r.error_class = d->cls;
        if (d->label != 1 || d->original_index.has_value() ||
            (d->cls != ErrorClass::NotApplicable && d->cls != observed)) {
          r.inconsistent = true;
        }
      }
    } else {
      r.label = 1;
      r.error_class = ErrorClass::FalseNegation;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SentenceRecord> splice(std::span<const std::string> original, std::span<const std::string> error,
                                   const std::vector<DeclaredChange>* declared, const Lexicon& lex) {
  return label_mapping(align_sentences(original, error), original, error, declared, lex);
}

py::Value splice_dictionary(const std::vector<SentenceRecord>& records) {
  py::Value d;
  d.kind = py::Value::Kind::Dict;
  for (const auto& r : records) {
    d.dict.emplace_back(py::Value::str(r.original_sentence.value_or("")), py::Value::str(r.error_sentence.value_or("")));
  }
  return d;
}

py::Value label_dictionary(const std::vector<SentenceRecord>& records) {
  py::Value d;
  d.kind = py::Value::Kind::Dict;
  for (const auto& r : records) {
    py::Value v;
    v.kind = py::Value::Kind::List;
    v.list = {py::Value::integer(r.label), py::Value::integer(class_code(r.error_class)),
              py::Value::str(r.error_sentence.value_or(""))};
    d.dict.emplace_back(py::Value::str(r.original_sentence.value_or("")), std::move(v));
  }
  return d;
}

namespace {

[[noreturn]] void bad_response(const std::string& what) { throw Error(ErrorCode::UnparseableResponse, what); }

bool same_sentence(std::string_view a, std::string_view b) { return same_text_key(a) == same_text_key(b); }

}  // namespace

std::vector<MappingEntry> mapping_from_dictionary(const py::Value& dict, std::span<const std::string> original,
                                                  std::span<const std::string> error) {
  if (dict.kind != py::Value::Kind::Dict) bad_response("splice response is not a dictionary");
  std::vector<MappingEntry> out;
  std::size_t io = 0, ie = 0;
  for (const auto& [k, v] : dict.dict) {
    if (!k.is_str() || !v.is_str()) bad_response("splice entries must map strings to strings");
    const std::string ks = text::trim(k.s), vs = text::trim(v.s);
    if (ks.empty() && vs.empty()) bad_response("empty '' : '' entry");
    MappingEntry e;
    if (!ks.empty()) {
      if (io >= original.size() || !same_sentence(ks, original[io])) {
        bad_response("original sentence out of order or unknown: " + ks.substr(0, 60));
      }
      e.original_index = io++;
    }
    if (!vs.empty()) {
      if (ie >= error.size() || !same_sentence(vs, error[ie])) {
        bad_response("error sentence out of order or unknown: " + vs.substr(0, 60));
      }
      e.error_index = ie++;
    }
    if (e.original_index && e.error_index) {
      e.similarity = text::sentence_similarity(original[*e.original_index], error[*e.error_index]);
    }
    out.push_back(e);
  }
  if (io != original.size() || ie != error.size()) bad_response("splice response leaves sentences unmapped");
  return out;
}

std::vector<SentenceRecord> records_from_label_dictionary(const py::Value& dict,
                                                          const std::vector<MappingEntry>& mapping,
                                                          std::span<const std::string> original,
                                                          std::span<const std::string> error) {
  if (dict.kind != py::Value::Kind::Dict) bad_response("label response is not a dictionary");
  if (dict.dict.size() != mapping.size()) {
    bad_response("label response has " + std::to_string(dict.dict.size()) + " entries, expected " +
                 std::to_string(mapping.size()));
  }
  std::vector<SentenceRecord> out;
  for (std::size_t k = 0; k < mapping.size(); ++k) {
    const auto& [key, val] = dict.dict[k];
    const auto& e = mapping[k];
    if (!key.is_str() || val.kind != py::Value::Kind::List || val.list.size() != 3) {
      bad_response("label entry " + std::to_string(k) + " is not 'sentence' : [label, class, sentence]");
    }
    const std::string expect_o = e.original_index ? original[*e.original_index] : "";
    const std::string expect_e = e.error_index ? error[*e.error_index] : "";
    if (!same_sentence(key.s, expect_o)) bad_response("label entry " + std::to_string(k) + " has the wrong key");
    const auto& lab = val.list[0];
    const auto& cls = val.list[1];
    const auto& sent = val.list[2];
    if (!lab.is_int() || lab.i < 0 || lab.i > 2) bad_response("label entry " + std::to_string(k) + " has a bad label");
    std::optional<ErrorClass> c;
    if (cls.is_int()) {
      c = class_from_code(static_cast<int>(cls.i));
    } else if (cls.is_str()) {
      c = parse_error_class(cls.s);
    }
    if (!c) bad_response("label entry " + std::to_string(k) + " has an unknown class");
    if (!sent.is_str() || !same_sentence(sent.s, expect_e)) {
      bad_response("label entry " + std::to_string(k) + " has the wrong error sentence");
    }
    SentenceRecord r;
    r.index = k;
    r.original_index = e.original_index;
    r.error_index = e.error_index;
    if (e.original_index) r.original_sentence = expect_o;
    if (e.error_index) r.error_sentence = expect_e;
    r.label = static_cast<int>(lab.i);
    r.error_class = *c;
    out.push_back(std::move(r));
  }
  return out;
}

SpliceOutcome splice_with_llm(std::span<const std::string> original, std::span<const std::string> error,
                              LlmClient& client, const TemplateStore& templates, AuditLog* audit,
                              std::string_view report_id, double temperature, const Lexicon& lex) {
  auto log = [&](const char* stage, const std::string& prompt, const std::string& response, const std::string& status) {
    if (!audit) return;
    audit->record({{"report_id", std::string(report_id)},
                   {"stage", stage},
                   {"model", client.model()},
                   {"prompt_sha256", text::sha256_hex(prompt)},
                   {"response_sha256", response.empty() ? std::string() : text::sha256_hex(response)},
                   {"status", status}});
  };

  SpliceOutcome out;
  std::string stage = "splice";
  std::string prompt, response;
  try {
    prompt = build_splice_prompt(original, error, templates);
    response = client.complete({"", prompt, temperature});
    auto mapping = mapping_from_dictionary(py::parse_trailing_dict(response), original, error);
    log("splice", prompt, response, "ok");

    stage = "label";
    std::vector<SentenceRecord> unlabeled = label_mapping(mapping, original, error, nullptr, lex);
    prompt = build_label_prompt(py::render(splice_dictionary(unlabeled)), templates);
    response.clear();
    response = client.complete({"", prompt, temperature});
    out.records = records_from_label_dictionary(py::parse_trailing_dict(response), mapping, original, error);
    log("label", prompt, response, "ok");
    out.backend = "llm";
    return out;
  } catch (const Error& e) {
    log(stage.c_str(), prompt, response, std::string("fallback: ") + e.what());
    out.fallback_reason = stage + ": " + e.what();
  }
  out.records = splice(original, error, nullptr, lex);
  out.backend = "rules";
  return out;
}

}  // namespace errsynth
