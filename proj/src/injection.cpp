#include "errsynth/injection.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <regex>

#include <json.hpp>

#include "errsynth/error.hpp"
#include "errsynth/llm.hpp"
#include "errsynth/random.hpp"
#include "errsynth/text.hpp"

namespace errsynth {

namespace {

bool is_insertion(ErrorClass c) {
  return std::find(kAddedSentenceClasses.begin(), kAddedSentenceClasses.end(), c) != kAddedSentenceClasses.end();
}

bool all_alpha(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

std::string splice_text(std::string_view s, std::size_t begin, std::size_t end, std::string_view repl) {
  std::string out(s.substr(0, begin));
  out += repl;
  out += s.substr(end);
  return out;
}

std::string in_quotes(std::string_view s) { return "'" + std::string(s) + "'"; }

// "an" before vowel sounds, including spelled-out acronyms (an NG tube).
bool takes_an(std::string_view name) {
  if (name.empty()) return false;
  std::size_t n = 0;
  while (n < name.size() && std::isalpha(static_cast<unsigned char>(name[n]))) ++n;
  std::string_view first = name.substr(0, n);
  bool acronym = first.size() > 1 && std::all_of(first.begin(), first.end(), [](char c) {
    return std::isupper(static_cast<unsigned char>(c)) != 0;
  });
  char c = static_cast<char>(std::toupper(static_cast<unsigned char>(name.front())));
  if (acronym) return std::string_view("AEFHILMNORSX").find(c) != std::string_view::npos;
  return std::string_view("AEIOU").find(c) != std::string_view::npos;
}

// Keyboard neighbours for substitution typos.
const char* neighbours(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': return "sq";
    case 'b': return "vn";
    case 'c': return "xv";
    case 'd': return "sf";
    case 'e': return "wr";
    case 'f': return "dg";
    case 'g': return "fh";
    case 'h': return "gj";
    case 'i': return "uo";
    case 'j': return "hk";
    case 'k': return "jl";
    case 'l': return "k";
    case 'm': return "n";
    case 'n': return "bm";
    case 'o': return "ip";
    case 'p': return "o";
    case 'q': return "w";
    case 'r': return "et";
    case 's': return "ad";
    case 't': return "ry";
    case 'u': return "yi";
    case 'v': return "cb";
    case 'w': return "qe";
    case 'x': return "zc";
    case 'y': return "tu";
    case 'z': return "x";
    default: return "";
  }
}

struct Item {
  std::string text;
  std::optional<std::size_t> original;
  ErrorClass cls = ErrorClass::NotApplicable;
  bool planted = false;
  std::string explanation;
};

struct Candidate {
  bool insert = false;
  std::size_t at = 0;  // item to modify, or insertion position
  std::string text;
  std::string explanation;
};

const std::array<std::string_view, 5> kNegationTemplates = {
    "No {}.", "There is no {}.", "No {} is seen.", "No {} is present.", "There is no evidence of {}.",
};

std::string fill(std::string_view tpl, std::string_view phrase) {
  std::string out(tpl);
  auto pos = out.find("{}");
  out.replace(pos, 2, phrase);
  return out;
}

class RuleInjector {
 public:
  RuleInjector(const Report& report, const Lexicon& lex, std::uint64_t seed)
      : original_(report.sentence_texts()), lex_(lex), rng_(seed) {
    for (std::size_t i = 0; i < original_.size(); ++i) items_.push_back({original_[i], i});
  }

  void apply(ErrorClass c) {
    auto cands = candidates(c);
    for (std::size_t i = cands.size(); i > 1; --i) std::swap(cands[i - 1], cands[rng_.index(i)]);
    for (auto& cand : cands) {
      if (!passes_quick_guards(c, cand)) continue;
      auto next = items_;
      if (cand.insert) {
        next.insert(next.begin() + static_cast<std::ptrdiff_t>(cand.at),
                    Item{cand.text, std::nullopt, c, true, cand.explanation});
      } else {
        auto& it = next[cand.at];
        it.text = cand.text;
        it.cls = c;
        it.planted = true;
        it.explanation = cand.explanation;
      }
      if (verify(next)) {
        items_ = std::move(next);
        return;
      }
    }
    throw Error(ErrorCode::NoEligibleSite, std::string(display_name(c)));
  }

  std::size_t site_count(ErrorClass c) const { return candidates(c).size(); }

  InjectionResult result(const ErrorPlan& plan) const {
    InjectionResult r;
    r.backend = "rules";
    r.plan = plan;
    std::vector<DeclaredChange> declared;
    for (std::size_t j = 0; j < items_.size(); ++j) {
      r.error_sentences.push_back(items_[j].text);
      declared.push_back({j, items_[j].planted ? 1 : 0, items_[j].cls, items_[j].explanation, items_[j].original});
    }
    r.error_text = reassemble(std::span<const std::string>(r.error_sentences));
    r.declared = std::move(declared);
    return r;
  }

 private:
  bool exists(std::string_view t) const {
    for (const auto& it : items_) {
      if (it.text == t) return true;
    }
    return std::find(original_.begin(), original_.end(), t) != original_.end();
  }

  bool passes_quick_guards(ErrorClass c, const Candidate& cand) const {
    if (c == ErrorClass::AddRepetitions) return true;
    if (exists(cand.text)) return false;
    if (!cand.insert && lex_.screen_neutral(cand.text)) return false;
    return true;
  }

  // The error text must re-split into exactly these sentences, and the
  // deterministic splice must recover every placement.
  bool verify(const std::vector<Item>& items) const {
    std::vector<std::string> texts;
    for (const auto& it : items) texts.push_back(it.text);
    if (parse_report(reassemble(std::span<const std::string>(texts)), "verify").sentence_texts() != texts) {
      return false;
    }
    auto mapping = align_sentences(original_, texts);
    if (mapping.size() != items.size()) return false;
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (mapping[j].error_index != j || mapping[j].original_index != items[j].original) return false;
    }
    auto records = label_mapping(mapping, original_, texts, nullptr, lex_);
    for (std::size_t j = 0; j < items.size(); ++j) {
      const auto& r = records[j];
      if (items[j].planted) {
        if (r.label != 1 || r.error_class != items[j].cls || r.low_confidence) return false;
      } else if (r.error_class != ErrorClass::NotApplicable) {
        return false;
      }
    }
    return true;
  }

  // Word tokens outside the section header and enumerator.
  std::vector<text::Token> body_words(std::string_view s) const {
    std::size_t skip = sentence_prefix(s).size();
    std::vector<text::Token> out;
    for (auto& t : text::tokenize(s)) {
      if (t.is_word && t.begin >= skip) out.push_back(std::move(t));
    }
    return out;
  }

  std::vector<std::size_t> modifiable() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < items_.size(); ++j) {
      if (items_[j].planted || !items_[j].original) continue;
      if (lex_.screen_neutral(items_[j].text)) continue;
      out.push_back(j);
    }
    return out;
  }

  std::vector<Candidate> candidates(ErrorClass c) const {
    std::vector<Candidate> out;
    if (is_insertion(c)) {
      insertion_candidates(c, out);
      return out;
    }
    for (std::size_t j : modifiable()) {
      const std::string& s = items_[j].text;
      auto add = [&](std::string t, std::string why) { out.push_back({false, j, std::move(t), std::move(why)}); };
      switch (c) {
        case ErrorClass::ChangeSeverity: severity(s, add); break;
        case ErrorClass::ChangeLocation: location(s, add); break;
        case ErrorClass::ChangeMeasurement: measurement(s, add); break;
        case ErrorClass::ChangeNameOfDevice: device_name(s, add); break;
        case ErrorClass::ChangePositionOfDevice: device_position(s, add); break;
        case ErrorClass::FalseNegation: negation(s, add); break;
        case ErrorClass::ChangeToHomophone: homophone(s, add); break;
        case ErrorClass::AddTypo: typo(s, add); break;
        default: break;
      }
    }
    return out;
  }

  template <typename Add>
  void severity(const std::string& s, Add& add) const {
    for (const auto& t : body_words(s)) {
      auto ladder = lex_.ladder_of(t.text);
      if (!ladder) continue;
      // leave compound grades such as "mild-to-moderate" alone
      if ((t.begin > 0 && s[t.begin - 1] == '-') || (t.end < s.size() && s[t.end] == '-')) continue;
      for (const auto& alt : lex_.severity_ladders()[*ladder]) {
        if (text::iequals(alt, t.text)) continue;
        std::string repl = text::match_case(t.text, alt);
        add(splice_text(s, t.begin, t.end, repl), in_quotes(t.text) + " -> " + in_quotes(repl));
      }
    }
  }

  template <typename Add>
  void location(const std::string& s, Add& add) const {
    if (lex_.is_negative(s)) return;
    const auto& swaps = lex_.location_swaps();
    for (const auto& t : body_words(s)) {
      auto it = swaps.find(text::to_lower(t.text));
      if (it == swaps.end()) continue;
      for (const auto& alt : it->second) {
        std::string repl = text::match_case(t.text, alt);
        add(splice_text(s, t.begin, t.end, repl), in_quotes(t.text) + " -> " + in_quotes(repl));
      }
    }
  }

  template <typename Add>
  void measurement(const std::string& s, Add& add) const {
    static const std::regex re(R"((\d+(?:\.\d+)?)(\s?)(mm|cm)\b)", std::regex::icase);
    static constexpr std::array<double, 5> kFactors = {0.5, 0.7, 1.3, 1.5, 2.0};
    for (auto m = std::sregex_iterator(s.begin(), s.end(), re); m != std::sregex_iterator(); ++m) {
      const std::size_t b = static_cast<std::size_t>(m->position(0));
      const std::size_t e = b + static_cast<std::size_t>(m->length(0));
      if (b > 0 && (std::isalnum(static_cast<unsigned char>(s[b - 1])) || s[b - 1] == '.')) continue;
      const std::string value = (*m)[1].str();
      const std::string gap = (*m)[2].str();
      const std::string unit = (*m)[3].str();
      const std::string other = text::iequals(unit, "mm") ? "cm" : "mm";
      add(splice_text(s, b, e, value + gap + text::match_case(unit, other)),
          "unit " + in_quotes(unit) + " -> " + in_quotes(other));

      const auto dot = value.find('.');
      const int decimals = dot == std::string::npos ? 0 : static_cast<int>(value.size() - dot - 1);
      const double v = std::stod(value);
      for (double f : kFactors) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.*f", decimals, v * f);
        std::string nv = buf;
        if (nv == value || std::stod(nv) <= 0.0) continue;
        add(splice_text(s, b, e, nv + gap + unit), "value " + in_quotes(value) + " -> " + in_quotes(nv));
      }
    }
  }

  template <typename Add>
  void device_name(const std::string& s, Add& add) const {
    const auto& devices = lex_.devices();
    for (const auto& h : lex_.find_devices(s)) {
      for (std::size_t k = 0; k < devices.size(); ++k) {
        if (k == h.entry || devices[k].family != devices[h.entry].family) continue;
        std::string name = devices[k].names.front();
        std::string_view old = std::string_view(s).substr(h.begin, h.end - h.begin);
        if (h.begin == sentence_prefix(s).size()) name = text::match_case(old, name);
        std::string t = splice_text(s, h.begin, h.end, name);
        // fix the article in front of the name
        std::size_t p = h.begin;
        while (p > 0 && t[p - 1] == ' ') --p;
        std::size_t w = p;
        while (w > 0 && std::isalpha(static_cast<unsigned char>(t[w - 1]))) --w;
        std::string article = t.substr(w, p - w);
        if (text::iequals(article, "a") || text::iequals(article, "an")) {
          std::string fixed = text::match_case(article, takes_an(name) ? "an" : "a");
          t = splice_text(t, w, p, fixed);
        }
        add(std::move(t), in_quotes(old) + " -> " + in_quotes(name));
      }
    }
  }

  template <typename Add>
  void device_position(const std::string& s, Add& add) const {
    if (!lex_.mentions_device(s)) return;
    for (const auto& h : lex_.find_positions(s)) {
      const std::size_t fam = lex_.position_family_of(h.entry);
      std::string_view old = std::string_view(s).substr(h.begin, h.end - h.begin);
      for (std::size_t k = 0; k < lex_.position_count(); ++k) {
        if (k == h.entry || lex_.position_family_of(k) != fam) continue;
        const std::string& phrase = lex_.position_phrase(k);
        if (text::iequals(phrase, old)) continue;
        add(splice_text(s, h.begin, h.end, phrase), in_quotes(old) + " -> " + in_quotes(phrase));
      }
    }
  }

  template <typename Add>
  void negation(const std::string& s, Add& add) const {
    if (lex_.is_negative(s)) return;
    std::string prefix(sentence_prefix(s));
    if (!prefix.empty() && prefix.back() != ' ') prefix += ' ';
    for (auto [f, neg] : lex_.find_findings(s)) {
      if (neg) continue;
      const auto& phrase = lex_.findings()[f].phrase;
      for (auto tpl : kNegationTemplates) {
        add(prefix + fill(tpl, phrase), "removed positive " + lex_.findings()[f].id);
      }
    }
  }

  template <typename Add>
  void homophone(const std::string& s, Add& add) const {
    for (const auto& t : body_words(s)) {
      for (const auto& alt : lex_.homophones_of(t.text)) {
        std::string repl = text::match_case(t.text, alt);
        add(splice_text(s, t.begin, t.end, repl), in_quotes(t.text) + " -> " + in_quotes(repl));
      }
    }
  }

  template <typename Add>
  void typo(const std::string& s, Add& add) const {
    for (const auto& t : body_words(s)) {
      const std::string& w = t.text;
      if (w.size() < 4 || !all_alpha(w)) continue;
      std::vector<std::string> variants;
      for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        if (w[i] != w[i + 1]) {
          std::string v = w;
          std::swap(v[i], v[i + 1]);
          variants.push_back(v);
        }
      }
      for (std::size_t i = 1; i < w.size(); ++i) variants.push_back(w.substr(0, i) + w.substr(i + 1));
      for (std::size_t i = 1; i < w.size(); ++i) {
        for (const char* n = neighbours(w[i]); *n; ++n) {
          std::string v = w;
          v[i] = std::isupper(static_cast<unsigned char>(w[i])) ? static_cast<char>(std::toupper(*n)) : *n;
          variants.push_back(v);
        }
      }
      for (auto& v : variants) {
        if (text::iequals(v, w) || lex_.is_vocabulary(v)) continue;
        add(splice_text(s, t.begin, t.end, v), in_quotes(w) + " -> " + in_quotes(v));
      }
    }
  }

  void insertion_candidates(ErrorClass c, std::vector<Candidate>& out) const {
    const std::size_t n = items_.size();
    auto everywhere = [&](std::size_t from, const std::string& sentence, const std::string& why) {
      for (std::size_t p = std::max<std::size_t>(from, 1); p <= n; ++p) out.push_back({true, p, sentence, why});
    };
    switch (c) {
      case ErrorClass::AddMedicalDevice: {
        std::vector<std::size_t> present;
        for (const auto& it : items_) {
          for (const auto& h : lex_.find_devices(it.text)) present.push_back(h.entry);
        }
        for (const auto& tpl : lex_.device_insertions()) {
          bool clash = false;
          for (const auto& h : lex_.find_devices(tpl)) {
            clash = clash || std::find(present.begin(), present.end(), h.entry) != present.end();
          }
          if (!clash) everywhere(1, tpl, "added device");
        }
        break;
      }
      case ErrorClass::FalsePrediction: {
        std::vector<bool> mentioned(lex_.findings().size(), false);
        for (const auto& it : items_) {
          for (auto [f, neg] : lex_.find_findings(it.text)) mentioned[f] = true;
        }
        for (std::size_t f = 0; f < mentioned.size(); ++f) {
          const auto& tpl = lex_.findings()[f].positive;
          if (!mentioned[f] && !lex_.mentions_device(tpl)) everywhere(1, tpl, "added finding " + lex_.findings()[f].id);
        }
        break;
      }
      case ErrorClass::AddOppositeSentence: {
        for (std::size_t j = 0; j < n; ++j) {
          if (items_[j].planted) continue;
          for (auto [f, neg] : lex_.find_findings(items_[j].text)) {
            const auto& entry = lex_.findings()[f];
            std::string why = "contradicts sentence " + std::to_string(j) + " on " + entry.id;
            if (neg) {
              everywhere(j + 1, entry.positive, why);
            } else {
              everywhere(j + 1, fill("There is no {}.", entry.phrase), why);
              everywhere(j + 1, fill("No {}.", entry.phrase), why);
            }
          }
        }
        break;
      }
      case ErrorClass::AddRepetitions: {
        for (std::size_t j = 0; j < n; ++j) {
          if (items_[j].planted || starts_with_section_marker(items_[j].text)) continue;
          std::size_t last = j;
          for (std::size_t k = j + 1; k < n; ++k) {
            if (items_[k].text == items_[j].text) last = k;
          }
          everywhere(last + 1, items_[j].text, "repeats sentence " + std::to_string(j));
        }
        break;
      }
      default:
        break;
    }
  }

  std::vector<std::string> original_;
  std::vector<Item> items_;
  const Lexicon& lex_;
  Rng rng_;
};

}  // namespace

InjectionResult inject_with_rules(const Report& report, const ErrorPlan& plan, std::uint64_t seed,
                                  const Lexicon& lex) {
  constexpr std::uint64_t kAttempts = 8;
  const auto classes = plan.classes();
  std::vector<std::pair<std::size_t, ErrorClass>> edits;
  {
    // edits with the fewest sites go first so they are not crowded out
    RuleInjector probe(report, lex, seed);
    for (ErrorClass c : classes) {
      if (!is_insertion(c)) edits.emplace_back(probe.site_count(c), c);
    }
    std::stable_sort(edits.begin(), edits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  std::optional<Error> last;
  for (std::uint64_t attempt = 0; attempt < kAttempts; ++attempt) {
    RuleInjector inj(report, lex, attempt == 0 ? seed : derive_stream(seed, attempt));
    if (attempt > 0) {
      // later attempts also try other edit orders
      std::next_permutation(edits.begin(), edits.end(),
                            [](const auto& a, const auto& b) { return class_code(a.second) < class_code(b.second); });
    }
    try {
      for (auto [n, c] : edits) inj.apply(c);
      for (ErrorClass c : classes) {
        if (is_insertion(c)) inj.apply(c);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoEligibleSite) throw;
      last = e;
      continue;
    }
    auto r = inj.result(plan);
    r.violations = validate_injection(report, r).violations;
    r.flagged = !r.violations.empty();
    return r;
  }
  throw *last;
}

ValidationReport validate_injection(const Report& original, const InjectionResult& result) {
  ValidationReport v;
  const std::string normalized = text::normalize_whitespace(result.error_text);
  if (normalized == original.normalized) v.violations.emplace_back("no change applied");
  if (result.error_text.find("<<<") != std::string::npos || result.error_text.find(">>>") != std::string::npos) {
    v.violations.emplace_back("prompt delimiter leaked into the error report");
  }
  std::size_t n = result.error_sentences.size();
  if (n == 0) {
    v.violations.emplace_back("error report has no sentences");
  }
  const long delta = static_cast<long>(n) - static_cast<long>(original.sentences.size());
  if (delta < -2 || delta > 3) {
    v.violations.push_back("sentence count changed by " + std::to_string(delta));
  }
  if (result.declared) {
    std::vector<bool> seen(n, false);
    for (const auto& d : *result.declared) {
      if (d.error_index >= n) {
        v.violations.push_back("declared error index " + std::to_string(d.error_index) + " out of range");
        continue;
      }
      if (seen[d.error_index]) v.violations.push_back("error index " + std::to_string(d.error_index) + " declared twice");
      seen[d.error_index] = true;
      if (d.label != 0 && d.label != 1) {
        v.violations.push_back("declared label " + std::to_string(d.label) + " at index " +
                               std::to_string(d.error_index));
      }
      if (d.original_index && *d.original_index >= original.sentences.size()) {
        v.violations.push_back("declared original index " + std::to_string(*d.original_index) + " out of range");
      }
    }
  }
  return v;
}

std::optional<std::vector<DeclaredChange>> declared_from_dictionary(const py::Value& dict) {
  if (dict.kind != py::Value::Kind::Dict) return std::nullopt;
  std::vector<DeclaredChange> out;
  for (const auto& [k, v] : dict.dict) {
    DeclaredChange d;
    if (k.is_int() && k.i >= 0) {
      d.error_index = static_cast<std::size_t>(k.i);
    } else if (k.is_str() && !k.s.empty() && std::all_of(k.s.begin(), k.s.end(), ::isdigit)) {
      d.error_index = std::stoul(k.s);
    } else {
      return std::nullopt;
    }
    if (v.kind != py::Value::Kind::List || v.list.empty() || !v.list[0].is_int()) return std::nullopt;
    d.label = static_cast<int>(v.list[0].i);
    if (v.list.size() > 1 && v.list[1].is_str()) d.explanation = v.list[1].s;
    if (v.list.size() > 2 && v.list[2].is_int() && v.list[2].i >= 0) {
      d.original_index = static_cast<std::size_t>(v.list[2].i);
    }
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(),
            [](const DeclaredChange& a, const DeclaredChange& b) { return a.error_index < b.error_index; });
  return out;
}

InjectionResult inject_with_llm(const Report& report, const ErrorPlan& plan, LlmClient& client,
                                const TemplateStore& templates, const LlmInjectOptions& options) {
  PromptBundle bundle = build_injection_prompt(report, plan, templates, options.style);
  const std::string prompt = bundle.assembled();

  auto log = [&](const std::string& response, const std::string& status) {
    if (!options.audit) return;
    options.audit->record({{"report_id", report.id},
                           {"stage", "inject"},
                           {"model", client.model()},
                           {"plan", plan.to_json()},
                           {"prompt_sha256", text::sha256_hex(prompt)},
                           {"response_sha256", response.empty() ? std::string() : text::sha256_hex(response)},
                           {"status", status}});
  };

  std::string response;
  try {
    response = client.complete({bundle.system, bundle.report_text, options.temperature});
  } catch (const Error& e) {
    log("", e.what());
    throw;
  }

  InjectionResult r;
  r.backend = "llm";
  r.plan = plan;
  r.raw_response = response;

  std::string body = response;
  try {
    std::size_t begin = 0;
    py::Value dict = py::parse_trailing_dict(response, &begin);
    body = response.substr(0, begin);
    r.declared = declared_from_dictionary(dict);
  } catch (const Error&) {
    // no trailing dictionary: the whole response is the report
  }
  static const std::regex fence(R"(```[A-Za-z]*)");
  body = text::normalize_whitespace(strip_delimiters(std::regex_replace(body, fence, " ")));
  if (body.empty()) {
    log(response, "unparseable");
    throw Error(ErrorCode::UnparseableResponse, "no report text in response for '" + report.id + "'");
  }
  r.error_text = body;
  r.error_sentences = parse_report(body, report.id).sentence_texts();
  r.violations = validate_injection(report, r).violations;
  r.flagged = !r.violations.empty();
  log(response, r.flagged ? "flagged" : "ok");
  if (r.flagged && options.policy == ValidationPolicy::Reject) {
    std::string all;
    for (const auto& v : r.violations) all += (all.empty() ? "" : "; ") + v;
    throw Error(ErrorCode::ValidationFailed, report.id + ": " + all);
  }
  return r;
}

}  // namespace errsynth
