#include "errsynth/review.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "errsynth/error.hpp"
#include "errsynth/report.hpp"
#include "errsynth/splice.hpp"
#include "errsynth/stats.hpp"
#include "errsynth/text.hpp"

namespace errsynth {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view verdict_name(Verdict v) { return v == Verdict::Plausible ? "plausible" : "implausible"; }

std::optional<Verdict> parse_verdict(std::string_view s) {
  std::string l = text::to_lower(text::trim(s));
  if (l == "plausible" || l == "p") return Verdict::Plausible;
  if (l == "implausible" || l == "i") return Verdict::Implausible;
  return std::nullopt;
}

ordered_json ReviewVerdict::to_json() const {
  ordered_json j;
  j["report_id"] = report_id;
  j["verdict"] = verdict_name(verdict);
  j["reviewer"] = reviewer;
  j["timestamp"] = timestamp;
  return j;
}

ReviewVerdict ReviewVerdict::from_json(const json& j) {
  try {
    ReviewVerdict v;
    v.report_id = j.at("report_id").get<std::string>();
    auto verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (!verdict) throw Error(ErrorCode::SchemaViolation, "unknown verdict");
    v.verdict = *verdict;
    v.reviewer = j.at("reviewer").get<std::string>();
    v.timestamp = j.at("timestamp").get<std::string>();
    return v;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("verdict: ") + e.what());
  }
}

ScriptedVerdicts ScriptedVerdicts::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::vector<Verdict> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto v = parse_verdict(t);
    if (!v) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(n) + ": bad verdict '" + t + "'");
    out.push_back(*v);
  }
  return ScriptedVerdicts(std::move(out));
}

std::optional<Verdict> ScriptedVerdicts::next(const ReviewPair&) {
  if (pos_ >= verdicts_.size()) return std::nullopt;
  return verdicts_[pos_++];
}

namespace {

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::vector<std::string> wrap(std::string_view s, std::size_t width) {
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream words{std::string(s)};
  std::string w;
  while (words >> w) {
    while (w.size() > width) {
      if (!cur.empty()) lines.push_back(std::move(cur)), cur.clear();
      lines.push_back(w.substr(0, width));
      w.erase(0, width);
    }
    if (!cur.empty() && cur.size() + 1 + w.size() > width) lines.push_back(std::move(cur)), cur.clear();
    if (!cur.empty()) cur += ' ';
    cur += w;
  }
  if (!cur.empty() || lines.empty()) lines.push_back(cur);
  return lines;
}

std::vector<std::string> sentences_of(const std::string& text) {
  try {
    auto r = parse_report(text, "review");
    std::vector<std::string> out;
    for (auto& s : r.sentences) out.push_back(s.text);
    return out;
  } catch (const Error&) {
    return {};
  }
}

void append_synced(const std::filesystem::path& path, const std::string& line) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::IOError, "cannot open " + path.string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < line.size()) {
    ssize_t n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) {
      ::close(fd);
      throw Error(ErrorCode::IOError, "cannot write " + path.string() + ": " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

std::string render_side_by_side(const ReviewPair& pair, std::size_t width) {
  const std::size_t col = width > 7 ? (width - 7) / 2 : 20;
  auto original = sentences_of(pair.ground_truth);
  auto error = sentences_of(pair.error_report);
  auto records = splice(original, error);

  std::string out = "Report " + pair.report_id + "\n";
  out += "  " + pad_right("Original", col) + " | " + "Error report" + "\n";
  out += "  " + std::string(col, '-') + "-+-" + std::string(col, '-') + "\n";
  for (const auto& r : records) {
    auto left = wrap(r.original_sentence.value_or(""), col);
    auto right = wrap(r.error_sentence.value_or(""), col);
    std::size_t rows = std::max(left.size(), right.size());
    for (std::size_t k = 0; k < rows; ++k) {
      char mark = (k == 0 && r.label == 1) ? '*' : ' ';
      out += mark;
      out += ' ';
      out += pad_right(k < left.size() ? left[k] : "", col);
      out += " | ";
      out += k < right.size() ? right[k] : "";
      out += '\n';
    }
  }
  return out;
}

std::optional<Verdict> TerminalVerdicts::next(const ReviewPair& pair) {
  out_ << render_side_by_side(pair, width_);
  for (;;) {
    out_ << "Could the error report pass as a real report? [p]lausible / [i]mplausible / [q]uit: " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    std::string t = text::to_lower(text::trim(line));
    if (t == "q" || t == "quit") return std::nullopt;
    if (auto v = parse_verdict(t)) return v;
  }
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<ReviewVerdict> load_verdicts(const std::filesystem::path& path) {
  std::vector<ReviewVerdict> out;
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  std::size_t pos = 0, n = 0;
  while (pos < all.size()) {
    std::size_t nl = all.find('\n', pos);
    bool complete = nl != std::string::npos;
    std::string line = all.substr(pos, complete ? nl - pos : std::string::npos);
    ++n;
    if (!complete) {
      // Torn write: drop the partial line so later appends start clean.
      std::filesystem::resize_file(path, pos);
      break;
    }
    if (!line.empty()) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception&) {
        throw Error(ErrorCode::SchemaViolation, path.string() + ":" + std::to_string(n) + ": invalid JSON");
      }
      out.push_back(ReviewVerdict::from_json(j));
    }
    pos = nl + 1;
  }
  return out;
}

ReviewSummary summarize_review(std::span<const ReviewPair> pairs, std::span<const ReviewVerdict> verdicts,
                               std::string_view reviewer) {
  std::map<std::string, Verdict> by_id;
  for (const auto& v : verdicts) {
    if (v.reviewer == reviewer) by_id.emplace(v.report_id, v.verdict);
  }
  ReviewSummary s;
  s.pairs = pairs.size();
  for (const auto& p : pairs) {
    auto it = by_id.find(p.report_id);
    if (it == by_id.end()) continue;
    bool ok = it->second == Verdict::Plausible;
    ++s.reviewed;
    s.plausible += ok;
    std::set<ErrorClass> classes(p.classes.begin(), p.classes.end());
    for (ErrorClass c : classes) {
      auto& t = s.per_class[c];
      ++t.reviewed;
      t.plausible += ok;
    }
  }
  return s;
}

ReviewSummary review_session(std::span<const ReviewPair> pairs, VerdictSource& source, const ReviewOptions& options) {
  if (pairs.empty()) throw Error(ErrorCode::ConfigError, "no pairs to review");
  if (options.verdict_file.empty()) throw Error(ErrorCode::ConfigError, "no verdict file");
  auto clock = options.clock ? options.clock : utc_timestamp;

  auto verdicts = load_verdicts(options.verdict_file);
  std::set<std::string> done;
  for (const auto& v : verdicts) {
    if (v.reviewer == options.reviewer) done.insert(v.report_id);
  }
  std::size_t added = 0;
  for (const auto& p : pairs) {
    if (done.count(p.report_id)) continue;
    auto verdict = source.next(p);
    if (!verdict) {
      throw Error(ErrorCode::AbortedSession, std::to_string(added) + " new verdicts this session, " +
                                                  std::to_string(done.size()) + " of " +
                                                  std::to_string(pairs.size()) + " pairs judged and saved");
    }
    ReviewVerdict v{p.report_id, *verdict, options.reviewer, clock()};
    append_synced(options.verdict_file, v.to_json().dump() + "\n");
    verdicts.push_back(v);
    done.insert(p.report_id);
    ++added;
  }
  return summarize_review(pairs, verdicts, options.reviewer);
}

std::string ReviewSummary::render() const {
  std::string out = "Reviewed " + std::to_string(reviewed) + " of " + std::to_string(pairs) + " pairs; " +
                    std::to_string(plausible) + " plausible (" + format_percent(100.0 * fraction()) + "%)\n";
  for (ErrorClass c : kInjectableClasses) {
    auto it = per_class.find(c);
    if (it == per_class.end()) continue;
    out += "  " + pad_right(std::string(display_name(c)), 26) + std::to_string(it->second.plausible) + "/" +
           std::to_string(it->second.reviewed) + "  " + format_percent(100.0 * it->second.fraction()) + "%\n";
  }
  return out;
}

ordered_json ReviewSummary::to_json() const {
  ordered_json j;
  j["pairs"] = pairs;
  j["reviewed"] = reviewed;
  j["plausible"] = plausible;
  j["fraction"] = fraction();
  j["per_class"] = ordered_json::object();
  for (ErrorClass c : kInjectableClasses) {
    auto it = per_class.find(c);
    if (it == per_class.end()) continue;
    j["per_class"][std::string(display_name(c))] = {{"reviewed", it->second.reviewed},
                                                    {"plausible", it->second.plausible},
                                                    {"fraction", it->second.fraction()}};
  }
  return j;
}

}  // namespace errsynth
