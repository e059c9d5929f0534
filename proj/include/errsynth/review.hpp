#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "errsynth/error_class.hpp"

namespace errsynth {

enum class Verdict { Plausible, Implausible };

std::string_view verdict_name(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

struct ReviewVerdict {
  std::string report_id;
  Verdict verdict = Verdict::Plausible;
  std::string reviewer;
  std::string timestamp;  // ISO 8601, UTC

  bool operator==(const ReviewVerdict&) const = default;

  nlohmann::ordered_json to_json() const;
  /// Throws Error(SchemaViolation).
  static ReviewVerdict from_json(const nlohmann::json& j);
};

struct ReviewPair {
  std::string report_id;
  std::string ground_truth;
  std::string error_report;
  std::vector<ErrorClass> classes;  // the planted errors, for the breakdown
};

/// Where verdicts come from. Returning nullopt ends the session early.
class VerdictSource {
 public:
  virtual ~VerdictSource() = default;
  virtual std::optional<Verdict> next(const ReviewPair& pair) = 0;
};

/// Fixed verdicts, handed out in order; nullopt once exhausted.
class ScriptedVerdicts : public VerdictSource {
 public:
  explicit ScriptedVerdicts(std::vector<Verdict> verdicts) : verdicts_(std::move(verdicts)) {}
  /// One verdict per line ("plausible"/"implausible", or p/i); blank lines
  /// and '#' comments are skipped. Throws Error(IOError) or Error(ParseError).
  static ScriptedVerdicts from_file(const std::filesystem::path& path);

  std::optional<Verdict> next(const ReviewPair& pair) override;
  std::size_t served() const { return pos_; }

 private:
  std::vector<Verdict> verdicts_;
  std::size_t pos_ = 0;
};

/// Shows each pair side by side and reads p / i / q from the stream.
class TerminalVerdicts : public VerdictSource {
 public:
  TerminalVerdicts(std::istream& in, std::ostream& out, std::size_t width = 100)
      : in_(in), out_(out), width_(width) {}
  std::optional<Verdict> next(const ReviewPair& pair) override;

 private:
  std::istream& in_;
  std::ostream& out_;
  std::size_t width_;
};

/// Two-column rendering of a pair, sentences aligned, changed rows marked.
std::string render_side_by_side(const ReviewPair& pair, std::size_t width = 100);

struct ClassTally {
  std::size_t reviewed = 0;
  std::size_t plausible = 0;
  double fraction() const { return reviewed == 0 ? 0.0 : static_cast<double>(plausible) / reviewed; }
};

struct ReviewSummary {
  std::size_t pairs = 0;
  std::size_t reviewed = 0;
  std::size_t plausible = 0;
  std::map<ErrorClass, ClassTally> per_class;

  double fraction() const { return reviewed == 0 ? 0.0 : static_cast<double>(plausible) / reviewed; }
  std::string render() const;
  nlohmann::ordered_json to_json() const;
};

struct ReviewOptions {
  std::filesystem::path verdict_file;  // append-only JSONL
  std::string reviewer = "reviewer";
  std::function<std::string()> clock;  // defaults to the UTC wall clock
};

/// Verdicts already in the file. A torn final line (a crash mid-write) is
/// cut off; any other bad line throws Error(SchemaViolation).
std::vector<ReviewVerdict> load_verdicts(const std::filesystem::path& path);

ReviewSummary summarize_review(std::span<const ReviewPair> pairs, std::span<const ReviewVerdict> verdicts,
                               std::string_view reviewer);

/// Asks for a verdict on every pair this reviewer has not judged yet and
/// appends each one to the verdict file as soon as it is given.
/// Throws Error(AbortedSession) when the source stops early; everything
/// recorded up to then stays on disk and a rerun picks up from there.
ReviewSummary review_session(std::span<const ReviewPair> pairs, VerdictSource& source, const ReviewOptions& options);

std::string utc_timestamp();

}  // namespace errsynth
