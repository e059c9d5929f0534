#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "errsynth/dataset.hpp"
#include "errsynth/error.hpp"
#include "errsynth/injection.hpp"
#include "errsynth/llm.hpp"
#include "errsynth/pipeline.hpp"
#include "errsynth/pyliteral.hpp"
#include "errsynth/random.hpp"
#include "errsynth/review.hpp"
#include "errsynth/sampler.hpp"
#include "errsynth/splice.hpp"
#include "errsynth/stats.hpp"
#include "errsynth/tagger.hpp"

using namespace errsynth;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFatal = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string backend;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Writes to --out when given, else stdout.
void emit(const Globals& g, const std::string& body) {
  if (g.out.empty()) {
    std::cout << body;
  } else {
    write_file_synced(g.out, body);
  }
}

PipelineConfig load_config(const Globals& g) {
  PipelineConfig c;
  if (!g.config.empty()) c = PipelineConfig::load(g.config);
  if (g.seed) c.seed = g.seed;
  if (!g.backend.empty()) c.backend = g.backend;
  return c;
}

std::unique_ptr<LlmClient> make_client(const PipelineConfig& c) {
  if (c.llm.endpoint.empty()) throw Error(ErrorCode::ConfigError, "backend llm needs llm.endpoint in --config");
  return std::make_unique<HttpLlmClient>(c.llm);
}

const KeywordConfig& keywords_for(const PipelineConfig& c, std::optional<KeywordConfig>& slot) {
  if (!c.keywords) return KeywordConfig::builtin();
  slot = KeywordConfig::load(*c.keywords);
  return *slot;
}

std::vector<Report> parse_corpus(const std::string& path, std::vector<Failure>& failures) {
  auto load = load_corpus(path);
  failures = load.failures;
  std::vector<Report> out;
  for (const auto& e : load.entries) {
    try {
      out.push_back(parse_report(e.text, e.id));
    } catch (const Error& err) {
      failures.push_back({e.id, err.what()});
    }
  }
  return out;
}

/// Reports from a corpus directory/JSONL, or a single text file.
std::vector<Report> reports_from(const std::string& path, std::vector<Failure>& failures) {
  bool jsonl = std::filesystem::path(path).extension() == ".jsonl";
  if (std::filesystem::is_directory(path) || jsonl) return parse_corpus(path, failures);
  return {parse_report(slurp(path), std::filesystem::path(path).stem().string())};
}

/// "device=0.5,severity=0.25"
TagProfile profile_from_spec(const std::string& spec) {
  std::array<double, 4> f{};
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "expected tag=frequency, got '" + item + "'");
    auto tag = parse_tag(item.substr(0, eq));
    if (!tag) throw Error(ErrorCode::ParseError, "unknown tag '" + item.substr(0, eq) + "'");
    try {
      f[static_cast<std::size_t>(*tag)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad frequency in '" + item + "'");
    }
  }
  return profile_from_frequencies(f);
}

TagProfile profile_from_file(const std::string& path) {
  try {
    return TagProfile::from_json(json::parse(slurp(path)));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string plan_line(const ErrorPlan& p) {
  std::string s;
  for (ErrorClass c : p.classes()) {
    if (!s.empty()) s += " | ";
    s += display_name(c);
  }
  return s;
}

ReviewPair pair_of(const ReportRecord& r) { return {r.id, r.ground_truth, r.error_report, r.error_categories}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic error injection for radiology reports"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Run seed");
  app.add_option("--config", g.config, "Pipeline config (JSON)");
  app.add_option("--backend", g.backend, "rules or llm")->check(CLI::IsMember({"rules", "llm"}));
  app.add_option("--out", g.out, "Output file or directory");

  // tag
  auto* tag = app.add_subcommand("tag", "Print the tag set of each report");
  std::string tag_input;
  tag->add_option("input", tag_input, "Report file, corpus directory or JSONL")->required();

  // profile
  auto* prof = app.add_subcommand("profile", "Compute the tag profile of a corpus");
  std::string prof_input;
  prof->add_option("corpus", prof_input, "Corpus directory or JSONL")->required();

  // sample
  auto* sample = app.add_subcommand("sample", "Sample error plans and print their probabilities");
  std::string sample_tags, sample_freq, sample_profile;
  std::size_t sample_n = 5;
  sample->add_option("--tags", sample_tags, "Tags present in the report, e.g. device,severity");
  auto* freq_opt = sample->add_option("--freq", sample_freq, "Profile as tag=frequency list");
  sample->add_option("--profile", sample_profile, "Profile JSON file")->excludes(freq_opt);
  sample->add_option("-n,--count", sample_n, "Number of plans to draw");

  // inject
  auto* inject = app.add_subcommand("inject", "Inject three errors into one report");
  std::string inject_input, inject_profile;
  inject->add_option("report", inject_input, "Report text file")->required();
  inject->add_option("--profile", inject_profile, "Profile JSON file (default: the report's own tags)");

  // run
  auto* run = app.add_subcommand("run", "Run the full pipeline");

  // splice
  auto* spl = app.add_subcommand("splice", "Align and label an existing pair");
  std::string spl_original, spl_error;
  spl->add_option("original", spl_original, "Ground-truth report file")->required();
  spl->add_option("error", spl_error, "Error report file")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Error distribution per split");
  std::string stats_input, stats_csv;
  stats->add_option("reports", stats_input, "reports.jsonl")->required();
  stats->add_option("--csv", stats_csv, "Also write the table as CSV");

  // review
  auto* review = app.add_subcommand("review", "Plausibility review of paired reports");
  std::string review_input, review_verdicts, review_script, reviewer = "reviewer";
  std::size_t review_limit = 100;
  review->add_option("reports", review_input, "reports.jsonl")->required();
  review->add_option("--verdicts", review_verdicts, "Verdict log (append-only JSONL)")->required();
  review->add_option("--script", review_script, "Scripted verdicts instead of the terminal");
  review->add_option("--reviewer", reviewer, "Reviewer id");
  review->add_option("--limit", review_limit, "Pairs to review");

  // validate
  auto* validate = app.add_subcommand("validate", "Schema check a dataset file");
  std::string val_input, val_schema;
  validate->add_option("file", val_input, "reports.jsonl or sentences.jsonl")->required();
  validate->add_option("--schema", val_schema, "reports or sentences (default: detect)")
      ->check(CLI::IsMember({"reports", "sentences"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kFatal;
  }

  try {
    if (tag->parsed()) {
      PipelineConfig c = load_config(g);
      std::optional<KeywordConfig> slot;
      const auto& kw = keywords_for(c, slot);
      std::vector<Failure> failures;
      std::string body;
      for (const auto& r : reports_from(tag_input, failures)) body += r.id + "\t" + tag_report(r, kw).to_string() + "\n";
      emit(g, body);
      for (const auto& f : failures) std::cerr << f.id << ": " << f.reason << "\n";
      return kOk;
    }

    if (prof->parsed()) {
      PipelineConfig c = load_config(g);
      std::optional<KeywordConfig> slot;
      const auto& kw = keywords_for(c, slot);
      std::vector<Failure> failures;
      std::vector<TagSet> tagsets;
      for (const auto& r : parse_corpus(prof_input, failures)) tagsets.push_back(tag_report(r, kw));
      emit(g, compute_tag_profile(tagsets).to_json().dump(2) + "\n");
      for (const auto& f : failures) std::cerr << f.id << ": " << f.reason << "\n";
      return kOk;
    }

    if (sample->parsed()) {
      TagSet tags = TagSet::parse(sample_tags);
      TagProfile profile;
      if (!sample_profile.empty()) {
        profile = profile_from_file(sample_profile);
      } else if (!sample_freq.empty()) {
        profile = profile_from_spec(sample_freq);
      } else {
        profile = compute_tag_profile(std::vector<TagSet>{tags});
      }
      bool fell_back = false;
      auto dist = context_distribution(tags, profile, &fell_back);
      std::string body = "tags: " + (tags.empty() ? std::string("(none)") : tags.to_string()) + "\n";
      body += fell_back ? "context slot (fallback, uniform over content and linguistic classes):\n"
                        : "context slot:\n";
      for (const auto& [c, p] : dist) {
        char line[96];
        std::snprintf(line, sizeof line, "  %-26s %s\n", std::string(display_name(c)).c_str(), fixed4(p).c_str());
        body += line;
      }
      body += "plans:\n";
      std::uint64_t seed = g.seed.value_or(0);
      for (std::size_t k = 0; k < sample_n; ++k) {
        ErrorPlan plan = sample_plan(tags, profile, derive_stream(seed, k));
        body += "  " + plan_line(plan) + "  p=" + fixed4(plan_probability(plan, tags, profile)) + "\n";
      }
      emit(g, body);
      return kOk;
    }

    if (inject->parsed()) {
      PipelineConfig c = load_config(g);
      std::optional<KeywordConfig> slot;
      const auto& kw = keywords_for(c, slot);
      Report report = parse_report(slurp(inject_input), std::filesystem::path(inject_input).stem().string());
      TagSet tags = tag_report(report, kw);
      TagProfile profile = inject_profile.empty() ? compute_tag_profile(std::vector<TagSet>{tags})
                                                  : profile_from_file(inject_profile);
      std::uint64_t seed = c.seed.value_or(0);
      ErrorPlan plan = sample_plan(tags, profile, seed);
      InjectionResult result;
      std::unique_ptr<LlmClient> client;
      if (c.backend == "llm") {
        client = make_client(c);
        LlmInjectOptions opt;
        opt.style = c.prompt_style;
        opt.policy = c.validation;
        result = inject_with_llm(report, plan, *client, TemplateStore::builtin(), opt);
      } else {
        result = inject_with_rules(report, plan, seed);
      }
      nlohmann::ordered_json j;
      j["id"] = report.id;
      j["tags"] = tags.to_string();
      j["plan"] = plan.to_json();
      j["backend"] = result.backend;
      j["error_report"] = result.error_text;
      j["declared"] = nlohmann::ordered_json::array();
      if (result.declared) {
        for (const auto& d : *result.declared) {
          j["declared"].push_back({{"error_index", d.error_index},
                                   {"label", d.label},
                                   {"class", display_name(d.cls)},
                                   {"original_index", d.original_index ? json(*d.original_index) : json(nullptr)},
                                   {"explanation", d.explanation}});
        }
      }
      j["violations"] = result.violations;
      emit(g, j.dump(2) + "\n");
      return result.flagged ? kInvalid : kOk;
    }

    if (run->parsed()) {
      PipelineConfig c = load_config(g);
      if (!g.out.empty()) c.out = g.out;
      RunSummary s = run_pipeline(c);
      std::cout << s.to_json().dump(2, ' ', false, json::error_handler_t::replace) << "\n";
      return kOk;
    }

    if (spl->parsed()) {
      PipelineConfig c = load_config(g);
      auto original = parse_report(slurp(spl_original), "original").sentence_texts();
      auto error = parse_report(slurp(spl_error), "error").sentence_texts();
      std::vector<SentenceRecord> records;
      std::string backend = "rules";
      if (c.backend == "llm") {
        auto client = make_client(c);
        auto outcome = splice_with_llm(original, error, *client, TemplateStore::builtin());
        records = outcome.records;
        backend = outcome.backend;
        if (!outcome.fallback_reason.empty()) std::cerr << "fell back to rules: " << outcome.fallback_reason << "\n";
      } else {
        records = splice(original, error);
      }
      std::string body = "index\tlabel\tclass\toriginal\terror\n";
      for (const auto& r : records) {
        body += std::to_string(r.index) + "\t" + std::to_string(r.label) + "\t" +
                std::string(display_name(r.error_class)) + "\t" + r.original_sentence.value_or("-") + "\t" +
                r.error_sentence.value_or("-") + "\n";
      }
      body += "\n" + py::render(splice_dictionary(records)) + "\n\n" + py::render(label_dictionary(records)) + "\n";
      emit(g, body);
      return kOk;
    }

    if (stats->parsed()) {
      auto read = read_report_records(stats_input, /*permissive=*/true);
      for (const auto& v : read.violations) std::cerr << stats_input << ":" << v.line << ": " << v.reason << "\n";
      auto dist = compute_distribution(read.records);
      emit(g, dist.render_table());
      if (!stats_csv.empty()) write_file_synced(stats_csv, dist.render_csv());
      return read.ok() ? kOk : kInvalid;
    }

    if (review->parsed()) {
      auto read = read_report_records(review_input, /*permissive=*/false);
      if (!read.ok()) {
        for (const auto& v : read.violations) std::cerr << review_input << ":" << v.line << ": " << v.reason << "\n";
        return kInvalid;
      }
      std::vector<ReviewPair> pairs;
      for (const auto& r : read.records) {
        if (pairs.size() >= review_limit) break;
        pairs.push_back(pair_of(r));
      }
      ReviewOptions opt;
      opt.verdict_file = review_verdicts;
      opt.reviewer = reviewer;
      std::unique_ptr<VerdictSource> source;
      if (!review_script.empty()) {
        source = std::make_unique<ScriptedVerdicts>(ScriptedVerdicts::from_file(review_script));
      } else {
        source = std::make_unique<TerminalVerdicts>(std::cin, std::cout);
      }
      try {
        auto summary = review_session(pairs, *source, opt);
        emit(g, summary.render());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AbortedSession) throw;
        std::cerr << e.what() << "\n";
        auto summary = summarize_review(pairs, load_verdicts(review_verdicts), reviewer);
        std::cerr << summary.render();
        return kInvalid;
      }
      return kOk;
    }

    if (validate->parsed()) {
      std::optional<Schema> schema;
      if (val_schema == "reports") schema = Schema::Reports;
      if (val_schema == "sentences") schema = Schema::Sentences;
      if (!schema) schema = detect_schema(val_input);
      if (!schema) {
        std::cerr << val_input << ": cannot tell the schema; pass --schema\n";
        return kInvalid;
      }
      std::vector<Violation> violations;
      std::size_t count = 0;
      if (*schema == Schema::Reports) {
        auto r = read_report_records(val_input, true);
        violations = r.violations;
        count = r.records.size();
      } else {
        auto r = read_sentence_records(val_input, true);
        violations = r.violations;
        count = r.records.size();
      }
      for (const auto& v : violations) std::cout << val_input << ":" << v.line << ": " << v.reason << "\n";
      std::cout << count << " valid, " << violations.size() << " violations\n";
      return violations.empty() ? kOk : kInvalid;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::SchemaViolation:
      case ErrorCode::ValidationFailed:
        return kInvalid;
      default:
        return kFatal;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFatal;
  }
  return kOk;
}
