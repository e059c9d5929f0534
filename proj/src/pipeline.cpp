#include "errsynth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "errsynth/error.hpp"
#include "errsynth/random.hpp"
#include "errsynth/report.hpp"
#include "errsynth/sampler.hpp"
#include "errsynth/splice.hpp"
#include "errsynth/stats.hpp"
#include "errsynth/text.hpp"

namespace errsynth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kReplanSalt = 0x7265706c616e0000ULL;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::optional<std::filesystem::path> optional_path(const json& j, const char* key, const std::filesystem::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return resolve(j.at(key).get<std::string>(), base);
}

bool valid_utf8(const std::string& s) {
  try {
    (void)json(s).dump();
    return true;
  } catch (const json::exception&) {
    return false;
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + p.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

bool retryable(ErrorCode c) { return c == ErrorCode::NoEligibleSite || c == ErrorCode::ValidationFailed; }

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) config_error("config must be a JSON object");
  static const std::set<std::string> known = {"corpus", "out", "seed", "backend", "manifest", "profile",
                                              "keywords", "templates", "workers", "max_replans", "prompt_style",
                                              "validation", "llm_splice", "llm"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) config_error("unknown config key '" + k + "'");
  }
  PipelineConfig c;
  try {
    if (j.contains("corpus")) c.corpus = resolve(j.at("corpus").get<std::string>(), base);
    if (j.contains("out")) c.out = resolve(j.at("out").get<std::string>(), base);
    if (j.contains("seed") && !j.at("seed").is_null()) {
      if (!j.at("seed").is_number_unsigned()) config_error("seed must be a nonnegative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.backend = j.value("backend", c.backend);
    c.manifest = optional_path(j, "manifest", base);
    c.profile = optional_path(j, "profile", base);
    c.keywords = optional_path(j, "keywords", base);
    c.templates = optional_path(j, "templates", base);
    c.workers = j.value("workers", c.workers);
    c.max_replans = j.value("max_replans", c.max_replans);
    std::string style = j.value("prompt_style", std::string("long"));
    if (style == "long") {
      c.prompt_style = PromptStyle::Long;
    } else if (style == "baseline") {
      c.prompt_style = PromptStyle::Baseline;
    } else {
      config_error("prompt_style must be long or baseline");
    }
    std::string policy = j.value("validation", std::string("flag"));
    if (policy == "flag") {
      c.validation = ValidationPolicy::KeepWithFlag;
    } else if (policy == "reject") {
      c.validation = ValidationPolicy::Reject;
    } else {
      config_error("validation must be flag or reject");
    }
    c.llm_splice = j.value("llm_splice", c.llm_splice);
    if (j.contains("llm")) c.llm = HttpLlmConfig::from_json(j.at("llm"));
  } catch (const json::exception& e) {
    config_error(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::string body = read_file(path);
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

ordered_json PipelineConfig::to_json() const {
  ordered_json j;
  j["corpus"] = corpus.string();
  j["out"] = out.string();
  j["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  j["backend"] = backend;
  auto opt = [](const std::optional<std::filesystem::path>& p) {
    return p ? ordered_json(p->string()) : ordered_json(nullptr);
  };
  j["manifest"] = opt(manifest);
  j["profile"] = opt(profile);
  j["keywords"] = opt(keywords);
  j["templates"] = opt(templates);
  j["workers"] = workers;
  j["max_replans"] = max_replans;
  j["prompt_style"] = prompt_style == PromptStyle::Long ? "long" : "baseline";
  j["validation"] = validation == ValidationPolicy::KeepWithFlag ? "flag" : "reject";
  j["llm_splice"] = llm_splice;
  j["llm"] = llm.to_json();
  return j;
}

void PipelineConfig::validate() const {
  if (!seed) config_error("seed is required");
  if (corpus.empty()) config_error("corpus is required");
  if (out.empty()) config_error("out is required");
  if (backend != "rules" && backend != "llm") config_error("backend must be rules or llm, got '" + backend + "'");
  if (workers == 0) config_error("workers must be at least 1");
  if (max_replans < 0) config_error("max_replans must be nonnegative");
  if (backend == "llm") {
    if (llm.endpoint.empty()) config_error("backend llm needs llm.endpoint");
    if (llm.model.empty()) config_error("backend llm needs llm.model");
    const char* key = std::getenv(llm.api_key_env.c_str());
    if (key == nullptr || *key == '\0') config_error("backend llm needs the credential in $" + llm.api_key_env);
  }
}

CorpusLoad load_corpus(const std::filesystem::path& path) {
  CorpusLoad load;
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(path, ec)) {
      if (e.path().extension() == ".txt") files.push_back(e.path());
    }
    if (ec) throw Error(ErrorCode::IOError, "cannot list " + path.string() + ": " + ec.message());
    for (const auto& f : files) {
      std::string id = f.stem().string();
      try {
        load.entries.push_back({id, read_file(f)});
      } catch (const Error& e) {
        load.failures.push_back({id, e.what()});
      }
    }
  } else if (std::filesystem::is_regular_file(path, ec)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (text::trim(line).empty()) continue;
      try {
        auto j = json::parse(line);
        load.entries.push_back({j.at("id").get<std::string>(), j.at("text").get<std::string>()});
      } catch (const json::exception& e) {
        load.failures.push_back({"line " + std::to_string(n), std::string("unreadable corpus line: ") + e.what()});
      }
    }
  } else {
    throw Error(ErrorCode::IOError, "corpus not found: " + path.string());
  }

  std::stable_sort(load.entries.begin(), load.entries.end(),
                   [](const CorpusEntry& a, const CorpusEntry& b) { return a.id < b.id; });
  std::vector<CorpusEntry> unique;
  for (auto& e : load.entries) {
    if (!unique.empty() && unique.back().id == e.id) {
      load.failures.push_back({e.id, "duplicate report id"});
    } else {
      unique.push_back(std::move(e));
    }
  }
  load.entries = std::move(unique);
  return load;
}

std::string corpus_hash(const std::vector<CorpusEntry>& entries) {
  std::vector<const CorpusEntry*> sorted;
  for (const auto& e : entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const CorpusEntry* a, const CorpusEntry* b) { return a->id < b->id; });
  std::string buf;
  for (const auto* e : sorted) {
    buf += e->id;
    buf += '\0';
    buf += e->text;
    buf += '\0';
  }
  return text::sha256_hex(buf);
}

Split hash_split(std::string_view id) {
  std::uint64_t h = derive_seed(0, id) % 10;
  if (h < 8) return Split::Train;
  return h == 8 ? Split::Dev : Split::Test;
}

ReportOutcome process_report(const Report& report, Split split, std::uint64_t run_seed, const RunContext& ctx) {
  const Lexicon& lex = ctx.lexicon ? *ctx.lexicon : Lexicon::builtin();
  const KeywordConfig& keywords = ctx.keywords ? *ctx.keywords : KeywordConfig::builtin();
  const TemplateStore& templates = ctx.templates ? *ctx.templates : TemplateStore::builtin();
  if (ctx.profile == nullptr) throw Error(ErrorCode::ConfigError, "no tag profile");
  const bool llm = ctx.backend == "llm";
  if (llm && ctx.client == nullptr) throw Error(ErrorCode::ConfigError, "llm backend without a client");

  const TagSet tags = tag_report(report, keywords);
  const std::uint64_t base = derive_seed(run_seed, report.id);

  ReportOutcome out;
  InjectionResult result;
  for (int attempt = 0;; ++attempt) {
    std::uint64_t plan_seed = attempt == 0 ? base : derive_stream(base, kReplanSalt + attempt);
    out.plan = sample_plan(tags, *ctx.profile, plan_seed);
    try {
      if (llm) {
        LlmInjectOptions opt;
        opt.style = ctx.prompt_style;
        opt.temperature = 0.7;
        opt.policy = ctx.validation;
        opt.audit = ctx.audit;
        result = inject_with_llm(report, out.plan, *ctx.client, templates, opt);
      } else {
        result = inject_with_rules(report, out.plan, plan_seed, lex);
      }
      break;
    } catch (const Error& e) {
      if (!retryable(e.code()) || attempt >= ctx.max_replans) throw;
      ++out.replans;
    }
  }

  const auto original = report.sentence_texts();
  const auto& error = result.error_sentences;
  std::vector<std::string> notes = result.violations;
  std::vector<SentenceRecord> records;
  if (llm && ctx.llm_splice) {
    auto spliced = splice_with_llm(original, error, *ctx.client, templates, ctx.audit, report.id, 0.0, lex);
    if (!spliced.fallback_reason.empty()) notes.push_back("splice fell back to rules: " + spliced.fallback_reason);
    records = std::move(spliced.records);
  } else {
    records = splice(original, error, result.declared ? &*result.declared : nullptr, lex);
  }

  ReportRecord& rec = out.record;
  rec.id = report.id;
  rec.split = split;
  rec.ground_truth = report.raw;
  rec.error_report = result.error_text;
  auto classes = out.plan.classes();
  rec.error_categories.assign(classes.begin(), classes.end());
  rec.plan_seed = out.plan.seed;
  rec.backend = result.backend;
  for (const auto& r : records) {
    if (r.error_index) rec.index_map.push_back({*r.error_index, r.label, r.error_class, r.original_index});
    const std::string where = "row " + std::to_string(r.index) + ": ";
    if (r.inconsistent) notes.push_back(where + "declared change disagrees with the observed diff");
    if (r.low_confidence) notes.push_back(where + "low-confidence class");
    out.rows.push_back({report.id, r.index, r.original_sentence, r.error_sentence, r.label, r.error_class});
  }
  std::sort(rec.index_map.begin(), rec.index_map.end(),
            [](const IndexMapEntry& a, const IndexMapEntry& b) { return a.error_index < b.error_index; });
  rec.validation = std::move(notes);

  auto problems = check_report_record(rec);
  for (const auto& row : out.rows) {
    for (auto& p : check_sentence_row(row)) problems.push_back("row " + std::to_string(row.index) + ": " + p);
  }
  if (!problems.empty()) throw Error(ErrorCode::SchemaViolation, problems.front());
  return out;
}

ordered_json RunSummary::to_json() const {
  ordered_json j;
  j["processed"] = processed;
  j["injected"] = injected;
  j["failed"] = failed;
  j["replans"] = replans;
  j["per_class"] = ordered_json::object();
  for (ErrorClass c : kInjectableClasses) {
    auto it = per_class.find(c);
    j["per_class"][std::string(display_name(c))] = it == per_class.end() ? 0 : it->second;
  }
  j["failures"] = ordered_json::array();
  for (const auto& f : failures) j["failures"].push_back({{"id", f.id}, {"reason", f.reason}});
  j["wall_seconds"] = wall_seconds;
  j["backend"] = backend;
  j["seed"] = seed;
  return j;
}

RunSummary run_pipeline(const PipelineConfig& config, LlmClient* client) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec || !std::filesystem::is_directory(config.out)) {
    throw Error(ErrorCode::IOError, "cannot create output directory " + config.out.string());
  }

  std::optional<KeywordConfig> keywords;
  if (config.keywords) keywords = KeywordConfig::load(*config.keywords);
  std::optional<TemplateStore> templates;
  if (config.templates) templates = TemplateStore::load(*config.templates);
  std::optional<SplitManifest> manifest;
  if (config.manifest) {
    try {
      manifest = SplitManifest::from_json(json::parse(read_file(*config.manifest)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigError, config.manifest->string() + ": " + e.what());
    }
    auto problems = manifest->check();
    if (!problems.empty()) throw Error(ErrorCode::ConfigError, "split manifest: " + problems.front());
  }

  std::unique_ptr<HttpLlmClient> http;
  std::unique_ptr<AuditLog> audit;
  if (config.backend == "llm") {
    if (client == nullptr) {
      http = std::make_unique<HttpLlmClient>(config.llm);
      client = http.get();
    }
    audit = std::make_unique<AuditLog>(config.out / "audit.jsonl");
  }

  RunSummary summary;
  summary.backend = config.backend;
  summary.seed = *config.seed;

  CorpusLoad corpus = load_corpus(config.corpus);
  summary.failures = corpus.failures;

  struct Parsed {
    Report report;
    Split split;
  };
  std::vector<Parsed> parsed;
  for (const auto& e : corpus.entries) {
    if (!valid_utf8(e.text)) {
      summary.failures.push_back({e.id, "text is not valid UTF-8"});
      continue;
    }
    Split split = hash_split(e.id);
    if (manifest) {
      auto s = manifest->split_of(e.id);
      if (!s) {
        summary.failures.push_back({e.id, "not in the split manifest"});
        continue;
      }
      split = *s;
    }
    try {
      parsed.push_back({parse_report(e.text, e.id), split});
    } catch (const Error& err) {
      summary.failures.push_back({e.id, err.what()});
    }
  }

  const KeywordConfig& kw = keywords ? *keywords : KeywordConfig::builtin();
  TagProfile profile;
  if (config.profile) {
    try {
      profile = TagProfile::from_json(json::parse(read_file(*config.profile)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigError, config.profile->string() + ": " + e.what());
    }
    profile.validate();
  } else {
    std::vector<TagSet> tagsets;
    for (const auto& p : parsed) tagsets.push_back(tag_report(p.report, kw));
    profile = compute_tag_profile(tagsets);
  }

  RunContext ctx;
  ctx.keywords = &kw;
  ctx.profile = &profile;
  ctx.templates = templates ? &*templates : &TemplateStore::builtin();
  ctx.client = client;
  ctx.audit = audit.get();
  ctx.backend = config.backend;
  ctx.max_replans = config.max_replans;
  ctx.prompt_style = config.prompt_style;
  ctx.validation = config.validation;
  ctx.llm_splice = config.llm_splice;

  std::vector<std::optional<ReportOutcome>> outcomes(parsed.size());
  std::vector<std::string> errors(parsed.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < parsed.size();) {
      try {
        outcomes[i] = process_report(parsed[i].report, parsed[i].split, *config.seed, ctx);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::size_t n_workers = std::min(config.workers, std::max<std::size_t>(parsed.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<ReportRecord> records;
  std::vector<SentenceDatasetRow> rows;
  SplitManifest out_manifest;
  for (Split s : {Split::Train, Split::Dev, Split::Test}) out_manifest.splits[std::string(split_name(s))];
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (!outcomes[i]) {
      summary.failures.push_back({parsed[i].report.id, errors[i]});
      continue;
    }
    auto& o = *outcomes[i];
    ++summary.injected;
    summary.replans += static_cast<std::size_t>(o.replans);
    for (ErrorClass c : o.plan.classes()) ++summary.per_class[c];
    out_manifest.splits[std::string(split_name(o.record.split))].push_back(o.record.id);
    records.push_back(std::move(o.record));
    rows.insert(rows.end(), std::make_move_iterator(o.rows.begin()), std::make_move_iterator(o.rows.end()));
  }
  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const Failure& a, const Failure& b) { return a.id < b.id; });
  summary.failed = summary.failures.size();
  summary.processed = summary.injected + summary.failed;

  out_manifest.corpus_hash = corpus_hash(corpus.entries);
  out_manifest.run_seed = *config.seed;
  out_manifest.tool_version = std::string(tool_version());

  write_report_records(records, config.out / "reports.jsonl");
  write_sentence_records(rows, config.out / "sentences.jsonl");
  write_sentence_csv(rows, config.out / "sentences.csv");
  write_file_synced(config.out / "manifest.json", out_manifest.to_json().dump(2) + "\n");
  write_file_synced(config.out / "profile.json", profile.to_json().dump(2) + "\n");
  if (!records.empty()) {
    write_file_synced(config.out / "distribution.csv", compute_distribution(records).render_csv());
  }

  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_file_synced(config.out / "summary.json",
                    summary.to_json().dump(2, ' ', false, json::error_handler_t::replace) + "\n");
  return summary;
}

}  // namespace errsynth
