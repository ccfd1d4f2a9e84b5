#include "tsekit/report.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tsekit/dump.h"
#include "tsekit/http_backend.h"
#include "tsekit/synthetic_backend.h"

namespace tsekit {
namespace {

using nlohmann::json;

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("no ") + what + " given");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ConfigError(std::string(what) + " not found: " + path);
  }
}

std::string na_or(const std::optional<double>& v) {
  return v ? format_double(*v) : "NA";
}

json json_or_null(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string file_banner(const std::string& config_hash) {
  return "# tsekit format_version=" + std::to_string(kFormatVersion) +
         " config_hash=" + config_hash + "\n";
}

std::string jsonl_header(const std::string& kind, const std::string& config_hash) {
  json h;
  h["kind"] = kind;
  h["format_version"] = kFormatVersion;
  h["config_hash"] = config_hash;
  return h.dump() + "\n";
}

void write_config(const std::filesystem::path& dir, const RunConfig& config) {
  json j;
  j["format_version"] = kFormatVersion;
  j["config_hash"] = config.hash();
  j["config"] = json::parse(config.to_json());
  write_file(dir / "config.json", j.dump(2) + "\n");
}

std::filesystem::path prepare_output(const RunConfig& config) {
  auto dir = resolve_output_dir(config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() +
                            ": " + ec.message());
  return dir;
}

// Runs produce(i) on `jobs` threads in chunks and hands results to
// consume(i, value) in index order. Stops at the first failing index after
// consuming everything before it, then rethrows that failure.
template <typename T, typename Produce, typename Consume>
void ordered_parallel(size_t n, int jobs, Produce&& produce, Consume&& consume) {
  const size_t workers = static_cast<size_t>(std::max(1, jobs));
  const size_t chunk = std::max<size_t>(1, workers * 8);
  for (size_t begin = 0; begin < n; begin += chunk) {
    const size_t end = std::min(n, begin + chunk);
    std::vector<std::optional<T>> results(end - begin);
    std::vector<std::exception_ptr> errors(end - begin);
    std::atomic<size_t> next{begin};
    auto work = [&] {
      for (size_t i = next++; i < end; i = next++) {
        try {
          results[i - begin] = produce(i);
        } catch (...) {
          errors[i - begin] = std::current_exception();
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (size_t w = 0; w < std::min(workers, end - begin); ++w) pool.emplace_back(work);
    }
    for (size_t i = begin; i < end; ++i) {
      if (errors[i - begin]) std::rethrow_exception(errors[i - begin]);
      consume(i, std::move(*results[i - begin]));
    }
  }
}

std::vector<std::string> lexicon_forms(const Lexicon& lexicon) {
  std::set<std::string> forms;
  for (const auto& p : lexicon.pairs()) {
    forms.insert(p.singular_form);
    forms.insert(p.plural_form);
  }
  return {forms.begin(), forms.end()};
}

std::vector<std::string> candidates_for(const std::vector<std::string>& base,
                                        std::span<const InflectionPair> extra) {
  std::vector<std::string> out = base;
  for (const auto& p : extra) {
    out.push_back(p.singular_form);
    out.push_back(p.plural_form);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string template_score_json(const TemplateScore& s, Number number) {
  json j;
  j["template_id"] = s.template_id;
  j["construction"] = s.construction;
  j["number"] = to_string(number);
  j["tse"] = json_or_null(s.tse);
  j["ew"] = json_or_null(s.ew);
  j["mw"] = json_or_null(s.mw);
  j["n_lemmas_used"] = s.n_lemmas_used;
  j["excluded_reason"] =
      s.excluded_reason ? json(to_string(*s.excluded_reason)) : json(nullptr);
  return j.dump();
}

std::string template_score_tsv_line(const TemplateScore& s, Number number) {
  std::ostringstream os;
  os << s.template_id << '\t' << s.construction << '\t' << to_string(number)
     << '\t' << na_or(s.tse) << '\t' << na_or(s.ew) << '\t' << na_or(s.mw)
     << '\t' << s.n_lemmas_used << '\t'
     << (s.excluded_reason ? to_string(*s.excluded_reason) : "-") << '\n';
  return os.str();
}

constexpr const char* kTemplateScoresHeader =
    "template_id\tconstruction\tnumber\tTSE\tEW\tMW\tn_lemmas_used\texcluded_reason\n";

std::string score_table_jsonl(const ScoreReport& report,
                              const std::string& config_hash) {
  std::string out = jsonl_header("score_table", config_hash);
  for (const auto& r : report.rows) {
    json j;
    j["construction"] = r.group;
    j["MW"] = json_or_null(r.mw.mean);
    j["EW"] = json_or_null(r.ew.mean);
    j["TSE"] = json_or_null(r.tse.mean);
    j["n_MW"] = r.mw.n;
    j["n_EW"] = r.ew.n;
    j["n_TSE"] = r.tse.n;
    j["n_templates"] = r.n_templates;
    j["n_excluded"] = r.n_excluded;
    j["n_excluded_no_eligible_lemmas"] = r.n_excluded_no_eligible;
    j["n_excluded_zero_mass"] = r.n_excluded_zero_mass;
    out += j.dump() + "\n";
  }
  return out;
}

std::string curves_jsonl(const SweepResult& sweep,
                         const std::string& config_hash) {
  std::string out = jsonl_header("curves", config_hash);
  for (const auto& r : sweep.rows) {
    json j;
    j["construction"] = r.construction;
    j["kind"] = to_string(r.kind);
    j["p"] = r.p;
    j["metric"] = to_string(r.metric);
    j["value"] = json_or_null(r.value);
    j["mass_counted"] = r.mass_counted;
    j["invalid_proportion"] = r.invalid_proportion;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<PercentileCutoff> cutoff_grid(const RunConfig& config) {
  std::vector<PercentileCutoff> out;
  try {
    for (double p : config.top_grid) out.emplace_back(CutoffKind::kTop, p);
    for (double p : config.bottom_grid) out.emplace_back(CutoffKind::kBottom, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

void note(std::ostream* log, const std::string& msg) {
  if (log != nullptr) *log << msg << '\n';
}

}  // namespace

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["template_files"] = template_files;
  j["lemma_files"] = lemma_files;
  j["exceptions_file"] = exceptions_file;
  j["reject_file"] = reject_file;
  j["vocab_file"] = vocab_file;
  j["backend"] = backend;
  j["dump_file"] = dump_file;
  j["synthetic_file"] = synthetic_file;
  j["endpoint"] = endpoint;
  j["endpoint_path"] = endpoint_path;
  j["model_id"] = model_id;
  j["direction"] = direction;
  j["max_retries"] = max_retries;
  j["backoff_ms"] = backoff_ms;
  j["capitalize_first"] = capitalize_first;
  j["final_period"] = final_period;
  j["top_grid"] = top_grid;
  j["bottom_grid"] = bottom_grid;
  j["top_requires_both"] = top_requires_both;
  j["top_k"] = top_k;
  j["output_dir"] = output_dir;
  j["jobs"] = jobs;
  j["seed"] = seed;
  return j.dump();
}

void RunConfig::apply_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "template_files") template_files = v.get<std::vector<std::string>>();
      else if (key == "lemma_files") lemma_files = v.get<std::vector<std::string>>();
      else if (key == "exceptions_file") exceptions_file = v.get<std::string>();
      else if (key == "reject_file") reject_file = v.get<std::string>();
      else if (key == "vocab_file") vocab_file = v.get<std::string>();
      else if (key == "backend") backend = v.get<std::string>();
      else if (key == "dump_file") dump_file = v.get<std::string>();
      else if (key == "synthetic_file") synthetic_file = v.get<std::string>();
      else if (key == "endpoint") endpoint = v.get<std::string>();
      else if (key == "endpoint_path") endpoint_path = v.get<std::string>();
      else if (key == "model_id") model_id = v.get<std::string>();
      else if (key == "direction") direction = v.get<std::string>();
      else if (key == "max_retries") max_retries = v.get<int>();
      else if (key == "backoff_ms") backoff_ms = v.get<int>();
      else if (key == "capitalize_first") capitalize_first = v.get<bool>();
      else if (key == "final_period") final_period = v.get<std::string>();
      else if (key == "top_grid") top_grid = v.get<std::vector<double>>();
      else if (key == "bottom_grid") bottom_grid = v.get<std::vector<double>>();
      else if (key == "top_requires_both") top_requires_both = v.get<bool>();
      else if (key == "top_k") top_k = v.get<size_t>();
      else if (key == "output_dir") output_dir = v.get<std::string>();
      else if (key == "jobs") jobs = v.get<int>();
      else if (key == "seed") seed = v.get<std::uint64_t>();
      else throw ConfigError("config: unknown key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string RunConfig::hash() const { return sha256_hex(to_json()).substr(0, 16); }

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  std::filesystem::path dir = config.output_dir;
  if (dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) {
      dir = std::filesystem::path(root) / dir;
    }
  }
  return dir;
}

RunInputs load_inputs(const RunConfig& config) {
  RunInputs in;
  if (config.template_files.empty()) throw ConfigError("no template file given");
  for (const auto& f : config.template_files) require_file(f, "template file");
  if (config.lemma_files.empty()) throw ConfigError("no lemma file given");
  for (const auto& f : config.lemma_files) require_file(f, "lemma file");
  if (!config.exceptions_file.empty()) require_file(config.exceptions_file, "exceptions file");
  if (!config.reject_file.empty()) require_file(config.reject_file, "reject file");
  if (!config.vocab_file.empty()) require_file(config.vocab_file, "vocabulary manifest");
  if (config.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (config.final_period != "auto" && config.final_period != "on" &&
      config.final_period != "off") {
    throw ConfigError("final_period must be auto, on or off");
  }

  LexiconLoadOptions lex_opts;
  if (!config.exceptions_file.empty()) {
    lex_opts.exceptions = load_exceptions(config.exceptions_file);
  }
  if (!config.reject_file.empty()) lex_opts.reject = load_reject_list(config.reject_file);
  for (const auto& f : config.lemma_files) {
    in.lexicon = Lexicon::merge(in.lexicon, load_lemma_list(f, lex_opts));
  }
  in.exceptions = lex_opts.exceptions;
  in.n_lemmas_before_vocab = in.lexicon.size();

  std::optional<VocabManifest> vocab;
  if (!config.vocab_file.empty()) {
    vocab = VocabManifest::load(config.vocab_file);
    auto filtered = filter_by_vocabulary(
        in.lexicon, [&](std::string_view w) { return vocab->contains(w); });
    in.lexicon = std::move(filtered.lexicon);
  }

  for (const auto& f : config.template_files) {
    auto set = load_templates(f);
    for (auto& t : set.templates) in.templates.push_back(std::move(t));
  }

  if (config.backend == "dump") {
    require_file(config.dump_file, "dump file");
    DumpReadOptions opts;
    if (vocab) opts.expected_vocab_hash = vocab->hash();
    in.backend = std::make_unique<DumpBackend>(read_dump(config.dump_file, opts));
  } else if (config.backend == "synthetic") {
    require_file(config.synthetic_file, "synthetic spec");
    in.backend = std::make_unique<SyntheticBackend>(
        SyntheticBackend::load(config.synthetic_file));
  } else if (config.backend == "http") {
    if (config.endpoint.empty()) throw ConfigError("http backend needs an endpoint");
    HttpEndpoint ep;
    ep.base_url = config.endpoint;
    ep.path = config.endpoint_path;
    ep.model_id = config.model_id;
    auto dir = parse_direction(config.direction);
    if (!dir) throw ConfigError("bad direction: " + config.direction);
    ep.direction = *dir;
    ep.max_retries = config.max_retries;
    ep.backoff_base = std::chrono::milliseconds(config.backoff_ms);
    if (const char* token = std::getenv(kApiTokenEnv)) ep.token = token;
    in.backend = std::make_unique<HttpBackend>(std::move(ep));
  } else {
    throw ConfigError("unknown backend: " + config.backend);
  }

  in.policy.capitalize_first = config.capitalize_first;
  in.policy.require_final_period =
      config.final_period == "on" ||
      (config.final_period == "auto" &&
       in.backend->direction() == Direction::kBidirectional);
  return in;
}

std::string template_scores_tsv(const std::vector<TemplateScore>& scores,
                                const std::vector<TemplateInstance>& templates,
                                const std::string& config_hash) {
  std::string out = file_banner(config_hash) + kTemplateScoresHeader;
  for (size_t i = 0; i < scores.size(); ++i) {
    out += template_score_tsv_line(scores[i], templates[i].number);
  }
  return out;
}

std::string score_table_tsv(const ScoreReport& report,
                            const std::string& config_hash) {
  std::string out = file_banner(config_hash);
  out += "construction\tMW\tEW\tTSE\tn_templates\tn_excluded\t"
         "n_excluded_no_eligible_lemmas\tn_excluded_zero_mass\n";
  for (const auto& r : report.rows) {
    out += r.group + '\t' + na_or(r.mw.mean) + '\t' + na_or(r.ew.mean) + '\t' +
           na_or(r.tse.mean) + '\t' + std::to_string(r.n_templates) + '\t' +
           std::to_string(r.n_excluded) + '\t' +
           std::to_string(r.n_excluded_no_eligible) + '\t' +
           std::to_string(r.n_excluded_zero_mass) + '\n';
  }
  return out;
}

std::string curves_tsv(const SweepResult& sweep, const std::string& config_hash) {
  std::string out = file_banner(config_hash);
  out += "construction\tkind\tp\tmetric\tvalue\tmass_counted\tinvalid_proportion\n";
  for (const auto& r : sweep.rows) {
    out += r.construction + '\t' + std::string(to_string(r.kind)) + '\t' +
           format_double(r.p) + '\t' + std::string(to_string(r.metric)) + '\t' +
           na_or(r.value) + '\t' + format_double(r.mass_counted) + '\t' +
           format_double(r.invalid_proportion) + '\n';
  }
  return out;
}

ScoreRun run_score(const RunConfig& config, std::ostream* log) {
  RunInputs in = load_inputs(config);
  ScoreRun run;
  run.config_hash = config.hash();
  run.output_dir = prepare_output(config);
  write_config(run.output_dir, config);
  note(log, "scoring " + std::to_string(in.templates.size()) + " templates with " +
                std::to_string(in.lexicon.size()) + " lemmas");

  const auto base_forms = lexicon_forms(in.lexicon);
  const auto partial_path = run.output_dir / "template_scores.tsv.partial";
  std::ofstream partial(partial_path, std::ios::binary | std::ios::trunc);
  if (!partial) throw ConfigError("cannot write " + partial_path.string());
  partial << file_banner(run.config_hash) << kTemplateScoresHeader;

  try {
    ordered_parallel<TemplateScore>(
        in.templates.size(), config.jobs,
        [&](size_t i) {
          const auto& t = in.templates[i];
          const auto classic = resolve_lemma_set(t.lemmas, in.lexicon, in.exceptions);
          const auto candidates = candidates_for(base_forms, classic);
          const auto dist = in.backend->query(normalize(t, in.policy), candidates);
          return score_template(t, dist, in.lexicon, classic);
        },
        [&](size_t i, TemplateScore&& s) {
          partial << template_score_tsv_line(s, in.templates[i].number);
          run.scores.push_back(std::move(s));
        });
  } catch (const ScoringError& e) {
    partial.flush();
    throw ScoringError(std::string(e.what()) + " (partial results in " +
                       partial_path.string() + ")");
  }
  partial.close();
  std::filesystem::remove(partial_path);

  run.report = aggregate(run.scores);
  write_file(run.output_dir / "template_scores.tsv",
             template_scores_tsv(run.scores, in.templates, run.config_hash));
  std::string jsonl = jsonl_header("template_scores", run.config_hash);
  for (size_t i = 0; i < run.scores.size(); ++i) {
    jsonl += template_score_json(run.scores[i], in.templates[i].number) + "\n";
  }
  write_file(run.output_dir / "template_scores.jsonl", jsonl);
  write_file(run.output_dir / "scores.tsv",
             score_table_tsv(run.report, run.config_hash));
  write_file(run.output_dir / "scores.jsonl",
             score_table_jsonl(run.report, run.config_hash));
  return run;
}

SweepRun run_sweep(const RunConfig& config, std::ostream* log) {
  RunInputs in = load_inputs(config);
  const auto cutoffs = cutoff_grid(config);
  SweepRun run;
  run.config_hash = config.hash();
  run.output_dir = prepare_output(config);
  write_config(run.output_dir, config);
  note(log, "sweeping " + std::to_string(cutoffs.size()) + " cutoffs over " +
                std::to_string(in.templates.size()) + " templates");

  const auto base_forms = lexicon_forms(in.lexicon);
  std::vector<EvalItem> items;
  TruncationOptions options{config.top_requires_both};
  try {
    ordered_parallel<TemplateDistribution>(
        in.templates.size(), config.jobs,
        [&](size_t i) {
          return in.backend->query(normalize(in.templates[i], in.policy), base_forms);
        },
        [&](size_t i, TemplateDistribution&& d) {
          items.push_back(EvalItem{in.templates[i], std::move(d)});
        });
  } catch (const ScoringError& e) {
    const auto partial = run.output_dir / "curves.tsv.partial";
    write_file(partial, curves_tsv(sweep(items, in.lexicon, cutoffs, options),
                                   run.config_hash));
    throw ScoringError(std::string(e.what()) + " (partial results in " +
                       partial.string() + ")");
  }
  run.result = sweep(items, in.lexicon, cutoffs, options);
  if (run.result.straddle_fallbacks > 0) {
    note(log, std::to_string(run.result.straddle_fallbacks) +
                  " interpolation branches were undefined and dropped");
  }
  write_file(run.output_dir / "curves.tsv", curves_tsv(run.result, run.config_hash));
  write_file(run.output_dir / "curves.jsonl", curves_jsonl(run.result, run.config_hash));
  return run;
}

TopkRun run_topk(const RunConfig& config, std::ostream* log) {
  RunInputs in = load_inputs(config);
  TopkRun run;
  const std::string hash = config.hash();
  run.output_dir = prepare_output(config);
  write_config(run.output_dir, config);
  note(log, "listing top " + std::to_string(config.top_k) + " tokens for " +
                std::to_string(in.templates.size()) + " templates");

  auto tsv = [&](const std::vector<QualitativeRow>& rows) {
    std::string out = file_banner(hash) + "template_id\trank\tform\tprob\n";
    for (const auto& r : rows) {
      for (size_t k = 0; k < r.top.size(); ++k) {
        out += r.template_id + '\t' + std::to_string(k + 1) + '\t' +
               r.top[k].form + '\t' + format_double(r.top[k].prob) + '\n';
      }
    }
    return out;
  };
  try {
    ordered_parallel<QualitativeRow>(
        in.templates.size(), config.jobs,
        [&](size_t i) {
          const auto& t = in.templates[i];
          return QualitativeRow{t.id, in.backend->top_k(normalize(t, in.policy),
                                                       config.top_k)};
        },
        [&](size_t, QualitativeRow&& r) { run.rows.push_back(std::move(r)); });
  } catch (const ScoringError& e) {
    const auto partial = run.output_dir / "topk.tsv.partial";
    write_file(partial, tsv(run.rows));
    throw ScoringError(std::string(e.what()) + " (partial results in " +
                       partial.string() + ")");
  }
  write_file(run.output_dir / "topk.tsv", tsv(run.rows));
  std::string jsonl = jsonl_header("topk", hash);
  for (const auto& r : run.rows) {
    json j;
    j["template_id"] = r.template_id;
    json top = json::array();
    for (const auto& t : r.top) top.push_back({{"form", t.form}, {"prob", t.prob}});
    j["top"] = std::move(top);
    jsonl += j.dump() + "\n";
  }
  write_file(run.output_dir / "topk.jsonl", jsonl);
  return run;
}

IngestRun run_ingest(const IngestConfig& config, std::ostream* log) {
  if (config.ml_files.empty() && config.blimp_files.empty()) {
    throw ConfigError("ingest needs at least one --ml or --blimp input");
  }
  for (const auto& f : config.ml_files) require_file(f, "ML slot file");
  for (const auto& f : config.blimp_files) require_file(f, "BLiMP file");
  for (const auto& f : config.lemma_files) require_file(f, "lemma file");

  Lexicon lexicon;
  for (const auto& f : config.lemma_files) {
    lexicon = Lexicon::merge(lexicon, load_lemma_list(f));
  }
  IngestRun run;
  auto absorb = [&](TemplateSet set) {
    run.stats.n_records += set.stats.n_records;
    run.stats.n_duplicates += set.stats.n_duplicates;
    run.stats.n_skipped_diff += set.stats.n_skipped_diff;
    run.stats.n_skipped_number += set.stats.n_skipped_number;
    run.stats.n_skipped_paradigm += set.stats.n_skipped_paradigm;
    for (auto& t : set.templates) run.templates.push_back(std::move(t));
  };
  for (const auto& f : config.ml_files) absorb(load_ml_templates(f));
  BlimpOptions blimp;
  blimp.paradigms = config.paradigms;
  blimp.lexicon = config.lemma_files.empty() ? nullptr : &lexicon;
  for (const auto& f : config.blimp_files) absorb(load_blimp(f, blimp));

  // Serialize through the canonical reader so cross-file duplicates merge
  // exactly as they would at scoring time.
  auto canonical = parse_templates(serialize_templates(run.templates));
  run.stats.n_duplicates += canonical.stats.n_duplicates;
  run.templates = std::move(canonical.templates);

  if (!config.output_file.empty()) {
    write_file(config.output_file, serialize_templates(run.templates));
  }
  note(log, "ingested " + std::to_string(run.templates.size()) + " templates from " +
                std::to_string(run.stats.n_records) + " records (" +
                std::to_string(run.stats.n_duplicates) + " duplicates merged, " +
                std::to_string(run.stats.n_skipped_diff) +
                " pairs not differing in one token, " +
                std::to_string(run.stats.n_skipped_number) +
                " with unknown number, " +
                std::to_string(run.stats.n_skipped_paradigm) +
                " outside selected paradigms)");
  return run;
}

}  // namespace tsekit
