// Run orchestration: configuration, backend construction, parallel
// scoring and the table/curve/top-k writers behind the CLI.

#ifndef TSEKIT_REPORT_H_
#define TSEKIT_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsekit/backend.h"
#include "tsekit/lexicon.h"
#include "tsekit/metrics.h"
#include "tsekit/templates.h"
#include "tsekit/truncation.h"

namespace tsekit {

// Relative output directories are resolved under this root when set.
inline constexpr const char* kOutputRootEnv = "TSEKIT_OUTPUT_ROOT";

struct RunConfig {
  std::vector<std::string> template_files;
  std::vector<std::string> lemma_files;
  std::string exceptions_file;
  std::string reject_file;
  std::string vocab_file;

  std::string backend = "dump";  // dump | synthetic | http
  std::string dump_file;
  std::string synthetic_file;
  std::string endpoint;          // http base URL
  std::string endpoint_path = "/score";
  std::string model_id = "remote";
  std::string direction = "bidirectional";  // http only
  int max_retries = 5;
  int backoff_ms = 200;

  bool capitalize_first = true;
  std::string final_period = "auto";  // auto | on | off

  std::vector<double> top_grid = default_top_grid();
  std::vector<double> bottom_grid = default_bottom_grid();
  bool top_requires_both = false;
  size_t top_k = 10;

  std::string output_dir = "tsekit-out";
  int jobs = 1;
  std::uint64_t seed = 0;  // recorded only; no run samples

  std::string to_json() const;
  // Overrides every field present in `json_text`; unknown keys are errors.
  void apply_json(std::string_view json_text);
  // First 16 hex digits of SHA-256 over to_json().
  std::string hash() const;
};

// Resolves the output directory against TSEKIT_OUTPUT_ROOT.
std::filesystem::path resolve_output_dir(const RunConfig& config);

// Loaded, validated inputs shared by score / sweep / topk.
struct RunInputs {
  std::vector<TemplateInstance> templates;
  Lexicon lexicon;
  InflectionExceptions exceptions;
  std::unique_ptr<Backend> backend;
  NormalizationPolicy policy;
  size_t n_lemmas_before_vocab = 0;
};

// Throws ConfigError naming the first missing or unreadable path.
RunInputs load_inputs(const RunConfig& config);

struct ScoreRun {
  std::vector<TemplateScore> scores;
  ScoreReport report;
  std::filesystem::path output_dir;
  std::string config_hash;
};

// Scores every template and writes template_scores.{tsv,jsonl},
// scores.{tsv,jsonl} and config.json. On a backend failure the completed
// prefix is left in template_scores.tsv.partial and the error is rethrown.
ScoreRun run_score(const RunConfig& config, std::ostream* log = nullptr);

struct SweepRun {
  SweepResult result;
  std::filesystem::path output_dir;
  std::string config_hash;
};

// Writes curves.{tsv,jsonl} and config.json.
SweepRun run_sweep(const RunConfig& config, std::ostream* log = nullptr);

struct QualitativeRow {
  std::string template_id;
  std::vector<TopToken> top;
};

struct TopkRun {
  std::vector<QualitativeRow> rows;
  std::filesystem::path output_dir;
};

// Writes topk.{tsv,jsonl} and config.json.
TopkRun run_topk(const RunConfig& config, std::ostream* log = nullptr);

struct IngestConfig {
  std::vector<std::string> ml_files;
  std::vector<std::string> blimp_files;
  std::vector<std::string> paradigms;
  std::vector<std::string> lemma_files;  // improves BLiMP number inference
  std::string output_file;
};

struct IngestRun {
  std::vector<TemplateInstance> templates;
  LoadStats stats;
};

// Converts upstream inputs into one normalized template file.
IngestRun run_ingest(const IngestConfig& config, std::ostream* log = nullptr);

// Serializers used by the run_* writers.
std::string score_table_tsv(const ScoreReport& report,
                            const std::string& config_hash);
std::string template_scores_tsv(const std::vector<TemplateScore>& scores,
                                const std::vector<TemplateInstance>& templates,
                                const std::string& config_hash);
std::string curves_tsv(const SweepResult& sweep,
                       const std::string& config_hash);

}  // namespace tsekit

#endif  // TSEKIT_REPORT_H_
