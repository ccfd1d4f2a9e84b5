// tsekit command-line entry point.
//
// Exit codes: 0 success, 1 scoring/backend failure, 2 configuration or
// input format error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsekit/dump.h"
#include "tsekit/lexicon.h"
#include "tsekit/report.h"

namespace {

using tsekit::RunConfig;

struct RunFlags {
  RunConfig config;
  std::string config_file;
  bool no_capitalize = false;
  std::string grid_top;
  std::string grid_bottom;
};

void add_input_flags(CLI::App* cmd, RunFlags& f) {
  auto& c = f.config;
  cmd->add_option("-c,--config", f.config_file,
                  "JSON run config; its values override flags");
  cmd->add_option("-t,--templates", c.template_files, "template JSONL file(s)");
  cmd->add_option("-l,--lemmas", c.lemma_files, "lemma list file(s)");
  cmd->add_option("--exceptions", c.exceptions_file, "irregular inflections TSV");
  cmd->add_option("--reject", c.reject_file, "lemmas to drop, one per line");
  cmd->add_option("--vocab", c.vocab_file, "vocabulary manifest");
  cmd->add_option("-b,--backend", c.backend, "dump | synthetic | http")
      ->check(CLI::IsMember({"dump", "synthetic", "http"}));
  cmd->add_option("--dump", c.dump_file, "probability dump (dump backend)");
  cmd->add_option("--synthetic", c.synthetic_file,
                  "synthetic distribution spec (synthetic backend)");
  cmd->add_option("--endpoint", c.endpoint, "scoring service base URL");
  cmd->add_option("--endpoint-path", c.endpoint_path, "scoring route");
  cmd->add_option("--model-id", c.model_id, "model id reported for http runs");
  cmd->add_option("--direction", c.direction, "bidirectional | unidirectional")
      ->check(CLI::IsMember({"bidirectional", "unidirectional"}));
  cmd->add_option("--max-retries", c.max_retries, "http retries after the first try");
  cmd->add_option("--backoff-ms", c.backoff_ms, "http backoff base in ms");
  cmd->add_flag("--no-capitalize", f.no_capitalize,
                "keep the first letter of prefixes as written");
  cmd->add_option("--final-period", c.final_period, "auto | on | off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  cmd->add_option("-j,--jobs", c.jobs, "parallel backend queries");
  cmd->add_option("-o,--out", c.output_dir, "output directory");
  cmd->add_option("--seed", c.seed, "recorded in config.json");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::string item;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      const auto v = tsekit::trim(item);
      if (!v.empty()) {
        try {
          size_t used = 0;
          const std::string s(v);
          out.push_back(std::stod(s, &used));
          if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
          throw tsekit::ConfigError("bad grid value: " + std::string(v));
        }
      }
      item.clear();
    } else {
      item += text[i];
    }
  }
  return out;
}

RunConfig finalize(RunFlags& f) {
  RunConfig c = f.config;
  if (f.no_capitalize) c.capitalize_first = false;
  if (!f.grid_top.empty()) c.top_grid = parse_grid(f.grid_top);
  if (!f.grid_bottom.empty()) c.bottom_grid = parse_grid(f.grid_bottom);
  if (!f.config_file.empty()) c.apply_json(tsekit::read_file(f.config_file));
  return c;
}

int cmd_lexicon(const std::vector<std::string>& lemma_files,
                const std::string& exceptions, const std::string& reject,
                const std::string& vocab, const std::string& out_file) {
  if (lemma_files.empty()) throw tsekit::ConfigError("no lemma file given");
  tsekit::LexiconLoadOptions opts;
  if (!exceptions.empty()) opts.exceptions = tsekit::load_exceptions(exceptions);
  if (!reject.empty()) opts.reject = tsekit::load_reject_list(reject);
  tsekit::Lexicon lexicon;
  for (const auto& f : lemma_files) {
    lexicon = tsekit::Lexicon::merge(lexicon, tsekit::load_lemma_list(f, opts));
  }
  const size_t n_input = lexicon.size();
  if (!vocab.empty()) {
    const auto manifest = tsekit::VocabManifest::load(vocab);
    auto filtered = tsekit::filter_by_vocabulary(
        lexicon, [&](std::string_view w) { return manifest.contains(w); });
    lexicon = std::move(filtered.lexicon);
  }
  std::string text = "lemma\tsingular\tplural\tsources\n";
  const auto entries = lexicon.entries();
  for (const auto& e : entries) {
    std::string sources;
    for (const auto& s : e.sources) sources += (sources.empty() ? "" : ",") + s;
    text += e.pair.lemma + '\t' + e.pair.singular_form + '\t' +
            e.pair.plural_form + '\t' + sources + '\n';
  }
  if (out_file.empty()) {
    std::cout << text;
  } else {
    tsekit::write_file(out_file, text);
  }
  std::cerr << "lexicon: " << lexicon.size() << " of " << n_input
            << " lemmas kept\n";
  if (lexicon.empty()) throw tsekit::EmptyLexiconError();
  return 0;
}

int cmd_dump_validate(const std::string& dump_file, const std::string& vocab) {
  tsekit::DumpReadOptions opts;
  if (!vocab.empty()) opts.expected_vocab_hash = tsekit::VocabManifest::load(vocab).hash();
  tsekit::DumpReader reader(dump_file, opts);
  size_t n = 0;
  size_t n_top = 0;
  while (auto d = reader.next()) {
    ++n;
    if (d->top) ++n_top;
  }
  const auto& h = reader.header();
  std::cout << "ok: " << n << " templates (" << n_top << " with top tokens), model "
            << h.model_id << ", " << tsekit::to_string(h.direction) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsekit: targeted syntactic evaluation over full lexicons"};
  app.require_subcommand(1);

  RunFlags score_flags;
  auto* score = app.add_subcommand("score", "per-construction TSE, EW and MW");
  add_input_flags(score, score_flags);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "EW and MW under top-p / bottom-p cutoffs");
  add_input_flags(sweep, sweep_flags);
  sweep->add_option("--top", sweep_flags.grid_top, "comma-separated top-p grid");
  sweep->add_option("--bottom", sweep_flags.grid_bottom,
                    "comma-separated bottom-p grid");
  sweep->add_flag("--top-requires-both", sweep_flags.config.top_requires_both,
                  "top-p EW needs both forms inside the nucleus");

  RunFlags topk_flags;
  auto* topk = app.add_subcommand("topk", "most probable tokens per template");
  add_input_flags(topk, topk_flags);
  topk->add_option("-k", topk_flags.config.top_k, "tokens per template");

  tsekit::IngestConfig ingest_config;
  auto* ingest = app.add_subcommand("ingest", "convert upstream templates to JSONL");
  ingest->add_option("--ml", ingest_config.ml_files, "slot-format TSV file(s)");
  ingest->add_option("--blimp", ingest_config.blimp_files, "BLiMP JSONL file(s)");
  ingest->add_option("--paradigm", ingest_config.paradigms,
                     "BLiMP paradigm(s) to keep; default all");
  ingest->add_option("-l,--lemmas", ingest_config.lemma_files,
                     "lemma list(s) used to infer BLiMP number");
  ingest->add_option("-o,--out", ingest_config.output_file, "output JSONL")->required();

  std::vector<std::string> lex_files;
  std::string lex_exceptions, lex_reject, lex_vocab, lex_out;
  auto* lexicon = app.add_subcommand("lexicon", "build and list inflection pairs");
  lexicon->add_option("-l,--lemmas", lex_files, "lemma list file(s)")->required();
  lexicon->add_option("--exceptions", lex_exceptions, "irregular inflections TSV");
  lexicon->add_option("--reject", lex_reject, "lemmas to drop");
  lexicon->add_option("--vocab", lex_vocab, "vocabulary manifest");
  lexicon->add_option("-o,--out", lex_out, "output TSV; default stdout");

  std::string dv_file, dv_vocab;
  auto* dump_validate = app.add_subcommand("dump-validate", "check a probability dump");
  dump_validate->add_option("dump", dv_file, "dump file")->required();
  dump_validate->add_option("--vocab", dv_vocab, "manifest the dump must match");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (score->parsed()) {
      auto run = tsekit::run_score(finalize(score_flags), &std::cerr);
      std::cout << tsekit::score_table_tsv(run.report, run.config_hash);
    } else if (sweep->parsed()) {
      auto run = tsekit::run_sweep(finalize(sweep_flags), &std::cerr);
      std::cerr << "wrote " << (run.output_dir / "curves.tsv").string() << '\n';
    } else if (topk->parsed()) {
      auto run = tsekit::run_topk(finalize(topk_flags), &std::cerr);
      std::cerr << "wrote " << (run.output_dir / "topk.tsv").string() << '\n';
    } else if (ingest->parsed()) {
      tsekit::run_ingest(ingest_config, &std::cerr);
    } else if (lexicon->parsed()) {
      return cmd_lexicon(lex_files, lex_exceptions, lex_reject, lex_vocab, lex_out);
    } else if (dump_validate->parsed()) {
      return cmd_dump_validate(dv_file, dv_vocab);
    }
  } catch (const tsekit::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tsekit::ScoringError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
