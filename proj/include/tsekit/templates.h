// Evaluation templates: a sentence frame with one verb slot.
//
// The canonical on-disk form is the normalized template file, one JSON
// object per line with keys in the fixed order
//   id, dataset, construction, prefix, suffix, number, lemmas
// (see docs/formats.md). Upstream datasets are converted into it by
// `tsekit ingest`.

#ifndef TSEKIT_TEMPLATES_H_
#define TSEKIT_TEMPLATES_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsekit/common.h"

namespace tsekit {

class Lexicon;

enum class Dataset { kML, kBlimp, kUser };

std::string_view to_string(Dataset d);
std::optional<Dataset> parse_dataset(std::string_view s);

struct TemplateInstance {
  std::string id;
  std::string prefix;  // text before the verb slot, never empty
  std::string suffix;  // text after the verb slot, may be empty
  Number number = Number::kSingular;
  std::string construction;
  Dataset dataset = Dataset::kUser;
  // Verb lemmas the upstream dataset paired with this context, sorted and
  // unique. Drives the classic TSE column.
  std::vector<std::string> lemmas;

  friend bool operator==(const TemplateInstance&,
                         const TemplateInstance&) = default;
};

// Content hash of (dataset, construction, prefix, suffix): first 16 hex
// digits of SHA-256 over the fields joined by 0x1f.
std::string template_id(Dataset dataset, std::string_view construction,
                        std::string_view prefix, std::string_view suffix);

// Maps the upstream Marvin & Linzen condition keys (e.g. "obj_rel_within_anim")
// onto the row names used in score tables. Unknown labels pass through.
std::string canonical_construction(std::string_view label);

struct NormalizationPolicy {
  bool capitalize_first = false;
  bool require_final_period = false;
};

// Uppercases the first character of the prefix and/or appends a final
// period to the suffix. Idempotent; does not change the id.
TemplateInstance normalize(const TemplateInstance& t,
                           const NormalizationPolicy& policy);

struct LoadStats {
  size_t n_records = 0;          // input records read
  size_t n_duplicates = 0;       // merged into an earlier (prefix, suffix)
  size_t n_skipped_diff = 0;     // BLiMP pairs not differing in one token
  size_t n_skipped_number = 0;   // BLiMP pairs with undecidable number
  size_t n_skipped_paradigm = 0; // BLiMP records outside the paradigm list
};

struct TemplateSet {
  std::vector<TemplateInstance> templates;
  LoadStats stats;
};

// Slot file: construction<TAB>number<TAB>sentence with "___"[<TAB>lemma].
// Lines that differ only in the lemma collapse into one instance.
TemplateSet parse_ml_templates(std::string_view text,
                               std::string_view source = "<input>");
TemplateSet load_ml_templates(const std::filesystem::path& path);

struct BlimpOptions {
  // Keep only records whose UID is listed; empty keeps everything.
  std::vector<std::string> paradigms;
  // Used to infer number and lemma from the good sentence's verb.
  const Lexicon* lexicon = nullptr;
  std::string construction = "BLiMP";
};

// BLiMP JSON lines with sentence_good / sentence_bad (optional UID, number).
TemplateSet parse_blimp(std::string_view text, const BlimpOptions& options = {});
TemplateSet load_blimp(const std::filesystem::path& path,
                       const BlimpOptions& options = {});

// Normalized template file.
TemplateSet parse_templates(std::string_view text,
                            std::string_view source = "<input>");
TemplateSet load_templates(const std::filesystem::path& path);
std::string serialize_template(const TemplateInstance& t);
std::string serialize_templates(const std::vector<TemplateInstance>& ts);

}  // namespace tsekit

#endif  // TSEKIT_TEMPLATES_H_
