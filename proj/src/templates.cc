#include "tsekit/templates.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <utility>

#include "json.hpp"
#include "tsekit/lexicon.h"

namespace tsekit {
namespace {

using ordered_json = nlohmann::ordered_json;

// Collects instances in first-seen order, merging (prefix, suffix) repeats.
class Accumulator {
 public:
  explicit Accumulator(LoadStats& stats) : stats_(stats) {}

  void add(TemplateInstance t) {
    auto key = std::make_pair(t.prefix, t.suffix);
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(std::move(key), out_.size());
      out_.push_back(std::move(t));
      return;
    }
    ++stats_.n_duplicates;
    auto& lemmas = out_[it->second].lemmas;
    lemmas.insert(lemmas.end(), t.lemmas.begin(), t.lemmas.end());
  }

  std::vector<TemplateInstance> finish() && {
    for (auto& t : out_) {
      std::sort(t.lemmas.begin(), t.lemmas.end());
      t.lemmas.erase(std::unique(t.lemmas.begin(), t.lemmas.end()),
                     t.lemmas.end());
    }
    return std::move(out_);
  }

 private:
  LoadStats& stats_;
  std::map<std::pair<std::string, std::string>, size_t> index_;
  std::vector<TemplateInstance> out_;
};

std::vector<std::string> split_tab(std::string_view line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens, size_t begin,
                 size_t end) {
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += tokens[i];
  }
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

struct TokenParts {
  std::string lead, core, trail;
};

TokenParts split_token(std::string_view tok) {
  size_t b = 0;
  while (b < tok.size() && !is_word_char(tok[b])) ++b;
  size_t e = tok.size();
  while (e > b && !is_word_char(tok[e - 1])) --e;
  return {std::string(tok.substr(0, b)), std::string(tok.substr(b, e - b)),
          std::string(tok.substr(e))};
}

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct VerbReading {
  Number number;
  std::optional<std::string> lemma;
};

// Agreement pairs outside the regular rules. Past-tense be carries number
// but no present-tense lemma.
std::optional<VerbReading> irregular_reading(std::string_view good,
                                             std::string_view bad) {
  struct Row {
    std::string_view sg, pl, lemma;
  };
  static constexpr Row kRows[] = {
      {"is", "are", "be"},          {"was", "were", ""},
      {"has", "have", "have"},      {"does", "do", "do"},
      {"isn't", "aren't", ""},      {"wasn't", "weren't", ""},
      {"hasn't", "haven't", ""},    {"doesn't", "don't", ""},
  };
  for (const auto& r : kRows) {
    std::optional<std::string> lemma;
    if (!r.lemma.empty()) lemma = std::string(r.lemma);
    if (good == r.sg && bad == r.pl) return VerbReading{Number::kSingular, lemma};
    if (good == r.pl && bad == r.sg) return VerbReading{Number::kPlural, lemma};
  }
  return std::nullopt;
}

std::optional<VerbReading> infer_reading(std::string_view good_core,
                                         std::string_view bad_core,
                                         const Lexicon* lexicon) {
  const std::string good = to_lower(std::string(good_core));
  const std::string bad = to_lower(std::string(bad_core));
  if (lexicon != nullptr) {
    if (auto m = lexicon->find_form(good)) {
      if (m->pair->incorrect_form(m->number) == bad) {
        return VerbReading{m->number, m->pair->lemma};
      }
    }
  }
  if (auto r = irregular_reading(good, bad)) return r;
  if (Lemma::is_valid(bad) && inflect(Lemma(bad)).singular_form == good) {
    return VerbReading{Number::kSingular, bad};
  }
  if (Lemma::is_valid(good) && inflect(Lemma(good)).singular_form == bad) {
    return VerbReading{Number::kPlural, good};
  }
  return std::nullopt;
}

std::string field_string(const nlohmann::json& j, const char* key,
                         const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw FormatError(where + "missing string field \"" + key + "\"");
  }
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(Dataset d) {
  switch (d) {
    case Dataset::kML:
      return "ML";
    case Dataset::kBlimp:
      return "BLIMP";
    case Dataset::kUser:
      break;
  }
  return "USER";
}

std::optional<Dataset> parse_dataset(std::string_view s) {
  if (s == "ML") return Dataset::kML;
  if (s == "BLIMP") return Dataset::kBlimp;
  if (s == "USER") return Dataset::kUser;
  return std::nullopt;
}

std::string template_id(Dataset dataset, std::string_view construction,
                        std::string_view prefix, std::string_view suffix) {
  std::string key;
  key.append(to_string(dataset));
  key.push_back('\x1f');
  key.append(construction);
  key.push_back('\x1f');
  key.append(prefix);
  key.push_back('\x1f');
  key.append(suffix);
  return sha256_hex(key).substr(0, 16);
}

std::string canonical_construction(std::string_view label) {
  static const std::map<std::string_view, std::string_view> kNames = {
      {"simple_agrmt", "Simple"},
      {"sent_comp", "In a sentential complement"},
      {"vp_coord", "VP coordination"},
      {"long_vp_coord", "VP coordination"},
      {"prep_anim", "Across prepositional phrase"},
      {"prep_inanim", "Across prepositional phrase"},
      {"subj_rel", "Across subject relative clause"},
      {"obj_rel_across_anim", "Across object relative clause"},
      {"obj_rel_across_inanim", "Across object relative clause"},
      {"obj_rel_no_comp_across_anim", "Across object relative (no that)"},
      {"obj_rel_no_comp_across_inanim", "Across object relative (no that)"},
      {"obj_rel_within_anim", "In object relative clause"},
      {"obj_rel_within_inanim", "In object relative clause"},
      {"obj_rel_no_comp_within_anim", "In object relative (no that)"},
      {"obj_rel_no_comp_within_inanim", "In object relative (no that)"},
  };
  auto it = kNames.find(label);
  return std::string(it == kNames.end() ? label : it->second);
}

TemplateInstance normalize(const TemplateInstance& t,
                           const NormalizationPolicy& policy) {
  TemplateInstance out = t;
  if (policy.capitalize_first && !out.prefix.empty()) {
    out.prefix[0] = static_cast<char>(
        std::toupper(static_cast<unsigned char>(out.prefix[0])));
  }
  if (policy.require_final_period) {
    std::string_view tail = trim(out.suffix);
    const bool ended = !tail.empty() && (tail.back() == '.' ||
                                         tail.back() == '!' ||
                                         tail.back() == '?');
    if (!ended) out.suffix = std::string(tail.empty() ? "" : out.suffix) + ".";
  }
  return out;
}

TemplateSet parse_ml_templates(std::string_view text, std::string_view source) {
  TemplateSet result;
  Accumulator acc(result.stats);
  const auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const std::string where =
        std::string(source) + ":" + std::to_string(i + 1) + ": ";
    auto fields = split_tab(line);
    if (fields.size() != 3 && fields.size() != 4) {
      throw FormatError(where + "expected 3 or 4 tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    auto number = parse_number(trim(fields[1]));
    if (!number) {
      throw FormatError(where + "bad number \"" + fields[1] + "\"");
    }
    const std::string& sentence = fields[2];
    const size_t slot = sentence.find("___");
    if (slot == std::string::npos ||
        sentence.find("___", slot + 3) != std::string::npos) {
      throw FormatError(where + "sentence must contain exactly one ___ slot");
    }
    TemplateInstance t;
    t.prefix = sentence.substr(0, slot);
    t.suffix = sentence.substr(slot + 3);
    if (t.prefix.empty()) throw FormatError(where + "empty prefix");
    t.number = *number;
    t.construction = canonical_construction(trim(fields[0]));
    t.dataset = Dataset::kML;
    if (fields.size() == 4 && !trim(fields[3]).empty()) {
      std::string lemma(trim(fields[3]));
      if (!Lemma::is_valid(lemma)) {
        throw FormatError(where + "invalid lemma \"" + lemma + "\"");
      }
      t.lemmas.push_back(std::move(lemma));
    }
    t.id = template_id(t.dataset, t.construction, t.prefix, t.suffix);
    ++result.stats.n_records;
    acc.add(std::move(t));
  }
  result.templates = std::move(acc).finish();
  return result;
}

TemplateSet load_ml_templates(const std::filesystem::path& path) {
  return parse_ml_templates(read_file(path), path.string());
}

TemplateSet parse_blimp(std::string_view text, const BlimpOptions& options) {
  TemplateSet result;
  Accumulator acc(result.stats);
  const auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = "line " + std::to_string(i + 1) + ": ";
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + "invalid JSON: " + e.what());
    }
    ++result.stats.n_records;
    if (!options.paradigms.empty()) {
      const std::string uid = rec.value("UID", "");
      if (std::find(options.paradigms.begin(), options.paradigms.end(), uid) ==
          options.paradigms.end()) {
        ++result.stats.n_skipped_paradigm;
        continue;
      }
    }
    const auto good = split_ws(field_string(rec, "sentence_good", where));
    const auto bad = split_ws(field_string(rec, "sentence_bad", where));
    if (good.size() != bad.size()) {
      ++result.stats.n_skipped_diff;
      continue;
    }
    std::vector<size_t> diff;
    for (size_t k = 0; k < good.size(); ++k) {
      if (good[k] != bad[k]) diff.push_back(k);
    }
    if (diff.size() != 1) {
      ++result.stats.n_skipped_diff;
      continue;
    }
    const size_t k = diff.front();
    const TokenParts g = split_token(good[k]);
    const TokenParts b = split_token(bad[k]);
    if (g.lead != b.lead || g.trail != b.trail || g.core.empty() ||
        b.core.empty()) {
      ++result.stats.n_skipped_diff;
      continue;
    }
    std::optional<VerbReading> reading =
        infer_reading(g.core, b.core, options.lexicon);
    if (auto it = rec.find("number"); it != rec.end() && it->is_string()) {
      auto n = parse_number(it->get<std::string>());
      if (!n) throw FormatError(where + "bad number field");
      reading = VerbReading{*n, reading ? reading->lemma : std::nullopt};
    }
    if (!reading) {
      ++result.stats.n_skipped_number;
      continue;
    }

    TemplateInstance t;
    t.prefix = join(good, 0, k) + (k > 0 ? " " : "") + g.lead;
    t.suffix = g.trail;
    if (k + 1 < good.size()) t.suffix += " " + join(good, k + 1, good.size());
    if (t.prefix.empty()) {
      ++result.stats.n_skipped_diff;
      continue;
    }
    t.number = reading->number;
    t.construction = options.construction;
    t.dataset = Dataset::kBlimp;
    if (reading->lemma && Lemma::is_valid(*reading->lemma)) {
      t.lemmas.push_back(*reading->lemma);
    }
    t.id = template_id(t.dataset, t.construction, t.prefix, t.suffix);
    acc.add(std::move(t));
  }
  result.templates = std::move(acc).finish();
  return result;
}

TemplateSet load_blimp(const std::filesystem::path& path,
                       const BlimpOptions& options) {
  return parse_blimp(read_file(path), options);
}

std::string serialize_template(const TemplateInstance& t) {
  ordered_json j;
  j["id"] = t.id;
  j["dataset"] = to_string(t.dataset);
  j["construction"] = t.construction;
  j["prefix"] = t.prefix;
  j["suffix"] = t.suffix;
  j["number"] = to_string(t.number);
  j["lemmas"] = t.lemmas;
  return j.dump();
}

std::string serialize_templates(const std::vector<TemplateInstance>& ts) {
  std::string out;
  for (const auto& t : ts) {
    out += serialize_template(t);
    out += '\n';
  }
  return out;
}

TemplateSet parse_templates(std::string_view text, std::string_view source) {
  TemplateSet result;
  std::map<std::tuple<std::string, std::string, Dataset>, size_t> seen;
  const auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where =
        std::string(source) + ":" + std::to_string(i + 1) + ": ";
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + "invalid JSON: " + e.what());
    }
    if (!rec.is_object()) throw FormatError(where + "expected an object");
    TemplateInstance t;
    t.id = field_string(rec, "id", where);
    auto dataset = parse_dataset(field_string(rec, "dataset", where));
    if (!dataset) throw FormatError(where + "unknown dataset");
    t.dataset = *dataset;
    t.construction = field_string(rec, "construction", where);
    t.prefix = field_string(rec, "prefix", where);
    t.suffix = field_string(rec, "suffix", where);
    auto number = parse_number(field_string(rec, "number", where));
    if (!number) throw FormatError(where + "bad number");
    t.number = *number;
    if (auto it = rec.find("lemmas"); it != rec.end()) {
      if (!it->is_array()) throw FormatError(where + "lemmas must be an array");
      for (const auto& l : *it) {
        if (!l.is_string() || !Lemma::is_valid(l.get<std::string>())) {
          throw FormatError(where + "invalid lemma in lemmas");
        }
        t.lemmas.push_back(l.get<std::string>());
      }
      std::sort(t.lemmas.begin(), t.lemmas.end());
      t.lemmas.erase(std::unique(t.lemmas.begin(), t.lemmas.end()),
                     t.lemmas.end());
    }
    if (t.prefix.empty()) throw FormatError(where + "empty prefix");
    const std::string expected =
        template_id(t.dataset, t.construction, t.prefix, t.suffix);
    if (t.id.empty()) {
      t.id = expected;
    } else if (t.id != expected) {
      throw FormatError(where + "id " + t.id + " does not match content hash " +
                        expected);
    }
    ++result.stats.n_records;
    auto key = std::make_tuple(t.prefix, t.suffix, t.dataset);
    if (auto it = seen.find(key); it != seen.end()) {
      ++result.stats.n_duplicates;
      auto& lemmas = result.templates[it->second].lemmas;
      lemmas.insert(lemmas.end(), t.lemmas.begin(), t.lemmas.end());
      std::sort(lemmas.begin(), lemmas.end());
      lemmas.erase(std::unique(lemmas.begin(), lemmas.end()), lemmas.end());
      continue;
    }
    seen.emplace(std::move(key), result.templates.size());
    result.templates.push_back(std::move(t));
  }
  return result;
}

TemplateSet load_templates(const std::filesystem::path& path) {
  return parse_templates(read_file(path), path.string());
}

}  // namespace tsekit
