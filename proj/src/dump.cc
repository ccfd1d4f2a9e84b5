#include "tsekit/dump.h"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace tsekit {
namespace {

using nlohmann::json;

json parse_json_line(std::string_view line, const std::string& where) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw FormatError(where + "expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw FormatError(where + "invalid JSON: " + e.what());
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where + "missing field \"" + key + "\"");
  return *it;
}

std::string require_string(const json& j, const char* key,
                           const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_string()) throw FormatError(where + "field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

double require_double(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw FormatError(where + "field \"" + key + "\" must be a number");
  return v.get<double>();
}

DumpHeader parse_header(std::string_view line, const std::string& where) {
  json j = parse_json_line(line, where);
  DumpHeader h;
  const json& v = require(j, "format_version", where);
  if (!v.is_number_integer()) throw FormatError(where + "format_version must be an integer");
  h.format_version = v.get<int>();
  if (h.format_version != kFormatVersion) {
    throw FormatError(where + "unsupported format_version " +
                      std::to_string(h.format_version));
  }
  h.model_id = require_string(j, "model_id", where);
  auto dir = parse_direction(require_string(j, "direction", where));
  if (!dir) throw FormatError(where + "bad direction");
  h.direction = *dir;
  h.vocab_manifest_hash = require_string(j, "vocab_manifest_hash", where);
  return h;
}

void check_vocab_hash(const DumpHeader& h, const DumpReadOptions& options,
                      const std::string& source) {
  if (options.expected_vocab_hash &&
      *options.expected_vocab_hash != h.vocab_manifest_hash) {
    throw FormatError(source + ": vocab_manifest_hash mismatch (dump " +
                      h.vocab_manifest_hash + ", manifest " +
                      *options.expected_vocab_hash + ")");
  }
}

}  // namespace

std::string serialize_dump_header(const DumpHeader& h) {
  json j;
  j["format_version"] = h.format_version;
  j["model_id"] = h.model_id;
  j["direction"] = to_string(h.direction);
  j["vocab_manifest_hash"] = h.vocab_manifest_hash;
  return j.dump();
}

std::string serialize_dump_record(const TemplateDistribution& d) {
  std::vector<const TokenProbRecord*> by_rank;
  for (const auto& [form, r] : d.records) by_rank.push_back(&r);
  std::sort(by_rank.begin(), by_rank.end(), [](const auto* a, const auto* b) {
    return a->rank != b->rank ? a->rank < b->rank : a->form < b->form;
  });
  json records = json::array();
  for (const auto* r : by_rank) {
    records.push_back({{"form", r->form},
                       {"prob", r->prob},
                       {"rank", r->rank},
                       {"cum_before", r->cum_before}});
  }
  json j;
  j["template_id"] = d.template_id;
  j["records"] = std::move(records);
  if (d.top) {
    json top = json::array();
    for (const auto& t : *d.top) top.push_back({{"form", t.form}, {"prob", t.prob}});
    j["top"] = std::move(top);
  }
  return j.dump();
}

TemplateDistribution parse_dump_record(std::string_view line,
                                       const DumpHeader& header) {
  json j = parse_json_line(line, "record: ");
  TemplateDistribution d;
  d.template_id = require_string(j, "template_id", "record: ");
  const std::string where = "template " + d.template_id + ": ";
  d.model_id = header.model_id;
  d.direction = header.direction;
  const json& records = require(j, "records", where);
  if (!records.is_array()) throw FormatError(where + "records must be an array");
  for (const auto& rj : records) {
    if (!rj.is_object()) throw FormatError(where + "record must be an object");
    TokenProbRecord r;
    r.form = require_string(rj, "form", where);
    r.prob = require_double(rj, "prob", where);
    r.cum_before = require_double(rj, "cum_before", where);
    const json& rank = require(rj, "rank", where);
    if (!rank.is_number_unsigned() && !(rank.is_number_integer() && rank.get<long long>() >= 0)) {
      throw FormatError(where + "rank must be a non-negative integer");
    }
    r.rank = rank.get<std::uint64_t>();
    std::string form = r.form;
    if (!d.records.emplace(std::move(form), std::move(r)).second) {
      throw FormatError(where + "duplicate form \"" + rj["form"].get<std::string>() + "\"");
    }
  }
  if (auto it = j.find("top"); it != j.end()) {
    if (!it->is_array()) throw FormatError(where + "top must be an array");
    std::vector<TopToken> top;
    for (const auto& tj : *it) {
      top.push_back({require_string(tj, "form", where), require_double(tj, "prob", where)});
    }
    d.top = std::move(top);
  }
  try {
    validate(d);
  } catch (const ScoringError& e) {
    throw FormatError(e.what());
  }
  return d;
}

std::string serialize_dump(const DumpHeader& header,
                           const std::vector<TemplateDistribution>& dists) {
  std::string out = serialize_dump_header(header);
  out += '\n';
  for (const auto& d : dists) {
    out += serialize_dump_record(d);
    out += '\n';
  }
  return out;
}

void write_dump(const DumpHeader& header,
                const std::vector<TemplateDistribution>& dists,
                const std::filesystem::path& path) {
  write_file(path, serialize_dump(header, dists));
}

DumpReader::DumpReader(const std::filesystem::path& path,
                       DumpReadOptions options)
    : path_(path.string()), in_(path, std::ios::binary) {
  if (!in_) throw ConfigError("cannot read dump: " + path_);
  std::string line;
  if (!std::getline(in_, line)) throw FormatError(path_ + ": empty dump");
  line_no_ = 1;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  header_ = parse_header(line, path_ + ":1: ");
  check_vocab_hash(header_, options, path_);
}

std::optional<TemplateDistribution> DumpReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    try {
      return parse_dump_record(line, header_);
    } catch (const FormatError& e) {
      throw FormatError(path_ + ":" + std::to_string(line_no_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

Dump read_dump(const std::filesystem::path& path, DumpReadOptions options) {
  DumpReader reader(path, std::move(options));
  Dump dump{reader.header(), {}};
  while (auto d = reader.next()) dump.distributions.push_back(std::move(*d));
  return dump;
}

Dump parse_dump(std::string_view text, DumpReadOptions options) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw FormatError("empty dump");
  Dump dump;
  dump.header = parse_header(lines.front(), "line 1: ");
  check_vocab_hash(dump.header, options, "<dump>");
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      dump.distributions.push_back(parse_dump_record(lines[i], dump.header));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return dump;
}

DumpBackend::DumpBackend(Dump dump) : header_(std::move(dump.header)) {
  for (auto& d : dump.distributions) {
    if (by_id_.contains(d.template_id)) {
      throw FormatError("dump has two distributions for template " +
                        d.template_id);
    }
    std::string id = d.template_id;
    by_id_.emplace(std::move(id), std::move(d));
  }
}

const TemplateDistribution& DumpBackend::lookup(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw ScoringError("dump has no distribution for template " + id);
  }
  return it->second;
}

TemplateDistribution DumpBackend::query(
    const TemplateInstance& t, std::span<const std::string> candidates) const {
  return restrict_to(lookup(t.id), candidates);
}

std::vector<TopToken> DumpBackend::top_k(const TemplateInstance& t,
                                         size_t k) const {
  const auto& d = lookup(t.id);
  if (!d.top) {
    throw ScoringError("top-k unsupported by backend: dump has no top section "
                       "for template " + t.id);
  }
  std::vector<TopToken> out(d.top->begin(),
                            d.top->begin() + std::min(k, d.top->size()));
  return out;
}

}  // namespace tsekit
