// Dump files: distributions precomputed by an external probe.
//
// Layout (UTF-8, LF, keys sorted in every object):
//   {"direction":...,"format_version":1,"model_id":...,"vocab_manifest_hash":...}
//   {"records":[{"cum_before":..,"form":..,"prob":..,"rank":..},...],
//    "template_id":...[,"top":[{"form":..,"prob":..},...]]}
//   ...
// Records are listed by ascending rank. Doubles use the shortest decimal
// that round-trips.

#ifndef TSEKIT_DUMP_H_
#define TSEKIT_DUMP_H_

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsekit/backend.h"

namespace tsekit {

struct DumpHeader {
  int format_version = kFormatVersion;
  std::string model_id;
  Direction direction = Direction::kBidirectional;
  std::string vocab_manifest_hash;

  friend bool operator==(const DumpHeader&, const DumpHeader&) = default;
};

std::string serialize_dump_header(const DumpHeader& h);
// One record line, without the trailing newline.
std::string serialize_dump_record(const TemplateDistribution& d);

// Parses and validates one record line; model id and direction come from
// `header`. Throws FormatError on schema problems and record invariant
// violations.
TemplateDistribution parse_dump_record(std::string_view line,
                                       const DumpHeader& header);

void write_dump(const DumpHeader& header,
                const std::vector<TemplateDistribution>& dists,
                const std::filesystem::path& path);
std::string serialize_dump(const DumpHeader& header,
                           const std::vector<TemplateDistribution>& dists);

struct DumpReadOptions {
  // When set, the header's vocab_manifest_hash must match.
  std::optional<std::string> expected_vocab_hash;
};

// Single-consumer stream over a dump file. Every distribution is validated
// before it is returned.
class DumpReader {
 public:
  explicit DumpReader(const std::filesystem::path& path,
                      DumpReadOptions options = {});

  const DumpHeader& header() const { return header_; }

  // Next distribution in file order, or nullopt at end of file.
  std::optional<TemplateDistribution> next();

 private:
  std::string path_;
  std::ifstream in_;
  DumpHeader header_;
  size_t line_no_ = 0;
};

struct Dump {
  DumpHeader header;
  std::vector<TemplateDistribution> distributions;
};

Dump read_dump(const std::filesystem::path& path, DumpReadOptions options = {});
Dump parse_dump(std::string_view text, DumpReadOptions options = {});

// Serves queries from a dump loaded into memory.
class DumpBackend : public Backend {
 public:
  explicit DumpBackend(Dump dump);

  TemplateDistribution query(
      const TemplateInstance& t,
      std::span<const std::string> candidates) const override;
  std::vector<TopToken> top_k(const TemplateInstance& t,
                              size_t k) const override;
  std::string model_id() const override { return header_.model_id; }
  Direction direction() const override { return header_.direction; }

 private:
  const TemplateDistribution& lookup(const std::string& id) const;

  DumpHeader header_;
  std::map<std::string, TemplateDistribution, std::less<>> by_id_;
};

}  // namespace tsekit

#endif  // TSEKIT_DUMP_H_
