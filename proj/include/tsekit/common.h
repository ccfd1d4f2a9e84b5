// Shared vocabulary types, error hierarchy and small text helpers.

#ifndef TSEKIT_COMMON_H_
#define TSEKIT_COMMON_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsekit {

// Bumped whenever any on-disk format written by the toolkit changes.
inline constexpr int kFormatVersion = 1;

// Configuration, path and I/O problems. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input records (template files, dumps, synthetic specs).
class FormatError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Failures while scoring: backend errors, missing forms, broken invariants
// in model output. The CLI maps these to exit code 1.
class ScoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grammatical number of the subject of a template.
enum class Number { kSingular, kPlural };

std::string_view to_string(Number n);
std::optional<Number> parse_number(std::string_view s);

enum class Direction { kBidirectional, kUnidirectional };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

std::string_view trim(std::string_view s);

// Reads a whole file; throws ConfigError naming the path on failure.
std::string read_file(const std::filesystem::path& path);

// Splits on '\n', dropping a trailing '\r' from each line. A final empty
// line after the last newline is not returned.
std::vector<std::string> split_lines(std::string_view text);

// Writes `contents` to `path` atomically enough for our purposes
// (truncate + write); throws ConfigError on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace tsekit

#endif  // TSEKIT_COMMON_H_
