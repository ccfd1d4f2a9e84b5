#include "tsekit/common.h"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tsekit {

std::string_view to_string(Number n) {
  return n == Number::kSingular ? "singular" : "plural";
}

std::optional<Number> parse_number(std::string_view s) {
  if (s == "singular" || s == "sg") return Number::kSingular;
  if (s == "plural" || s == "pl") return Number::kPlural;
  return std::nullopt;
}

std::string_view to_string(Direction d) {
  return d == Direction::kBidirectional ? "bidirectional" : "unidirectional";
}

std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "bidirectional") return Direction::kBidirectional;
  if (s == "unidirectional") return Direction::kUnidirectional;
  return std::nullopt;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) {
    // Not reachable for finite doubles with a 64-byte buffer.
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }
  return std::string(buf.data(), end);
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw ConfigError("error reading file: " + path.string());
  return os.str();
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = nl + 1;
  }
  return lines;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ConfigError("error writing file: " + path.string());
}

}  // namespace tsekit
