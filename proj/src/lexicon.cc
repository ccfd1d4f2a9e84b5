#include "tsekit/lexicon.h"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace tsekit {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

bool is_comment_or_blank(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

Lemma::Lemma(std::string base) : base_(std::move(base)) {
  if (!is_valid(base_)) {
    throw FormatError("invalid lemma: \"" + base_ + "\"");
  }
}

bool Lemma::is_valid(std::string_view base) {
  if (base.empty() || base.front() == '-' || base.back() == '-') return false;
  char prev = 0;
  for (char c : base) {
    if (c == '-') {
      if (prev == '-') return false;
    } else if (c < 'a' || c > 'z') {
      return false;
    }
    prev = c;
  }
  return true;
}

InflectionPair inflect(const Lemma& lemma) {
  const std::string& base = lemma.base();
  InflectionPair pair{base, {}, base};
  if (base == "be") {
    pair.singular_form = "is";
    pair.plural_form = "are";
  } else if (base == "have") {
    pair.singular_form = "has";
  } else if (ends_with(base, "s") || ends_with(base, "x") ||
             ends_with(base, "z") || ends_with(base, "ch") ||
             ends_with(base, "sh") || ends_with(base, "o")) {
    pair.singular_form = base + "es";
  } else if (base.size() >= 2 && base.back() == 'y' &&
             !is_vowel(base[base.size() - 2]) && base[base.size() - 2] != '-') {
    pair.singular_form = base.substr(0, base.size() - 1) + "ies";
  } else {
    pair.singular_form = base + "s";
  }
  return pair;
}

InflectionPair inflect(const Lemma& lemma,
                       const InflectionExceptions& exceptions) {
  auto it = exceptions.find(lemma.base());
  if (it == exceptions.end()) return inflect(lemma);
  return InflectionPair{lemma.base(), it->second.first, it->second.second};
}

Lexicon::Lexicon(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) {
              return std::tie(a.pair.lemma, a.pair.singular_form,
                              a.pair.plural_form) <
                     std::tie(b.pair.lemma, b.pair.singular_form,
                              b.pair.plural_form);
            });
  for (auto& e : entries) {
    if (!pairs_.empty() && pairs_.back().lemma == e.pair.lemma) {
      sources_.back().insert(e.sources.begin(), e.sources.end());
      continue;
    }
    pairs_.push_back(std::move(e.pair));
    sources_.push_back(std::move(e.sources));
  }
}

const InflectionPair* Lexicon::find(std::string_view lemma) const {
  auto it = std::lower_bound(
      pairs_.begin(), pairs_.end(), lemma,
      [](const InflectionPair& p, std::string_view l) { return p.lemma < l; });
  if (it == pairs_.end() || it->lemma != lemma) return nullptr;
  return &*it;
}

std::optional<Lexicon::FormMatch> Lexicon::find_form(
    std::string_view form) const {
  for (const auto& p : pairs_) {
    if (p.singular_form == form) return FormMatch{&p, Number::kSingular};
    if (p.plural_form == form) return FormMatch{&p, Number::kPlural};
  }
  return std::nullopt;
}

std::vector<Lexicon::Entry> Lexicon::entries() const {
  std::vector<Entry> out;
  out.reserve(pairs_.size());
  for (size_t i = 0; i < pairs_.size(); ++i) {
    out.push_back(Entry{pairs_[i], sources_[i]});
  }
  return out;
}

Lexicon Lexicon::merge(const Lexicon& a, const Lexicon& b) {
  auto entries = a.entries();
  auto more = b.entries();
  entries.insert(entries.end(), std::make_move_iterator(more.begin()),
                 std::make_move_iterator(more.end()));
  return Lexicon(std::move(entries));
}

Lexicon parse_lemma_list(std::string_view text,
                         const LexiconLoadOptions& options) {
  std::vector<Lexicon::Entry> entries;
  const auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    std::istringstream fields{std::string(trim(lines[i]))};
    std::string word, tags;
    fields >> word >> tags;
    word = lowercase(word);
    if (!Lemma::is_valid(word)) {
      throw FormatError("line " + std::to_string(i + 1) +
                        ": invalid lemma \"" + word + "\"");
    }
    if (options.reject.contains(word)) continue;
    std::set<std::string> sources;
    if (tags.empty()) {
      sources.insert(options.default_source);
    } else {
      for (auto& t : split_fields(tags, ',')) {
        if (!t.empty()) sources.insert(std::move(t));
      }
    }
    entries.push_back(
        Lexicon::Entry{inflect(Lemma(word), options.exceptions), sources});
  }
  Lexicon lexicon(std::move(entries));
  if (lexicon.empty()) throw EmptyLexiconError();
  return lexicon;
}

Lexicon load_lemma_list(const std::filesystem::path& path,
                        const LexiconLoadOptions& options) {
  return parse_lemma_list(read_file(path), options);
}

InflectionExceptions load_exceptions(const std::filesystem::path& path) {
  InflectionExceptions out;
  const auto lines = split_lines(read_file(path));
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    auto fields = split_fields(lines[i], '\t');
    const std::string where =
        path.string() + ":" + std::to_string(i + 1) + ": ";
    if (fields.size() != 3) {
      throw FormatError(where + "expected lemma<TAB>singular<TAB>plural");
    }
    for (auto& f : fields) f = std::string(trim(f));
    if (!Lemma::is_valid(fields[0])) {
      throw FormatError(where + "invalid lemma \"" + fields[0] + "\"");
    }
    if (fields[1].empty() || fields[2].empty() || fields[1] == fields[2]) {
      throw FormatError(where + "singular and plural forms must be distinct");
    }
    out[fields[0]] = {fields[1], fields[2]};
  }
  return out;
}

std::set<std::string, std::less<>> load_reject_list(
    const std::filesystem::path& path) {
  std::set<std::string, std::less<>> out;
  for (const auto& line : split_lines(read_file(path))) {
    if (is_comment_or_blank(line)) continue;
    out.insert(lowercase(trim(line)));
  }
  return out;
}

FilterResult filter_by_vocabulary(
    const Lexicon& lexicon,
    const std::function<bool(std::string_view)>& in_vocab) {
  std::vector<Lexicon::Entry> kept;
  for (size_t i = 0; i < lexicon.size(); ++i) {
    const auto& p = lexicon.pairs()[i];
    if (in_vocab(p.singular_form) && in_vocab(p.plural_form)) {
      kept.push_back(Lexicon::Entry{p, lexicon.sources(i)});
    }
  }
  FilterResult result;
  result.n_input = lexicon.size();
  result.n_kept = kept.size();
  result.lexicon = Lexicon(std::move(kept));
  return result;
}

VocabManifest::VocabManifest(std::string_view text)
    : hash_(sha256_hex(text)) {
  for (auto& line : split_lines(text)) {
    if (!line.empty()) words_.insert(std::move(line));
  }
}

VocabManifest VocabManifest::load(const std::filesystem::path& path) {
  return VocabManifest(read_file(path));
}

bool VocabManifest::contains(std::string_view word) const {
  return words_.find(word) != words_.end();
}

}  // namespace tsekit
