// Verb-lemma lexicon: loading, inflection and vocabulary filtering.
//
// A Lexicon is an immutable, sorted set of InflectionPairs. Every scoring
// path iterates it in base-form order, so two lexicons built from the same
// lemmas in any input order score identically.

#ifndef TSEKIT_LEXICON_H_
#define TSEKIT_LEXICON_H_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tsekit/common.h"

namespace tsekit {

// Dictionary form of a verb: lowercase ASCII letters, inner hyphens allowed.
class Lemma {
 public:
  // Throws FormatError if `base` violates the invariant.
  explicit Lemma(std::string base);

  static bool is_valid(std::string_view base);

  const std::string& base() const { return base_; }

  friend auto operator<=>(const Lemma&, const Lemma&) = default;

 private:
  std::string base_;
};

struct InflectionPair {
  std::string lemma;
  std::string singular_form;  // third person singular present
  std::string plural_form;    // third person plural present

  // The form that agrees with a subject of number `n`, and the one that
  // does not.
  const std::string& correct_form(Number n) const {
    return n == Number::kSingular ? singular_form : plural_form;
  }
  const std::string& incorrect_form(Number n) const {
    return n == Number::kSingular ? plural_form : singular_form;
  }

  friend bool operator==(const InflectionPair&,
                         const InflectionPair&) = default;
};

// lemma -> (singular, plural) overrides for irregular verbs.
using InflectionExceptions =
    std::map<std::string, std::pair<std::string, std::string>, std::less<>>;

// Applies the fixed rule table:
//   be -> is/are, have -> has/have,
//   -s -x -z -ch -sh -o -> +es, consonant + y -> -ies, otherwise +s.
InflectionPair inflect(const Lemma& lemma);

// Same as above, but an entry in `exceptions` wins over the rules.
InflectionPair inflect(const Lemma& lemma,
                       const InflectionExceptions& exceptions);

class Lexicon {
 public:
  struct Entry {
    InflectionPair pair;
    std::set<std::string> sources;
  };

  Lexicon() = default;

  // Sorts by lemma and merges duplicate lemmas (provenance union; the first
  // pair seen for a lemma is kept).
  explicit Lexicon(std::vector<Entry> entries);

  const std::vector<InflectionPair>& pairs() const { return pairs_; }
  const std::set<std::string>& sources(size_t i) const { return sources_[i]; }
  size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  const InflectionPair* find(std::string_view lemma) const;

  // Looks a surface form up among singular and plural forms.
  struct FormMatch {
    const InflectionPair* pair;
    Number number;
  };
  std::optional<FormMatch> find_form(std::string_view form) const;

  // Union of two lexicons, provenance merged.
  static Lexicon merge(const Lexicon& a, const Lexicon& b);

  std::vector<Entry> entries() const;

 private:
  std::vector<InflectionPair> pairs_;
  std::vector<std::set<std::string>> sources_;
};

// Thrown when loading produces no lemmas at all.
class EmptyLexiconError : public ConfigError {
 public:
  EmptyLexiconError() : ConfigError("empty lexicon") {}
};

struct LexiconLoadOptions {
  InflectionExceptions exceptions;
  std::set<std::string, std::less<>> reject;
  std::string default_source = "user";
};

// One lemma per line, '#' starts a comment line. An optional second
// whitespace-separated field lists provenance tags separated by commas.
Lexicon parse_lemma_list(std::string_view text,
                         const LexiconLoadOptions& options = {});
Lexicon load_lemma_list(const std::filesystem::path& path,
                        const LexiconLoadOptions& options = {});

// Lines "lemma<TAB>singular<TAB>plural".
InflectionExceptions load_exceptions(const std::filesystem::path& path);

// One rejected lemma per line, '#' comments.
std::set<std::string, std::less<>> load_reject_list(
    const std::filesystem::path& path);

struct FilterResult {
  Lexicon lexicon;
  size_t n_input = 0;
  size_t n_kept = 0;
  bool empty() const { return n_kept == 0; }
};

// Keeps the pairs whose two forms are both accepted by `in_vocab`.
FilterResult filter_by_vocabulary(
    const Lexicon& lexicon,
    const std::function<bool(std::string_view)>& in_vocab);

// Set of single-token vocabulary words exported by a backend.
class VocabManifest {
 public:
  VocabManifest() = default;
  explicit VocabManifest(std::string_view text);

  static VocabManifest load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  size_t size() const { return words_.size(); }

  // SHA-256 over the raw manifest bytes.
  const std::string& hash() const { return hash_; }

 private:
  struct Hash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_set<std::string, Hash, std::equal_to<>> words_;
  std::string hash_;
};

}  // namespace tsekit

#endif  // TSEKIT_LEXICON_H_
