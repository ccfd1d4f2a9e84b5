#include "tsekit/lexicon.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.h"

namespace tsekit {
namespace {

InflectionPair pair_of(const std::string& lemma) { return inflect(Lemma(lemma)); }

TEST(InflectTest, RegularAndIrregular) {
  EXPECT_EQ(pair_of("exist"), (InflectionPair{"exist", "exists", "exist"}));
  EXPECT_EQ(pair_of("be"), (InflectionPair{"be", "is", "are"}));
  EXPECT_EQ(pair_of("try"), (InflectionPair{"try", "tries", "try"}));
  EXPECT_EQ(pair_of("go"), (InflectionPair{"go", "goes", "go"}));
  EXPECT_EQ(pair_of("have").singular_form, "has");
  EXPECT_EQ(pair_of("watch").singular_form, "watches");
  EXPECT_EQ(pair_of("wish").singular_form, "wishes");
  EXPECT_EQ(pair_of("fix").singular_form, "fixes");
  EXPECT_EQ(pair_of("buzz").singular_form, "buzzes");
  EXPECT_EQ(pair_of("pass").singular_form, "passes");
  EXPECT_EQ(pair_of("play").singular_form, "plays");
  EXPECT_EQ(pair_of("do").singular_form, "does");
  EXPECT_EQ(pair_of("meet").singular_form, "meets");
}

TEST(InflectTest, ExceptionTableWins) {
  InflectionExceptions ex{{"quiz", {"quizzes", "quiz"}}};
  EXPECT_EQ(inflect(Lemma("quiz"), ex).singular_form, "quizzes");
  EXPECT_EQ(inflect(Lemma("quiz")).singular_form, "quizes");
  EXPECT_EQ(inflect(Lemma("walk"), ex).singular_form, "walks");
}

TEST(LemmaTest, Validity) {
  EXPECT_TRUE(Lemma::is_valid("walk"));
  EXPECT_TRUE(Lemma::is_valid("co-sign"));
  EXPECT_FALSE(Lemma::is_valid(""));
  EXPECT_FALSE(Lemma::is_valid("-walk"));
  EXPECT_FALSE(Lemma::is_valid("co--sign"));
  EXPECT_FALSE(Lemma::is_valid("##s"));
  EXPECT_FALSE(Lemma::is_valid("Walk"));
  EXPECT_THROW(Lemma("two words"), FormatError);
}

// Independent statement of the rule table, checked on random lemmas.
std::string expected_singular(const std::string& b) {
  if (b == "be") return "is";
  if (b == "have") return "has";
  const auto tail = [&](const std::string& s) {
    return b.size() >= s.size() && b.compare(b.size() - s.size(), s.size(), s) == 0;
  };
  for (const char* s : {"s", "x", "z", "ch", "sh", "o"}) {
    if (tail(s)) return b + "es";
  }
  if (b.size() >= 2 && b.back() == 'y' &&
      std::string("aeiou-").find(b[b.size() - 2]) == std::string::npos) {
    return b.substr(0, b.size() - 1) + "ies";
  }
  return b + "s";
}

TEST(InflectProperty, RuleTableOnRandomLemmas) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i) {
    std::string w = test::random_word(rng, 1, 9);
    const InflectionPair p = pair_of(w);
    ASSERT_EQ(p.lemma, w);
    ASSERT_EQ(p.singular_form, expected_singular(w)) << w;
    ASSERT_EQ(p.plural_form, w == "be" ? "are" : w);
    ASSERT_EQ(p, pair_of(w));
    ASSERT_NE(p.singular_form, p.plural_form);
  }
}

TEST(InflectionPairTest, CorrectFormFollowsNumber) {
  const auto be = pair_of("be");
  EXPECT_EQ(be.correct_form(Number::kPlural), "are");
  EXPECT_EQ(be.incorrect_form(Number::kPlural), "is");
  EXPECT_EQ(be.correct_form(Number::kSingular), "is");
  EXPECT_EQ(be.incorrect_form(Number::kSingular), "are");
}

TEST(LemmaListTest, DeduplicatesLines) {
  const Lexicon lex = parse_lemma_list("exist\nbe\nexist\n");
  ASSERT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.pairs()[0].lemma, "be");
  EXPECT_EQ(lex.pairs()[1].lemma, "exist");
}

TEST(LemmaListTest, EmptyInputIsAnError) {
  try {
    parse_lemma_list("");
    FAIL() << "expected EmptyLexiconError";
  } catch (const EmptyLexiconError& e) {
    EXPECT_STREQ(e.what(), "empty lexicon");
  }
  EXPECT_THROW(parse_lemma_list("# only a comment\n\n"), EmptyLexiconError);
}

TEST(LemmaListTest, InvalidLineNamesLineNumber) {
  try {
    parse_lemma_list("walk\nw@lk\n");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(LemmaListTest, LowercasesAndRejects) {
  LexiconLoadOptions opts;
  opts.reject = {"allowed"};
  const Lexicon lex = parse_lemma_list("Walk\nallowed\n", opts);
  ASSERT_EQ(lex.size(), 1u);
  EXPECT_EQ(lex.pairs()[0].lemma, "walk");
}

TEST(LemmaListTest, ProvenanceIsUnioned) {
  const Lexicon a = parse_lemma_list("walk coca\nrun\n");
  const Lexicon b = parse_lemma_list("walk giant,ptb\n");
  const Lexicon m = Lexicon::merge(a, b);
  ASSERT_EQ(m.size(), 2u);
  ASSERT_EQ(m.pairs()[1].lemma, "walk");
  EXPECT_EQ(m.sources(1), (std::set<std::string>{"coca", "giant", "ptb"}));
  EXPECT_EQ(m.sources(0), (std::set<std::string>{"user"}));
}

TEST(LemmaListTest, OrderInsensitive) {
  std::mt19937_64 rng(11);
  std::vector<std::string> words;
  for (int i = 0; i < 200; ++i) words.push_back(test::random_word(rng, 2, 8));
  auto join = [](const std::vector<std::string>& ws) {
    std::string s;
    for (const auto& w : ws) s += w + "\n";
    return s;
  };
  const Lexicon ref = parse_lemma_list(join(words));
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(words.begin(), words.end(), rng);
    EXPECT_EQ(parse_lemma_list(join(words)).pairs(), ref.pairs());
  }
}

TEST(LemmaListTest, FindAndFindForm) {
  const Lexicon lex = parse_lemma_list("be\nexist\n");
  ASSERT_NE(lex.find("be"), nullptr);
  EXPECT_EQ(lex.find("have"), nullptr);
  auto m = lex.find_form("exists");
  ASSERT_TRUE(m);
  EXPECT_EQ(m->pair->lemma, "exist");
  EXPECT_EQ(m->number, Number::kSingular);
  EXPECT_FALSE(lex.find_form("walks"));
}

TEST(ShippedLemmaList, Count) {
  const auto path = std::filesystem::path(TSEKIT_REPO_DATA) / "lemmas_appendix.txt";
  const Lexicon lex = load_lemma_list(path);
  EXPECT_EQ(lex.size(), 1970u);
  EXPECT_NE(lex.find("abandon"), nullptr);
  EXPECT_NE(lex.find("note"), nullptr);
  ASSERT_NE(lex.find("meet"), nullptr);
  EXPECT_EQ(lex.find("meet")->singular_form, "meets");
}

TEST(ShippedLemmaList, RejectAndExceptionsApply) {
  const std::filesystem::path dir(TSEKIT_REPO_DATA);
  LexiconLoadOptions opts;
  opts.reject = load_reject_list(dir / "reject.txt");
  opts.exceptions = load_exceptions(dir / "exceptions.tsv");
  const Lexicon lex = load_lemma_list(dir / "lemmas_appendix.txt", opts);
  EXPECT_EQ(lex.find("allowed"), nullptr);
  ASSERT_NE(lex.find("quiz"), nullptr);
  EXPECT_EQ(lex.find("quiz")->singular_form, "quizzes");
}

TEST(ExceptionsFileTest, RejectsMalformedLines) {
  test::TempDir dir("exc");
  write_file(dir / "bad.tsv", "walk\twalks\n");
  EXPECT_THROW(load_exceptions(dir / "bad.tsv"), FormatError);
  write_file(dir / "same.tsv", "walk\twalk\twalk\n");
  EXPECT_THROW(load_exceptions(dir / "same.tsv"), FormatError);
}

TEST(FilterTest, AcceptAllIsIdentity) {
  const Lexicon lex = parse_lemma_list("be\nexist\nwalk\n");
  const auto r = filter_by_vocabulary(lex, [](std::string_view) { return true; });
  EXPECT_EQ(r.lexicon.pairs(), lex.pairs());
  EXPECT_EQ(r.n_input, 3u);
  EXPECT_EQ(r.n_kept, 3u);
}

TEST(FilterTest, IsAreKeepsOnlyBe) {
  const Lexicon lex = parse_lemma_list("be\nexist\nwalk\n");
  const VocabManifest vocab("is\nare\n");
  const auto r = filter_by_vocabulary(
      lex, [&](std::string_view w) { return vocab.contains(w); });
  ASSERT_EQ(r.lexicon.size(), 1u);
  EXPECT_EQ(r.lexicon.pairs()[0].lemma, "be");
  EXPECT_FALSE(r.empty());
}

TEST(FilterTest, NeedsBothForms) {
  const Lexicon lex = parse_lemma_list("walk\n");
  const auto r = filter_by_vocabulary(
      lex, [](std::string_view w) { return w == "walk"; });
  EXPECT_TRUE(r.empty());
}

TEST(FilterProperty, IdempotentAndSubset) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    for (int i = 0; i < 30; ++i) text += test::random_word(rng, 2, 5) + "\n";
    const Lexicon lex = parse_lemma_list(text);
    std::set<std::string> vocab;
    std::bernoulli_distribution keep(0.7);
    for (const auto& p : lex.pairs()) {
      if (keep(rng)) vocab.insert(p.singular_form);
      if (keep(rng)) vocab.insert(p.plural_form);
    }
    auto oracle = [&](std::string_view w) { return vocab.contains(std::string(w)); };
    const auto once = filter_by_vocabulary(lex, oracle);
    const auto twice = filter_by_vocabulary(once.lexicon, oracle);
    EXPECT_EQ(once.lexicon.pairs(), twice.lexicon.pairs());
    for (const auto& p : once.lexicon.pairs()) {
      EXPECT_NE(lex.find(p.lemma), nullptr);
    }
  }
}

TEST(VocabManifestTest, HashIsOverRawBytes) {
  const VocabManifest a("is\nare\n");
  const VocabManifest b("is\nare");
  EXPECT_EQ(a.size(), 2u);
  EXPECT_TRUE(a.contains("are"));
  EXPECT_FALSE(a.contains("exists"));
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash(), sha256_hex("is\nare\n"));
  EXPECT_EQ(sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

}  // namespace
}  // namespace tsekit
