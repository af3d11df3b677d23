#include "circfuzz/strgen.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "circfuzz/errors.hpp"
#include "testutil.hpp"

namespace circfuzz {
namespace {

const Alphabet kAtoE{'a', 'e'};

struct Compiled {
  RegexAst ast;
  Nfa nfa;
  Dfa dfa;
};

Compiled compile(const std::string& pattern, const Alphabet& ab = kAtoE) {
  Compiled c;
  c.ast = parse_regex(pattern, ab);
  c.nfa = build_nfa(c.ast, ab);
  c.dfa = determinize(c.nfa);
  return c;
}

std::string str(const Bytes& b) { return std::string(b.begin(), b.end()); }

TEST(ValidStrings, AllAcceptedAndShortOnesAppear) {
  Compiled c = compile("ab*c");
  StrGenOptions opt;
  opt.count = 50;
  opt.seed = 0;
  StringBatch batch = generate_valid_strings(c.ast, c.nfa, c.dfa, opt);
  EXPECT_FALSE(batch.empty_language);
  EXPECT_GE(batch.strings.size(), 10u);

  std::set<std::string> seen;
  for (const GeneratedString& g : batch.strings) {
    EXPECT_TRUE(nfa_match(c.nfa, g.bytes)) << str(g.bytes);
    EXPECT_LE(g.bytes.size(), opt.max_len);
    seen.insert(str(g.bytes));
  }
  // Shortest-first enumeration is one of the sources, so the minimal
  // strings are always in a batch of this size.
  EXPECT_TRUE(seen.count("ac"));
  EXPECT_TRUE(seen.count("abc"));
  // The language holds 11 strings up to this length (ac .. ab^10 c); a
  // batch of 50 draws has found them all, repeating only to fill up.
  EXPECT_EQ(seen.size(), 11u);
}

TEST(ValidStrings, SourcesMix) {
  Compiled c = compile("a[a-e]*e");
  StrGenOptions opt;
  opt.count = 60;
  opt.seed = 4;
  StringBatch batch = generate_valid_strings(c.ast, c.nfa, c.dfa, opt);
  std::set<StringSource> sources;
  for (const GeneratedString& g : batch.strings) sources.insert(g.source);
  // A rich language draws from more than one generation strategy.
  EXPECT_GE(sources.size(), 2u);
}

TEST(ValidStrings, EmptyLanguageIsFlaggedNotLooped) {
  // 'z' clamps to an empty class under this alphabet.
  Compiled c = compile("z");
  StrGenOptions opt;
  opt.count = 8;
  StringBatch batch = generate_valid_strings(c.ast, c.nfa, c.dfa, opt);
  EXPECT_TRUE(batch.strings.empty());
  EXPECT_TRUE(batch.empty_language);
}

TEST(InvalidStrings, AllRejected) {
  Compiled c = compile("a(b|c)*d");
  StrGenOptions opt;
  opt.count = 40;
  opt.seed = 9;
  StringBatch valid = generate_valid_strings(c.ast, c.nfa, c.dfa, opt);
  StringBatch invalid = generate_invalid_strings(c.nfa, c.dfa, valid.strings, opt);
  EXPECT_FALSE(invalid.universal_language);
  EXPECT_GE(invalid.strings.size(), 10u);
  std::set<std::string> seen;
  for (const GeneratedString& g : invalid.strings) {
    EXPECT_FALSE(nfa_match(c.nfa, g.bytes)) << str(g.bytes);
    EXPECT_LE(g.bytes.size(), opt.max_len);
    seen.insert(str(g.bytes));
  }
  EXPECT_EQ(seen.size(), invalid.strings.size());
}

TEST(InvalidStrings, MutationSourceProducesNearMisses) {
  Compiled c = compile("ab*c");
  StrGenOptions opt;
  opt.count = 60;
  opt.seed = 1;
  StringBatch valid = generate_valid_strings(c.ast, c.nfa, c.dfa, opt);
  StringBatch invalid = generate_invalid_strings(c.nfa, c.dfa, valid.strings, opt);
  bool saw_mutation = false;
  for (const GeneratedString& g : invalid.strings)
    saw_mutation |= g.source == StringSource::mutation;
  EXPECT_TRUE(saw_mutation);
}

TEST(InvalidStrings, UniversalLanguageIsFlagged) {
  Compiled c = compile("[a-e]*");
  StrGenOptions opt;
  opt.count = 10;
  opt.max_len = 3;
  StringBatch valid = generate_valid_strings(c.ast, c.nfa, c.dfa, opt);
  EXPECT_FALSE(valid.strings.empty());
  StringBatch invalid = generate_invalid_strings(c.nfa, c.dfa, valid.strings, opt);
  EXPECT_TRUE(invalid.strings.empty());
  EXPECT_TRUE(invalid.universal_language);
}

TEST(StringBatches, DeterministicPerSeed) {
  Compiled c = compile("a(b|c)+d?");
  StrGenOptions opt;
  opt.count = 25;
  opt.seed = 77;
  StringBatch one = generate_valid_strings(c.ast, c.nfa, c.dfa, opt);
  StringBatch two = generate_valid_strings(c.ast, c.nfa, c.dfa, opt);
  ASSERT_EQ(one.strings.size(), two.strings.size());
  for (std::size_t k = 0; k < one.strings.size(); ++k) {
    EXPECT_EQ(one.strings[k].bytes, two.strings[k].bytes);
    EXPECT_EQ(one.strings[k].source, two.strings[k].source);
  }
}

TEST(SeedCorpus, LoadsAndCountsSkips) {
  std::vector<std::string> skipped;
  std::vector<std::string> patterns = load_seed_corpus(
      CIRCFUZZ_SOURCE_DIR "/corpus/regex-seeds.txt", Alphabet{0x20, 0x7E}, &skipped);
  EXPECT_GE(patterns.size(), 10u);
  // The shipped corpus carries two deliberately out-of-fragment lines.
  EXPECT_EQ(skipped.size(), 2u);
  for (const std::string& p : patterns) EXPECT_NO_THROW(parse_regex(p, Alphabet{0x20, 0x7E}));
}

TEST(SeedCorpus, MissingFileThrows) {
  EXPECT_THROW(load_seed_corpus("/nonexistent/corpus.txt", kAtoE, nullptr), IoError);
}

}  // namespace
}  // namespace circfuzz
