#include "circfuzz/regex.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "circfuzz/errors.hpp"
#include "circfuzz/grammar.hpp"
#include "circfuzz/util.hpp"
#include "testutil.hpp"

namespace circfuzz {
namespace {

const Alphabet kAtoE{'a', 'e'};
const Alphabet kAtoB{'a', 'b'};

Bytes bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

Dfa compile(const std::string& pattern, const Alphabet& ab) {
  return determinize(build_nfa(parse_regex(pattern, ab), ab));
}

TEST(Parse, GroupedAlternationShape) {
  RegexAst ast = parse_regex("a(b|c)*d", kAtoE);
  ASSERT_EQ(ast.kind, RegexAst::Kind::concat);
  ASSERT_EQ(ast.kids.size(), 3u);
  EXPECT_EQ(ast.kids[0].kind, RegexAst::Kind::char_class);
  ASSERT_EQ(ast.kids[1].kind, RegexAst::Kind::star);
  EXPECT_EQ(ast.kids[1].kids[0].kind, RegexAst::Kind::alternation);
  EXPECT_EQ(ast.kids[2].kind, RegexAst::Kind::char_class);
}

TEST(Parse, UnbalancedParenOffset) {
  try {
    parse_regex("a(b", kAtoE);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset, 3u);
  }
}

TEST(Parse, UnsupportedConstructsAreNamed) {
  EXPECT_THROW(parse_regex("^a", kAtoE), UnsupportedFeatureError);
  EXPECT_THROW(parse_regex("a$", kAtoE), UnsupportedFeatureError);
  EXPECT_THROW(parse_regex("a{2,3}", kAtoE), UnsupportedFeatureError);
  EXPECT_THROW(parse_regex("(a)\\1", kAtoE), UnsupportedFeatureError);
  EXPECT_THROW(parse_regex("\\d", kAtoE), UnsupportedFeatureError);
  EXPECT_THROW(parse_regex("a(?=b)", kAtoE), UnsupportedFeatureError);
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
  EXPECT_THROW(parse_regex("*a", kAtoE), ParseError);
  EXPECT_THROW(parse_regex("a)", kAtoE), ParseError);
  EXPECT_THROW(parse_regex("[ab", kAtoE), ParseError);
  EXPECT_THROW(parse_regex("a\\", kAtoE), ParseError);
}

TEST(Parse, DirectlyNestedQuantifiersCollapse) {
  RegexAst ast = parse_regex("a**", kAtoE);
  ASSERT_EQ(ast.kind, RegexAst::Kind::star);
  EXPECT_EQ(ast.kids[0].kind, RegexAst::Kind::char_class);
}

TEST(NfaMatch, StarExamples) {
  Nfa nfa = build_nfa(parse_regex("ab*c", kAtoE), kAtoE);
  EXPECT_TRUE(nfa_match(nfa, bytes("abbc")));
  EXPECT_TRUE(nfa_match(nfa, bytes("ac")));
  EXPECT_FALSE(nfa_match(nfa, bytes("ab")));
  EXPECT_FALSE(nfa_match(nfa, bytes("")));
  // Out-of-alphabet bytes never match.
  EXPECT_FALSE(nfa_match(nfa, bytes("axc")));
  EXPECT_FALSE(nfa_match(nfa, bytes("a\x01c")));
}

TEST(Determinize, SingleLetterIsThreeStates) {
  Dfa dfa = compile("a", kAtoB);
  // Start, accept, dead.
  EXPECT_EQ(dfa.n_states, 3u);
  EXPECT_TRUE(dfa.matches(bytes("a")));
  EXPECT_FALSE(dfa.matches(bytes("b")));
  EXPECT_FALSE(dfa.matches(bytes("aa")));
}

TEST(Determinize, StateCapIsEnforced) {
  Nfa nfa = build_nfa(parse_regex("a", kAtoB), kAtoB);
  EXPECT_THROW(determinize(nfa, 2), ResourceError);
}

TEST(Enumerate, ShortestFirstLexicographic) {
  Dfa dfa = compile("ab*c", kAtoE);
  Enumeration e = enumerate_accepting_strings(dfa, 4, 100);
  ASSERT_EQ(e.strings.size(), 3u);
  EXPECT_EQ(e.strings[0], bytes("ac"));
  EXPECT_EQ(e.strings[1], bytes("abc"));
  EXPECT_EQ(e.strings[2], bytes("abbc"));
  EXPECT_FALSE(e.empty_language);

  Nfa nfa = build_nfa(parse_regex("ab*c", kAtoE), kAtoE);
  Enumeration via_nfa = enumerate_accepting_strings(nfa, 4, 100);
  EXPECT_EQ(via_nfa.strings, e.strings);
}

TEST(Enumerate, EmptyLanguageIsFlagged) {
  // 'c' is outside alphabet {a, b}; the class clamps to nothing.
  Dfa dfa = compile("c", kAtoB);
  Enumeration e = enumerate_accepting_strings(dfa, 5, 10);
  EXPECT_TRUE(e.strings.empty());
  EXPECT_TRUE(e.empty_language);
}

TEST(Complement, FlipsAcceptanceExactly) {
  Dfa dfa = compile("a", kAtoB);
  Dfa comp = complement(dfa);
  EXPECT_TRUE(comp.matches(bytes("")));
  EXPECT_TRUE(comp.matches(bytes("b")));
  EXPECT_FALSE(comp.matches(bytes("a")));
  EXPECT_TRUE(comp.matches(bytes("aa")));
}

TEST(Complement, PartitionLawExhaustive) {
  for (const char* pattern : {"ab*c", "a(b|c)*d", "[a-c]+", "a?b?c?", "(ab)*|(cd)+"}) {
    Dfa dfa = compile(pattern, kAtoE);
    Dfa comp = complement(dfa);
    std::vector<Bytes> frontier{Bytes{}};
    for (std::size_t len = 0; len <= 4; ++len) {
      std::vector<Bytes> next;
      for (const Bytes& s : frontier) {
        EXPECT_NE(dfa.matches(s), comp.matches(s)) << pattern;
        for (std::size_t k = 0; k < kAtoE.size(); ++k) {
          Bytes t = s;
          t.push_back(kAtoE.byte_at(k));
          next.push_back(std::move(t));
        }
      }
      frontier = std::move(next);
    }
  }
}

TEST(Complement, InvolutionPreservesLanguage) {
  Dfa dfa = compile("a(b|c)*d", kAtoE);
  Dfa twice = complement(complement(dfa));
  std::vector<Bytes> frontier{Bytes{}};
  for (std::size_t len = 0; len <= 4; ++len) {
    std::vector<Bytes> next;
    for (const Bytes& s : frontier) {
      EXPECT_EQ(dfa.matches(s), twice.matches(s));
      for (std::size_t k = 0; k < kAtoE.size(); ++k) {
        Bytes t = s;
        t.push_back(kAtoE.byte_at(k));
        next.push_back(std::move(t));
      }
    }
    frontier = std::move(next);
  }
}

TEST(PrintParse, RoundTripPreservesSemantics) {
  Rng rng(2024);
  for (int k = 0; k < 300; ++k) {
    RegexAst ast = testutil::random_ast(rng, kAtoB, 4);
    std::string printed = regex_to_string(ast);
    RegexAst back = parse_regex(printed, kAtoB);
    Nfa n1 = build_nfa(ast, kAtoB);
    Nfa n2 = build_nfa(back, kAtoB);
    std::vector<Bytes> frontier{Bytes{}};
    for (std::size_t len = 0; len <= 5; ++len) {
      std::vector<Bytes> next;
      for (const Bytes& s : frontier) {
        EXPECT_EQ(nfa_match(n1, s), nfa_match(n2, s)) << printed;
        for (std::size_t j = 0; j < kAtoB.size(); ++j) {
          Bytes t = s;
          t.push_back(kAtoB.byte_at(j));
          next.push_back(std::move(t));
        }
      }
      frontier = std::move(next);
    }
  }
}

TEST(Differential, EnginesAgreeWithNaiveMatcher) {
  Rng rng(512);
  for (int k = 0; k < 200; ++k) {
    RegexAst ast = testutil::random_ast(rng, kAtoB, 4);
    Nfa nfa = build_nfa(ast, kAtoB);
    Dfa dfa = determinize(nfa);
    std::vector<Bytes> frontier{Bytes{}};
    for (std::size_t len = 0; len <= 5; ++len) {
      std::vector<Bytes> next;
      for (const Bytes& s : frontier) {
        bool expect = testutil::naive_match(ast, s, kAtoB);
        EXPECT_EQ(nfa_match(nfa, s), expect) << regex_to_string(ast);
        EXPECT_EQ(dfa.matches(s), expect) << regex_to_string(ast);
        for (std::size_t j = 0; j < kAtoB.size(); ++j) {
          Bytes t = s;
          t.push_back(kAtoB.byte_at(j));
          next.push_back(std::move(t));
        }
      }
      frontier = std::move(next);
    }
  }
}

TEST(DistanceToAccept, CountsRemainingSteps) {
  Dfa dfa = compile("ab*c", kAtoE);
  std::vector<std::size_t> dist = distance_to_accept(dfa);
  EXPECT_EQ(dist[dfa.start], 2u);
  // Walk "a": one step from acceptance via 'c'.
  std::uint32_t after_a = dfa.next(dfa.start, 'a');
  EXPECT_EQ(dist[after_a], 1u);
  // The dead state never reaches acceptance.
  std::uint32_t dead = dfa.next(dfa.start, 'b');
  EXPECT_EQ(dist[dead], SIZE_MAX);
}

}  // namespace
}  // namespace circfuzz
