#pragma once

#include <bitset>
#include <cstdint>
#include <string>
#include <vector>

#include "circfuzz/util.hpp"

namespace circfuzz {

// Contiguous byte range the whole pipeline works over.  Bytes outside the
// alphabet never match anything (nfa_match rejects strings containing them).
struct Alphabet {
  std::uint8_t lo = 0x20;
  std::uint8_t hi = 0x7E;

  bool contains(std::uint8_t b) const { return b >= lo && b <= hi; }
  std::size_t size() const { return static_cast<std::size_t>(hi) - lo + 1; }
  std::uint8_t byte_at(std::size_t i) const { return static_cast<std::uint8_t>(lo + i); }
  std::size_t index_of(std::uint8_t b) const { return static_cast<std::size_t>(b) - lo; }
};

using ByteSet = std::bitset<256>;

// Closed byte interval; classes are kept as sorted disjoint runs.
struct ByteRange {
  std::uint8_t lo = 0;
  std::uint8_t hi = 0;
  bool operator==(const ByteRange&) const = default;
};

// Parsed pattern, already normalized: classes are sorted disjoint ranges
// clamped to the alphabet, wildcard and negation resolved, directly nested
// equal quantifiers collapsed (a** -> a*).
struct RegexAst {
  enum class Kind { epsilon, char_class, concat, alternation, star, plus, optional };

  Kind kind = Kind::epsilon;
  std::vector<ByteRange> ranges;  // char_class
  std::vector<RegexAst> kids;

  static RegexAst epsilon();
  static RegexAst char_class(std::vector<ByteRange> ranges);
  static RegexAst concat(std::vector<RegexAst> kids);
  static RegexAst alternation(std::vector<RegexAst> kids);
  static RegexAst star(RegexAst k);
  static RegexAst plus(RegexAst k);
  static RegexAst optional(RegexAst k);
};

// Whole-string matching over the alphabet.  Throws ParseError (with byte
// offset) on syntax errors and UnsupportedFeatureError for recognized
// constructs outside the fragment (anchors, {m,n}, backreferences,
// lookaround, escape classes).
RegexAst parse_regex(const std::string& pattern, const Alphabet& alphabet = {});

// Pattern text for an AST (used when reporting generated regexes).
std::string regex_to_string(const RegexAst& ast);

struct NfaTransition {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  ByteSet bytes;
};

struct Nfa {
  Alphabet alphabet;
  std::uint32_t n_states = 0;
  std::uint32_t start = 0;
  std::uint32_t accept = 0;
  std::vector<NfaTransition> transitions;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> epsilons;
};

Nfa build_nfa(const RegexAst& ast, const Alphabet& alphabet = {});

// Subset simulation with epsilon closures; no DFA involved.
bool nfa_match(const Nfa& nfa, const Bytes& input);

inline constexpr std::size_t kDefaultDfaStateCap = 4096;

// Complete deterministic automaton; transitions indexed [state * |alphabet|
// + byte_index].
struct Dfa {
  Alphabet alphabet;
  std::uint32_t n_states = 0;
  std::uint32_t start = 0;
  std::vector<bool> accepting;
  std::vector<std::uint32_t> transitions;

  std::uint32_t next(std::uint32_t state, std::uint8_t byte) const {
    return transitions[state * alphabet.size() + alphabet.index_of(byte)];
  }
  bool matches(const Bytes& input) const;
};

// Subset construction; reachable states only, dead state materialized when
// reachable.  Throws ResourceError when the state count would exceed `cap`.
Dfa determinize(const Nfa& nfa, std::size_t cap = kDefaultDfaStateCap);

// Accept-flip; input must be complete (ours always are).
Dfa complement(const Dfa& dfa);

struct Enumeration {
  std::vector<Bytes> strings;
  bool empty_language = false;  // nothing accepted at any length <= max_len
};

// Shortest-first, lexicographic within a length; stops at max_count.
Enumeration enumerate_accepting_strings(const Dfa& dfa, std::size_t max_len,
                                        std::size_t max_count);
// Same contract, walking epsilon-closed NFA state sets instead.
Enumeration enumerate_accepting_strings(const Nfa& nfa, std::size_t max_len,
                                        std::size_t max_count);

// For each state, length of the shortest accepted suffix (SIZE_MAX when no
// accepting state is reachable).  Used by generators to steer walks.
std::vector<std::size_t> distance_to_accept(const Dfa& dfa);

}  // namespace circfuzz
