#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circfuzz/regex.hpp"
#include "circfuzz/rng.hpp"
#include "circfuzz/util.hpp"

namespace circfuzz {

enum class StringSource {
  structural,       // random expansion of the AST
  enumeration,      // shortest-first DFA enumeration
  accepting_walk,   // random exact-length accepting DFA walk
  mutation,         // byte edits of a valid string, filtered to rejects
  dfa_walk,         // random walk ending in a non-accepting state
  complement_walk,  // accepting walk of the complement DFA
};

const char* string_source_name(StringSource s);

struct GeneratedString {
  Bytes bytes;
  StringSource source = StringSource::structural;
};

struct StringBatch {
  std::vector<GeneratedString> strings;
  // Valid generation: no accepted string of length <= max_len exists.
  bool empty_language = false;
  // Invalid generation: every string of length <= max_len is accepted.
  bool universal_language = false;
};

struct StrGenOptions {
  std::size_t count = 16;
  std::size_t max_len = 12;
  std::uint64_t seed = 0;
  std::size_t star_cap = 8;
  double star_mean = 2.0;
};

// Strings accepted by the regex, from three interleaved sources.  Every
// output is re-checked with nfa_match before emission; a failure there is a
// generator defect and throws.
StringBatch generate_valid_strings(const RegexAst& ast, const Nfa& nfa, const Dfa& dfa,
                                   const StrGenOptions& opt);

// Strings rejected by the regex, from three interleaved sources, each
// verified rejected before emission.
StringBatch generate_invalid_strings(const Nfa& nfa, const Dfa& dfa,
                                     const std::vector<GeneratedString>& valid_pool,
                                     const StrGenOptions& opt);

// Newline-separated patterns; "#" comments.  Lines that fail to parse under
// the alphabet are skipped (collected into `skipped` when given), so the
// corpus may carry patterns beyond the supported fragment.
std::vector<std::string> load_seed_corpus(const std::string& path, const Alphabet& alphabet,
                                          std::vector<std::string>* skipped = nullptr);

}  // namespace circfuzz
