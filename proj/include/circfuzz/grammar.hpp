#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "circfuzz/rng.hpp"

namespace circfuzz {

// A grammar symbol: terminal text to emit literally, or a nonterminal name.
struct GrammarSymbol {
  bool terminal = true;
  std::string text;
};

struct GrammarAlt {
  double weight = 1.0;
  std::vector<GrammarSymbol> symbols;
  // Depth of the shallowest full expansion through this alternative; filled
  // in by validation and used to force termination at the depth budget.
  std::size_t min_depth = 0;
};

struct Grammar {
  std::string start;
  // Insertion-ordered for deterministic iteration.
  std::vector<std::pair<std::string, std::vector<GrammarAlt>>> rules;

  const std::vector<GrammarAlt>* find(const std::string& name) const;
};

// BNF dialect:
//   <name> ::= alternative | alternative
//   alternative = sequence of <nonterminal> and "terminal" tokens, with an
//   optional {weight} annotation anywhere in the alternative.
//   Quoted terminals support \\ \" \n \t escapes.  "#" starts a comment.
//   A line starting with "|" continues the previous rule.  An empty
//   alternative derives the empty string.  The first rule is the start
//   symbol.
// Validation: every referenced nonterminal defined; every nonterminal can
// derive a finite string.  Errors name the offending rule.
Grammar parse_bnf(const std::string& text);

struct GenBudget {
  std::size_t max_depth = 8;
  std::size_t max_regex_len = 64;
  std::uint64_t rng_seed = 0;
};

// Weighted random derivation from the start symbol.  Beyond max_depth only
// minimal-depth alternatives are taken, so generation always terminates.
// Output longer than max_regex_len triggers a retry with a tighter depth;
// the final fallback is the minimal derivation.
std::string generate_regex(const Grammar& grammar, const GenBudget& budget);

}  // namespace circfuzz
