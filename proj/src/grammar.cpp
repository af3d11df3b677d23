#include "circfuzz/grammar.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "circfuzz/errors.hpp"

namespace circfuzz {

const std::vector<GrammarAlt>* Grammar::find(const std::string& name) const {
  for (const auto& [n, alts] : rules)
    if (n == name) return &alts;
  return nullptr;
}

namespace {

constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();

struct LineParser {
  const std::string& line;
  std::size_t pos = 0;
  std::string rule;  // for error messages

  bool done() {
    skip_ws();
    return pos >= line.size();
  }

  void skip_ws() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("grammar rule " + (rule.empty() ? "<start>" : rule) + ": " + what,
                     pos);
  }

  std::string quoted() {
    ++pos;  // opening quote
    std::string out;
    while (true) {
      if (pos >= line.size()) fail("unterminated terminal string");
      char c = line[pos++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos >= line.size()) fail("trailing backslash in terminal");
        char e = line[pos++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
  }

  std::string bracketed(char open, char close, const char* what) {
    ++pos;  // open
    std::string out;
    while (true) {
      if (pos >= line.size()) fail(std::string("unterminated ") + what);
      char c = line[pos++];
      if (c == close) return out;
      out += c;
    }
    (void)open;
  }
};

}  // namespace

Grammar parse_bnf(const std::string& text) {
  Grammar g;
  std::istringstream in(text);
  std::string raw;
  std::string current_rule;

  while (std::getline(in, raw)) {
    std::string line = raw;
    // Strip comments outside quotes.
    bool quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quote = !quote;
      if (line[i] == '#' && !quote) {
        line.resize(i);
        break;
      }
    }
    LineParser p{line, 0, current_rule};
    if (p.done()) continue;

    std::vector<GrammarAlt>* alts = nullptr;
    if (line[p.pos] == '|') {
      if (g.rules.empty()) p.fail("continuation line before any rule");
      ++p.pos;
      alts = &g.rules.back().second;
      current_rule = g.rules.back().first;
    } else {
      if (line[p.pos] != '<') p.fail("expected <nonterminal> at rule start");
      std::string name = p.bracketed('<', '>', "nonterminal name");
      current_rule = name;
      p.rule = current_rule;
      p.skip_ws();
      if (line.compare(p.pos, 3, "::=") != 0) p.fail("expected ::=");
      p.pos += 3;
      for (auto& [n, _] : g.rules)
        if (n == name) p.fail("rule defined twice");
      g.rules.emplace_back(name, std::vector<GrammarAlt>{});
      alts = &g.rules.back().second;
      if (g.rules.size() == 1) g.start = name;
    }

    GrammarAlt alt;
    auto flush = [&]() {
      alts->push_back(std::move(alt));
      alt = GrammarAlt{};
    };
    while (!p.done()) {
      char c = line[p.pos];
      if (c == '|') {
        ++p.pos;
        flush();
      } else if (c == '<') {
        alt.symbols.push_back({false, p.bracketed('<', '>', "nonterminal name")});
      } else if (c == '"') {
        alt.symbols.push_back({true, p.quoted()});
      } else if (c == '{') {
        std::string w = p.bracketed('{', '}', "weight");
        try {
          alt.weight = std::stod(w);
        } catch (const std::exception&) {
          p.fail("bad weight {" + w + "}");
        }
        if (!(alt.weight > 0)) p.fail("weight must be positive");
      } else {
        p.fail(std::string("unexpected character '") + c + "'");
      }
    }
    flush();
  }

  if (g.rules.empty()) throw ParseError("grammar has no rules", 0);

  for (const auto& [name, alts] : g.rules)
    for (const GrammarAlt& alt : alts)
      for (const GrammarSymbol& sym : alt.symbols)
        if (!sym.terminal && !g.find(sym.text))
          throw ParseError("undefined nonterminal " + sym.text + " in rule " + name, 0);

  // Minimal expansion depth per nonterminal, fixpoint from terminals up.
  std::map<std::string, std::size_t> depth;
  for (const auto& [name, _] : g.rules) depth[name] = kUnset;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [name, alts] : g.rules) {
      for (GrammarAlt& alt : alts) {
        std::size_t worst = 0;
        for (const GrammarSymbol& sym : alt.symbols) {
          if (sym.terminal) continue;
          std::size_t d = depth[sym.text];
          if (d == kUnset) {
            worst = kUnset;
            break;
          }
          worst = std::max(worst, d);
        }
        std::size_t alt_depth = worst == kUnset ? kUnset : worst + 1;
        alt.min_depth = alt_depth;
        if (alt_depth != kUnset && alt_depth < depth[name]) {
          depth[name] = alt_depth;
          changed = true;
        }
      }
    }
  }
  std::string unproductive;
  for (const auto& [name, _] : g.rules)
    if (depth[name] == kUnset)
      unproductive += (unproductive.empty() ? "" : ", ") + name;
  if (!unproductive.empty())
    throw ParseError("unproductive rule(s) " + unproductive +
                         " (cannot derive a finite string)",
                     0);
  // min_depth recomputation now that the map is final.
  for (auto& [name, alts] : g.rules)
    for (GrammarAlt& alt : alts) {
      std::size_t worst = 0;
      for (const GrammarSymbol& sym : alt.symbols)
        if (!sym.terminal) worst = std::max(worst, depth[sym.text]);
      alt.min_depth = worst + 1;
    }
  return g;
}

namespace {

void derive(const Grammar& g, const std::string& nt, std::size_t depth_left, Rng& rng,
            std::string& out, std::size_t len_cap) {
  const std::vector<GrammarAlt>& alts = *g.find(nt);
  bool force_minimal = depth_left == 0 || out.size() >= len_cap;

  const GrammarAlt* chosen = nullptr;
  if (force_minimal) {
    std::size_t best = kUnset;
    for (const GrammarAlt& a : alts) best = std::min(best, a.min_depth);
    std::vector<const GrammarAlt*> pool;
    for (const GrammarAlt& a : alts)
      if (a.min_depth == best) pool.push_back(&a);
    chosen = pool[rng.below(pool.size())];
  } else {
    double total = 0;
    for (const GrammarAlt& a : alts) total += a.weight;
    double x = rng.unit() * total;
    for (const GrammarAlt& a : alts) {
      chosen = &a;
      x -= a.weight;
      if (x <= 0) break;
    }
  }
  for (const GrammarSymbol& sym : chosen->symbols) {
    if (sym.terminal)
      out += sym.text;
    else
      derive(g, sym.text, force_minimal ? 0 : depth_left - 1, rng, out, len_cap);
  }
}

}  // namespace

std::string generate_regex(const Grammar& grammar, const GenBudget& budget) {
  Rng rng(budget.rng_seed);
  std::size_t depth = budget.max_depth;
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::string out;
    derive(grammar, grammar.start, depth, rng, out, budget.max_regex_len);
    if (out.size() <= budget.max_regex_len) return out;
    depth = depth > 1 ? depth / 2 : 0;
  }
  std::string out;
  Rng last(budget.rng_seed);
  derive(grammar, grammar.start, 0, last, out, budget.max_regex_len);
  return out;
}

}  // namespace circfuzz
