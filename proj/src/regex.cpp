#include "circfuzz/regex.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "circfuzz/errors.hpp"

namespace circfuzz {

RegexAst RegexAst::epsilon() { return RegexAst{}; }

RegexAst RegexAst::char_class(std::vector<ByteRange> ranges) {
  RegexAst n;
  n.kind = Kind::char_class;
  n.ranges = std::move(ranges);
  return n;
}

RegexAst RegexAst::concat(std::vector<RegexAst> kids) {
  RegexAst n;
  n.kind = Kind::concat;
  n.kids = std::move(kids);
  return n;
}

RegexAst RegexAst::alternation(std::vector<RegexAst> kids) {
  RegexAst n;
  n.kind = Kind::alternation;
  n.kids = std::move(kids);
  return n;
}

namespace {
RegexAst wrap(RegexAst::Kind kind, RegexAst k) {
  if (k.kind == kind) return k;  // a** -> a*
  RegexAst n;
  n.kind = kind;
  n.kids.push_back(std::move(k));
  return n;
}
}  // namespace

RegexAst RegexAst::star(RegexAst k) { return wrap(Kind::star, std::move(k)); }
RegexAst RegexAst::plus(RegexAst k) { return wrap(Kind::plus, std::move(k)); }
RegexAst RegexAst::optional(RegexAst k) { return wrap(Kind::optional, std::move(k)); }

namespace {

std::vector<ByteRange> normalize_ranges(std::vector<ByteRange> ranges, const Alphabet& ab,
                                        bool negate) {
  // Clamp to the alphabet, then sort and merge.
  std::vector<ByteRange> clamped;
  for (ByteRange r : ranges) {
    if (r.hi < ab.lo || r.lo > ab.hi) continue;
    r.lo = std::max(r.lo, ab.lo);
    r.hi = std::min(r.hi, ab.hi);
    clamped.push_back(r);
  }
  std::sort(clamped.begin(), clamped.end(),
            [](const ByteRange& a, const ByteRange& b) { return a.lo < b.lo; });
  std::vector<ByteRange> merged;
  for (const ByteRange& r : clamped) {
    if (!merged.empty() && r.lo <= merged.back().hi + 1)
      merged.back().hi = std::max(merged.back().hi, r.hi);
    else
      merged.push_back(r);
  }
  if (!negate) return merged;
  std::vector<ByteRange> out;
  int cursor = ab.lo;
  for (const ByteRange& r : merged) {
    if (r.lo > cursor) out.push_back({static_cast<std::uint8_t>(cursor),
                                      static_cast<std::uint8_t>(r.lo - 1)});
    cursor = r.hi + 1;
  }
  if (cursor <= ab.hi)
    out.push_back({static_cast<std::uint8_t>(cursor), ab.hi});
  return out;
}

class RegexParser {
 public:
  RegexParser(const std::string& s, const Alphabet& ab) : s_(s), ab_(ab) {}

  RegexAst parse() {
    RegexAst ast = parse_union();
    if (pos_ != s_.size()) {
      if (s_[pos_] == ')') throw ParseError("unmatched ')'", pos_);
      throw ParseError("trailing input", pos_);
    }
    return ast;
  }

 private:
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  RegexAst parse_union() {
    std::vector<RegexAst> alts;
    alts.push_back(parse_concat());
    while (!done() && peek() == '|') {
      ++pos_;
      alts.push_back(parse_concat());
    }
    if (alts.size() == 1) return std::move(alts[0]);
    return RegexAst::alternation(std::move(alts));
  }

  RegexAst parse_concat() {
    std::vector<RegexAst> parts;
    while (!done() && peek() != '|' && peek() != ')') parts.push_back(parse_factor());
    if (parts.empty()) return RegexAst::epsilon();
    if (parts.size() == 1) return std::move(parts[0]);
    return RegexAst::concat(std::move(parts));
  }

  RegexAst parse_factor() {
    RegexAst atom = parse_atom();
    while (!done()) {
      char c = peek();
      if (c == '*') {
        atom = RegexAst::star(std::move(atom));
      } else if (c == '+') {
        atom = RegexAst::plus(std::move(atom));
      } else if (c == '?') {
        atom = RegexAst::optional(std::move(atom));
      } else {
        break;
      }
      ++pos_;
    }
    return atom;
  }

  RegexAst parse_atom() {
    if (done()) throw ParseError("expected atom", pos_);
    char c = peek();
    switch (c) {
      case '*':
      case '+':
      case '?':
        throw ParseError("quantifier without operand", pos_);
      case '^':
        throw UnsupportedFeatureError("anchor '^'", pos_);
      case '$':
        throw UnsupportedFeatureError("anchor '$'", pos_);
      case '{':
        throw UnsupportedFeatureError("bounded repetition '{m,n}'", pos_);
      case '(': {
        ++pos_;
        if (!done() && peek() == '?')
          throw UnsupportedFeatureError("'(?...)' group (lookaround/flags)", pos_ - 1);
        RegexAst inner = parse_union();
        if (done() || peek() != ')') throw ParseError("unmatched '('", pos_);
        ++pos_;
        return inner;
      }
      case '[':
        return parse_class();
      case '.': {
        ++pos_;
        return RegexAst::char_class(normalize_ranges({{ab_.lo, ab_.hi}}, ab_, false));
      }
      default: {
        std::uint8_t b = parse_char(false);
        return RegexAst::char_class(normalize_ranges({{b, b}}, ab_, false));
      }
    }
  }

  RegexAst parse_class() {
    std::size_t open = pos_;
    ++pos_;  // '['
    bool negate = false;
    if (!done() && peek() == '^') {
      negate = true;
      ++pos_;
    }
    std::vector<ByteRange> ranges;
    while (true) {
      if (done()) throw ParseError("unterminated character class", open);
      if (peek() == ']') {
        if (ranges.empty()) throw ParseError("empty character class", open);
        ++pos_;
        break;
      }
      std::uint8_t lo = parse_char(true);
      std::uint8_t hi = lo;
      if (!done() && peek() == '-' && pos_ + 1 < s_.size() && s_[pos_ + 1] != ']') {
        ++pos_;
        hi = parse_char(true);
        if (hi < lo) throw ParseError("inverted range in character class", pos_ - 1);
      }
      ranges.push_back({lo, hi});
    }
    return RegexAst::char_class(normalize_ranges(std::move(ranges), ab_, negate));
  }

  // One literal byte, resolving escapes.  In classes the metacharacter set
  // differs but escapes are shared.
  std::uint8_t parse_char(bool in_class) {
    char c = s_[pos_];
    if (c != '\\') {
      ++pos_;
      return static_cast<std::uint8_t>(c);
    }
    ++pos_;
    if (done()) throw ParseError("trailing backslash", pos_ - 1);
    char e = s_[pos_++];
    switch (e) {
      case 'n': return 0x0A;
      case 't': return 0x09;
      case 'r': return 0x0D;
      case 'x': {
        if (pos_ + 2 > s_.size()) throw ParseError("\\x needs two hex digits", pos_);
        auto hex = [&](char h) -> int {
          if (h >= '0' && h <= '9') return h - '0';
          if (h >= 'a' && h <= 'f') return h - 'a' + 10;
          if (h >= 'A' && h <= 'F') return h - 'A' + 10;
          return -1;
        };
        int hi = hex(s_[pos_]), lo = hex(s_[pos_ + 1]);
        if (hi < 0 || lo < 0) throw ParseError("\\x needs two hex digits", pos_);
        pos_ += 2;
        return static_cast<std::uint8_t>(hi * 16 + lo);
      }
      default:
        if (e >= '1' && e <= '9')
          throw UnsupportedFeatureError(std::string("backreference '\\") + e + "'", pos_ - 1);
        if ((e >= 'a' && e <= 'z') || (e >= 'A' && e <= 'Z'))
          throw UnsupportedFeatureError(std::string("escape class '\\") + e + "'", pos_ - 1);
        (void)in_class;
        return static_cast<std::uint8_t>(e);  // escaped punctuation stands for itself
    }
  }

  const std::string& s_;
  Alphabet ab_;
  std::size_t pos_ = 0;
};

}  // namespace

RegexAst parse_regex(const std::string& pattern, const Alphabet& alphabet) {
  if (alphabet.hi < alphabet.lo) throw ConfigError("alphabet range is empty");
  return RegexParser(pattern, alphabet).parse();
}

namespace {

bool needs_escape_outside(char c) {
  return std::string(".*+?()[]{}|\\^$").find(c) != std::string::npos;
}

void print_byte(std::string& out, std::uint8_t b, bool in_class) {
  static const char* hexd = "0123456789abcdef";
  bool printable = b >= 0x20 && b <= 0x7E;
  if (!printable) {
    out += "\\x";
    out += hexd[b >> 4];
    out += hexd[b & 0xF];
    return;
  }
  char c = static_cast<char>(b);
  if (in_class ? (c == ']' || c == '\\' || c == '^' || c == '-') : needs_escape_outside(c))
    out += '\\';
  out += c;
}

// Precedence: alternation 0, concat 1, quantifier 2, atom 3.
void print_ast(std::string& out, const RegexAst& ast, int context) {
  switch (ast.kind) {
    case RegexAst::Kind::epsilon:
      if (context > 1) out += "()";
      return;
    case RegexAst::Kind::char_class: {
      if (ast.ranges.size() == 1 && ast.ranges[0].lo == ast.ranges[0].hi) {
        print_byte(out, ast.ranges[0].lo, false);
        return;
      }
      out += '[';
      if (ast.ranges.empty()) out += "^\\x00-\\xff";  // unmatchable class
      for (const ByteRange& r : ast.ranges) {
        print_byte(out, r.lo, true);
        if (r.hi != r.lo) {
          if (r.hi > r.lo + 1) out += '-';
          print_byte(out, r.hi, true);
        }
      }
      out += ']';
      return;
    }
    case RegexAst::Kind::concat: {
      bool wrap = context > 1;
      if (wrap) out += '(';
      for (const auto& k : ast.kids) print_ast(out, k, 1);
      if (wrap) out += ')';
      return;
    }
    case RegexAst::Kind::alternation: {
      bool wrap = context > 0;
      if (wrap) out += '(';
      for (std::size_t i = 0; i < ast.kids.size(); ++i) {
        if (i) out += '|';
        print_ast(out, ast.kids[i], 0);
      }
      if (wrap) out += ')';
      return;
    }
    case RegexAst::Kind::star:
    case RegexAst::Kind::plus:
    case RegexAst::Kind::optional: {
      print_ast(out, ast.kids[0], 2);
      out += ast.kind == RegexAst::Kind::star ? '*'
             : ast.kind == RegexAst::Kind::plus ? '+'
                                                : '?';
      return;
    }
  }
}

}  // namespace

std::string regex_to_string(const RegexAst& ast) {
  std::string out;
  print_ast(out, ast, 0);
  return out;
}

namespace {

struct NfaFragment {
  std::uint32_t start, accept;
};

struct NfaBuilder {
  Nfa nfa;

  std::uint32_t fresh() { return nfa.n_states++; }
  void eps(std::uint32_t a, std::uint32_t b) { nfa.epsilons.push_back({a, b}); }

  NfaFragment build(const RegexAst& ast) {
    switch (ast.kind) {
      case RegexAst::Kind::epsilon: {
        std::uint32_t s = fresh(), t = fresh();
        eps(s, t);
        return {s, t};
      }
      case RegexAst::Kind::char_class: {
        std::uint32_t s = fresh(), t = fresh();
        ByteSet bytes;
        for (const ByteRange& r : ast.ranges)
          for (int b = r.lo; b <= r.hi; ++b) bytes.set(b);
        nfa.transitions.push_back({s, t, bytes});
        return {s, t};
      }
      case RegexAst::Kind::concat: {
        NfaFragment acc = build(ast.kids[0]);
        for (std::size_t i = 1; i < ast.kids.size(); ++i) {
          NfaFragment next = build(ast.kids[i]);
          eps(acc.accept, next.start);
          acc.accept = next.accept;
        }
        return acc;
      }
      case RegexAst::Kind::alternation: {
        std::uint32_t s = fresh(), t = fresh();
        for (const auto& k : ast.kids) {
          NfaFragment f = build(k);
          eps(s, f.start);
          eps(f.accept, t);
        }
        return {s, t};
      }
      case RegexAst::Kind::star: {
        std::uint32_t s = fresh(), t = fresh();
        NfaFragment f = build(ast.kids[0]);
        eps(s, t);
        eps(s, f.start);
        eps(f.accept, f.start);
        eps(f.accept, t);
        return {s, t};
      }
      case RegexAst::Kind::plus: {
        std::uint32_t s = fresh(), t = fresh();
        NfaFragment f = build(ast.kids[0]);
        eps(s, f.start);
        eps(f.accept, f.start);
        eps(f.accept, t);
        return {s, t};
      }
      case RegexAst::Kind::optional: {
        std::uint32_t s = fresh(), t = fresh();
        NfaFragment f = build(ast.kids[0]);
        eps(s, t);
        eps(s, f.start);
        eps(f.accept, t);
        return {s, t};
      }
    }
    throw Error("bad ast");
  }
};

// Adjacency view used by the subset algorithms.
struct NfaIndex {
  std::vector<std::vector<std::uint32_t>> eps_out;
  std::vector<std::vector<const NfaTransition*>> trans_out;

  explicit NfaIndex(const Nfa& nfa)
      : eps_out(nfa.n_states), trans_out(nfa.n_states) {
    for (const auto& [a, b] : nfa.epsilons) eps_out[a].push_back(b);
    for (const auto& t : nfa.transitions) trans_out[t.from].push_back(&t);
  }

  void close(std::vector<std::uint32_t>& set, std::vector<char>& mark) const {
    std::vector<std::uint32_t> stack(set);
    while (!stack.empty()) {
      std::uint32_t s = stack.back();
      stack.pop_back();
      for (std::uint32_t t : eps_out[s]) {
        if (!mark[t]) {
          mark[t] = 1;
          set.push_back(t);
          stack.push_back(t);
        }
      }
    }
    std::sort(set.begin(), set.end());
  }

  std::vector<std::uint32_t> closure_of(std::vector<std::uint32_t> seed,
                                        std::size_t n_states) const {
    std::vector<char> mark(n_states, 0);
    for (std::uint32_t s : seed) mark[s] = 1;
    close(seed, mark);
    return seed;
  }

  std::vector<std::uint32_t> step(const std::vector<std::uint32_t>& set, std::uint8_t byte,
                                  std::size_t n_states) const {
    std::vector<char> mark(n_states, 0);
    std::vector<std::uint32_t> out;
    for (std::uint32_t s : set)
      for (const NfaTransition* t : trans_out[s])
        if (t->bytes.test(byte) && !mark[t->to]) {
          mark[t->to] = 1;
          out.push_back(t->to);
        }
    close(out, mark);
    return out;
  }
};

}  // namespace

Nfa build_nfa(const RegexAst& ast, const Alphabet& alphabet) {
  NfaBuilder b;
  b.nfa.alphabet = alphabet;
  NfaFragment f = b.build(ast);
  b.nfa.start = f.start;
  b.nfa.accept = f.accept;
  return std::move(b.nfa);
}

bool nfa_match(const Nfa& nfa, const Bytes& input) {
  for (std::uint8_t b : input)
    if (!nfa.alphabet.contains(b)) return false;
  NfaIndex idx(nfa);
  std::vector<std::uint32_t> cur = idx.closure_of({nfa.start}, nfa.n_states);
  for (std::uint8_t b : input) {
    cur = idx.step(cur, b, nfa.n_states);
    if (cur.empty()) return false;
  }
  return std::binary_search(cur.begin(), cur.end(), nfa.accept);
}

bool Dfa::matches(const Bytes& input) const {
  std::uint32_t s = start;
  for (std::uint8_t b : input) {
    if (!alphabet.contains(b)) return false;
    s = next(s, b);
  }
  return accepting[s];
}

Dfa determinize(const Nfa& nfa, std::size_t cap) {
  NfaIndex idx(nfa);
  const std::size_t asize = nfa.alphabet.size();

  Dfa dfa;
  dfa.alphabet = nfa.alphabet;

  std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
  std::vector<std::vector<std::uint32_t>> subsets;
  auto intern = [&](std::vector<std::uint32_t> subset) -> std::uint32_t {
    auto it = ids.find(subset);
    if (it != ids.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(subsets.size());
    if (subsets.size() + 1 > cap)
      throw ResourceError("dfa state cap exceeded (" + std::to_string(cap) + ")");
    ids.emplace(subset, id);
    subsets.push_back(std::move(subset));
    return id;
  };

  std::uint32_t start_id = intern(idx.closure_of({nfa.start}, nfa.n_states));
  dfa.start = start_id;
  for (std::uint32_t id = 0; id < subsets.size(); ++id) {
    dfa.transitions.resize((id + 1) * asize);
    for (std::size_t bi = 0; bi < asize; ++bi) {
      std::vector<std::uint32_t> nxt =
          idx.step(subsets[id], nfa.alphabet.byte_at(bi), nfa.n_states);
      dfa.transitions[id * asize + bi] = intern(std::move(nxt));
    }
  }
  dfa.n_states = static_cast<std::uint32_t>(subsets.size());
  dfa.transitions.resize(dfa.n_states * asize);
  dfa.accepting.resize(dfa.n_states);
  for (std::uint32_t id = 0; id < dfa.n_states; ++id)
    dfa.accepting[id] =
        std::binary_search(subsets[id].begin(), subsets[id].end(), nfa.accept);
  return dfa;
}

Dfa complement(const Dfa& dfa) {
  Dfa out = dfa;
  for (std::size_t i = 0; i < out.accepting.size(); ++i)
    out.accepting[i] = !out.accepting[i];
  return out;
}

std::vector<std::size_t> distance_to_accept(const Dfa& dfa) {
  constexpr std::size_t kInf = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::uint32_t>> rev(dfa.n_states);
  for (std::uint32_t s = 0; s < dfa.n_states; ++s)
    for (std::size_t bi = 0; bi < dfa.alphabet.size(); ++bi)
      rev[dfa.transitions[s * dfa.alphabet.size() + bi]].push_back(s);
  std::vector<std::size_t> dist(dfa.n_states, kInf);
  std::queue<std::uint32_t> q;
  for (std::uint32_t s = 0; s < dfa.n_states; ++s)
    if (dfa.accepting[s]) {
      dist[s] = 0;
      q.push(s);
    }
  while (!q.empty()) {
    std::uint32_t s = q.front();
    q.pop();
    for (std::uint32_t p : rev[s])
      if (dist[p] == kInf) {
        dist[p] = dist[s] + 1;
        q.push(p);
      }
  }
  return dist;
}

namespace {

// Shortest-first lexicographic emission over any complete transition table.
struct TableEnumerator {
  std::size_t n_states;
  std::size_t asize;
  const std::vector<std::uint32_t>& transitions;  // n_states * asize
  const std::vector<bool>& accepting;
  const Alphabet& alphabet;

  Enumeration run(std::uint32_t start, std::size_t max_len, std::size_t max_count) const {
    // exact[r][s]: an accepting state is reachable from s in exactly r steps.
    std::vector<std::vector<char>> exact(max_len + 1,
                                         std::vector<char>(n_states, 0));
    for (std::size_t s = 0; s < n_states; ++s) exact[0][s] = accepting[s];
    for (std::size_t r = 1; r <= max_len; ++r)
      for (std::size_t s = 0; s < n_states; ++s)
        for (std::size_t bi = 0; bi < asize && !exact[r][s]; ++bi)
          exact[r][s] = exact[r - 1][transitions[s * asize + bi]];

    Enumeration out;
    out.empty_language = true;
    for (std::size_t len = 0; len <= max_len; ++len)
      if (exact[len][start]) out.empty_language = false;

    Bytes buf;
    for (std::size_t len = 0; len <= max_len && out.strings.size() < max_count; ++len) {
      buf.clear();
      emit(start, len, buf, max_count, exact, out);
    }
    return out;
  }

  void emit(std::uint32_t state, std::size_t remaining, Bytes& buf, std::size_t max_count,
            const std::vector<std::vector<char>>& exact, Enumeration& out) const {
    if (out.strings.size() >= max_count) return;
    if (remaining == 0) {
      if (accepting[state]) out.strings.push_back(buf);
      return;
    }
    for (std::size_t bi = 0; bi < asize; ++bi) {
      std::uint32_t nxt = transitions[state * asize + bi];
      if (!exact[remaining - 1][nxt]) continue;
      buf.push_back(alphabet.byte_at(bi));
      emit(nxt, remaining - 1, buf, max_count, exact, out);
      buf.pop_back();
      if (out.strings.size() >= max_count) return;
    }
  }
};

}  // namespace

Enumeration enumerate_accepting_strings(const Dfa& dfa, std::size_t max_len,
                                        std::size_t max_count) {
  TableEnumerator e{dfa.n_states, dfa.alphabet.size(), dfa.transitions, dfa.accepting,
                    dfa.alphabet};
  return e.run(dfa.start, max_len, max_count);
}

Enumeration enumerate_accepting_strings(const Nfa& nfa, std::size_t max_len,
                                        std::size_t max_count) {
  // Walk epsilon-closed subsets directly; interned on the fly, no cap.
  NfaIndex idx(nfa);
  const std::size_t asize = nfa.alphabet.size();
  std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
  std::vector<std::vector<std::uint32_t>> subsets;
  std::vector<std::uint32_t> table;
  std::vector<bool> accepting;
  auto intern = [&](std::vector<std::uint32_t> subset) -> std::uint32_t {
    auto it = ids.find(subset);
    if (it != ids.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(subsets.size());
    ids.emplace(subset, id);
    subsets.push_back(std::move(subset));
    return id;
  };
  std::uint32_t start = intern(idx.closure_of({nfa.start}, nfa.n_states));
  for (std::uint32_t id = 0; id < subsets.size(); ++id) {
    table.resize((id + 1) * asize);
    for (std::size_t bi = 0; bi < asize; ++bi)
      table[id * asize + bi] =
          intern(idx.step(subsets[id], nfa.alphabet.byte_at(bi), nfa.n_states));
  }
  accepting.resize(subsets.size());
  for (std::uint32_t id = 0; id < subsets.size(); ++id)
    accepting[id] = std::binary_search(subsets[id].begin(), subsets[id].end(), nfa.accept);
  table.resize(subsets.size() * asize);
  TableEnumerator e{subsets.size(), asize, table, accepting, nfa.alphabet};
  return e.run(start, max_len, max_count);
}

}  // namespace circfuzz
