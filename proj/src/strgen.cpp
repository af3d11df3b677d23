#include "circfuzz/strgen.hpp"

#include <algorithm>
#include <set>

#include "circfuzz/errors.hpp"

namespace circfuzz {

const char* string_source_name(StringSource s) {
  switch (s) {
    case StringSource::structural: return "structural";
    case StringSource::enumeration: return "enumeration";
    case StringSource::accepting_walk: return "accepting_walk";
    case StringSource::mutation: return "mutation";
    case StringSource::dfa_walk: return "dfa_walk";
    case StringSource::complement_walk: return "complement_walk";
  }
  return "?";
}

namespace {

// exact[r][s]: an accepting state is reachable from s in exactly r steps.
std::vector<std::vector<char>> exact_accept_table(const Dfa& dfa, std::size_t max_len) {
  const std::size_t asize = dfa.alphabet.size();
  std::vector<std::vector<char>> exact(max_len + 1,
                                       std::vector<char>(dfa.n_states, 0));
  for (std::uint32_t s = 0; s < dfa.n_states; ++s) exact[0][s] = dfa.accepting[s];
  for (std::size_t r = 1; r <= max_len; ++r)
    for (std::uint32_t s = 0; s < dfa.n_states; ++s)
      for (std::size_t bi = 0; bi < asize && !exact[r][s]; ++bi)
        exact[r][s] = exact[r - 1][dfa.transitions[s * asize + bi]];
  return exact;
}

std::vector<std::size_t> feasible_lengths(const std::vector<std::vector<char>>& exact,
                                          std::uint32_t start) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < exact.size(); ++r)
    if (exact[r][start]) out.push_back(r);
  return out;
}

// Random accepting walk of exactly `len` bytes; always succeeds when
// exact[len][start] holds.
Bytes accepting_walk(const Dfa& dfa, const std::vector<std::vector<char>>& exact,
                     std::size_t len, Rng& rng) {
  const std::size_t asize = dfa.alphabet.size();
  Bytes out;
  std::uint32_t s = dfa.start;
  for (std::size_t r = len; r > 0; --r) {
    std::vector<std::size_t> good;
    for (std::size_t bi = 0; bi < asize; ++bi)
      if (exact[r - 1][dfa.transitions[s * asize + bi]]) good.push_back(bi);
    std::size_t bi = good[rng.below(good.size())];
    out.push_back(dfa.alphabet.byte_at(bi));
    s = dfa.transitions[s * asize + bi];
  }
  return out;
}

struct StructuralWalker {
  const StrGenOptions& opt;
  Rng& rng;

  bool walk(const RegexAst& ast, Bytes& out) {
    if (out.size() > opt.max_len) return false;
    switch (ast.kind) {
      case RegexAst::Kind::epsilon:
        return true;
      case RegexAst::Kind::char_class: {
        std::size_t total = 0;
        for (const ByteRange& r : ast.ranges) total += r.hi - r.lo + 1;
        if (total == 0) return false;
        std::size_t k = rng.below(total);
        for (const ByteRange& r : ast.ranges) {
          std::size_t span = r.hi - r.lo + 1;
          if (k < span) {
            out.push_back(static_cast<std::uint8_t>(r.lo + k));
            return out.size() <= opt.max_len;
          }
          k -= span;
        }
        return false;
      }
      case RegexAst::Kind::concat:
        for (const RegexAst& kid : ast.kids)
          if (!walk(kid, out)) return false;
        return true;
      case RegexAst::Kind::alternation:
        return walk(ast.kids[rng.below(ast.kids.size())], out);
      case RegexAst::Kind::star:
      case RegexAst::Kind::plus: {
        double p = 1.0 / (opt.star_mean + 1.0);
        std::size_t reps = rng.geometric(p, opt.star_cap);
        if (ast.kind == RegexAst::Kind::plus) reps = std::min(reps + 1, opt.star_cap);
        for (std::size_t i = 0; i < reps; ++i)
          if (!walk(ast.kids[0], out)) return false;
        return true;
      }
      case RegexAst::Kind::optional:
        if (rng.chance(0.5)) return walk(ast.kids[0], out);
        return true;
    }
    return false;
  }
};

class BatchSink {
 public:
  BatchSink(StringBatch& batch, std::size_t count) : batch_(batch), count_(count) {}

  bool full() const { return batch_.strings.size() >= count_; }
  bool fresh(const Bytes& b) const { return !seen_.count(b); }

  void emit(Bytes b, StringSource source) {
    seen_.insert(b);
    batch_.strings.push_back({std::move(b), source});
  }

 private:
  StringBatch& batch_;
  std::size_t count_;
  std::set<Bytes> seen_;
};

}  // namespace

StringBatch generate_valid_strings(const RegexAst& ast, const Nfa& nfa, const Dfa& dfa,
                                   const StrGenOptions& opt) {
  StringBatch batch;
  auto exact = exact_accept_table(dfa, opt.max_len);
  std::vector<std::size_t> lengths = feasible_lengths(exact, dfa.start);
  if (lengths.empty()) {
    batch.empty_language = true;
    return batch;
  }

  Rng rng(opt.seed);
  Enumeration enumerated = enumerate_accepting_strings(dfa, opt.max_len, opt.count);
  std::size_t enum_next = 0;

  BatchSink sink(batch, opt.count);
  auto check_emit = [&](Bytes b, StringSource source) {
    if (!nfa_match(nfa, b))
      throw Error("valid-string generator produced a rejected string (source " +
                  std::string(string_source_name(source)) + ")");
    sink.emit(std::move(b), source);
  };

  const StringSource order[] = {StringSource::structural, StringSource::enumeration,
                                StringSource::accepting_walk};
  std::size_t which = 0;
  std::size_t barren_streak = 0;
  while (!sink.full() && barren_streak < 3) {
    StringSource source = order[which];
    which = (which + 1) % 3;
    bool produced = false;
    switch (source) {
      case StringSource::structural: {
        for (int attempt = 0; attempt < 8 && !produced; ++attempt) {
          Bytes out;
          StructuralWalker walker{opt, rng};
          if (!walker.walk(ast, out) || out.size() > opt.max_len) continue;
          if (!nfa_match(nfa, out)) continue;  // unmatchable branch chosen
          if (!sink.fresh(out) && attempt < 4) continue;
          sink.emit(std::move(out), StringSource::structural);
          produced = true;
        }
        break;
      }
      case StringSource::enumeration: {
        if (enum_next < enumerated.strings.size()) {
          check_emit(enumerated.strings[enum_next++], StringSource::enumeration);
          produced = true;
        }
        break;
      }
      case StringSource::accepting_walk: {
        for (int attempt = 0; attempt < 8 && !produced; ++attempt) {
          std::size_t len = lengths[rng.below(lengths.size())];
          Bytes out = accepting_walk(dfa, exact, len, rng);
          if (!sink.fresh(out) && attempt < 4) continue;
          check_emit(std::move(out), StringSource::accepting_walk);
          produced = true;
        }
        break;
      }
      default:
        break;
    }
    barren_streak = produced ? 0 : barren_streak + 1;
  }
  return batch;
}

StringBatch generate_invalid_strings(const Nfa& nfa, const Dfa& dfa,
                                     const std::vector<GeneratedString>& valid_pool,
                                     const StrGenOptions& opt) {
  StringBatch batch;
  Dfa comp = complement(dfa);
  auto comp_exact = exact_accept_table(comp, opt.max_len);
  std::vector<std::size_t> comp_lengths = feasible_lengths(comp_exact, comp.start);
  if (comp_lengths.empty()) {
    batch.universal_language = true;
    return batch;
  }

  Rng rng(opt.seed);
  BatchSink sink(batch, opt.count);
  auto check_emit = [&](Bytes b, StringSource source) {
    if (nfa_match(nfa, b))
      throw Error("invalid-string generator produced an accepted string (source " +
                  std::string(string_source_name(source)) + ")");
    sink.emit(std::move(b), source);
  };

  const StringSource order[] = {StringSource::mutation, StringSource::dfa_walk,
                                StringSource::complement_walk};
  std::size_t which = 0;
  std::size_t barren_streak = 0;
  while (!sink.full() && barren_streak < 3) {
    StringSource source = order[which];
    which = (which + 1) % 3;
    bool produced = false;
    switch (source) {
      case StringSource::mutation: {
        if (valid_pool.empty()) break;
        for (int attempt = 0; attempt < 8 && !produced; ++attempt) {
          Bytes out = valid_pool[rng.below(valid_pool.size())].bytes;
          std::size_t edits = 1 + rng.below(3);
          for (std::size_t e = 0; e < edits; ++e) {
            double op = rng.unit();
            if (op < 0.5 && !out.empty()) {
              out[rng.below(out.size())] =
                  dfa.alphabet.byte_at(rng.below(dfa.alphabet.size()));
            } else if (op < 0.75 && out.size() < opt.max_len) {
              out.insert(out.begin() + static_cast<std::ptrdiff_t>(
                                           rng.below(out.size() + 1)),
                         dfa.alphabet.byte_at(rng.below(dfa.alphabet.size())));
            } else if (!out.empty()) {
              out.erase(out.begin() + static_cast<std::ptrdiff_t>(rng.below(out.size())));
            }
          }
          if (nfa_match(nfa, out)) continue;  // mutation landed back in the language
          if (!sink.fresh(out) && attempt < 4) continue;
          sink.emit(std::move(out), StringSource::mutation);
          produced = true;
        }
        break;
      }
      case StringSource::dfa_walk: {
        for (int attempt = 0; attempt < 8 && !produced; ++attempt) {
          std::size_t len = rng.below(opt.max_len + 1);
          Bytes out;
          for (std::size_t i = 0; i < len; ++i)
            out.push_back(dfa.alphabet.byte_at(rng.below(dfa.alphabet.size())));
          if (dfa.matches(out)) continue;
          if (!sink.fresh(out) && attempt < 4) continue;
          check_emit(std::move(out), StringSource::dfa_walk);
          produced = true;
        }
        break;
      }
      case StringSource::complement_walk: {
        for (int attempt = 0; attempt < 8 && !produced; ++attempt) {
          std::size_t len = comp_lengths[rng.below(comp_lengths.size())];
          Bytes out = accepting_walk(comp, comp_exact, len, rng);
          if (!sink.fresh(out) && attempt < 4) continue;
          check_emit(std::move(out), StringSource::complement_walk);
          produced = true;
        }
        break;
      }
      default:
        break;
    }
    barren_streak = produced ? 0 : barren_streak + 1;
  }
  return batch;
}

std::vector<std::string> load_seed_corpus(const std::string& path, const Alphabet& alphabet,
                                          std::vector<std::string>* skipped) {
  std::string text = read_file(path);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      parse_regex(line, alphabet);
      out.push_back(line);
    } catch (const ParseError&) {
      if (skipped) skipped->push_back(line);
    }
  }
  return out;
}

}  // namespace circfuzz
