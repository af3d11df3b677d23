// End-to-end acceptance runs for the whole workbench.  One line per
// criterion; the exit code is the number of criteria that failed.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "circfuzz/campaign.hpp"
#include "circfuzz/errors.hpp"
#include "circfuzz/fixtures.hpp"
#include "circfuzz/grammar.hpp"
#include "circfuzz/mutator.hpp"
#include "circfuzz/regex.hpp"
#include "circfuzz/rng.hpp"
#include "circfuzz/util.hpp"
#include "testutil.hpp"

namespace circfuzz {
namespace {

namespace fs = std::filesystem;
using testutil::TempDir;

const char* kGrammarPath = CIRCFUZZ_SOURCE_DIR "/grammar/regex-fragment.bnf";
const char* kCorpusPath = CIRCFUZZ_SOURCE_DIR "/corpus/regex-seeds.txt";

struct Outcome {
  bool pass = true;
  std::string note;

  void fail(const std::string& why) {
    pass = false;
    if (!note.empty()) note += "; ";
    note += why;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

InputMap zero_inputs(const Circuit& c) {
  InputMap m;
  for (SignalId s : c.inputs()) m[c.signal_name(s)] = FieldElement::from_u64(0, c.modulus);
  return m;
}

bool has_category(const CampaignResult& r, BugCategory cat) {
  for (const BugReport& rep : r.reports)
    if (rep.category == cat) return true;
  return false;
}

// ---------------------------------------------------------------- criterion 1

CampaignConfig fixture_config(const std::string& name, std::uint64_t inputs,
                              std::size_t probe) {
  CampaignConfig cfg;
  cfg.mode = "witness";
  cfg.seed = 1;
  cfg.iterations = inputs;
  cfg.fixture = name;
  cfg.generate_inputs = inputs;
  cfg.probe_budget = probe;
  return cfg;
}

Outcome criterion1() {
  Outcome out;
  ModulusPtr m = FieldModulus::create(kBn254ScalarDec);

  // Safe multiplier: 10,000 honest runs and 10,000 probe iterations, all quiet.
  {
    auto t0 = std::chrono::steady_clock::now();
    CampaignConfig cfg = fixture_config("multiplier_safe", 10000, 0);
    Circuit c = make_fixture(FixtureKind::multiplier_safe, m);
    CampaignResult r = run_witness_campaign(cfg, c);
    if (!r.reports.empty())
      out.fail("multiplier_safe: " + std::to_string(r.reports.size()) + " reports");
    if (r.stats.witnesses_generated != 10000)
      out.fail("multiplier_safe: only " + std::to_string(r.stats.witnesses_generated) +
               " honest runs");
    InputMap in{{"a", FieldElement::from_u64(2, m)}, {"b", FieldElement::from_u64(5, m)}};
    auto findings = soundness_probe(c, in, ProbeBudget{10000, 1});
    if (!findings.empty())
      out.fail("multiplier_safe: probe found " + std::to_string(findings.size()) +
               " mutations");
    double dt = seconds_since(t0);
    if (dt >= 10) out.fail("multiplier_safe took " + std::to_string(dt) + "s");
  }

  // Unsound multiplier: the probe flags it within 1,000 iterations.
  {
    auto t0 = std::chrono::steady_clock::now();
    CampaignConfig cfg = fixture_config("multiplier_soundness", 1, 1000);
    Circuit c = make_fixture(FixtureKind::multiplier_soundness, m);
    CampaignResult r = run_witness_campaign(cfg, c);
    if (!has_category(r, BugCategory::soundness))
      out.fail("multiplier_soundness: no soundness report in 1000 probe iterations");
    double dt = seconds_since(t0);
    if (dt >= 10) out.fail("multiplier_soundness took " + std::to_string(dt) + "s");
  }

  // Wrong-computation variants: flagged within 100 random input pairs.
  for (auto [name, want] :
       {std::pair<const char*, BugCategory>{"multiplier_completeness",
                                            BugCategory::completeness},
        std::pair<const char*, BugCategory>{"multiplier_correctness",
                                            BugCategory::correctness}}) {
    auto t0 = std::chrono::steady_clock::now();
    CampaignConfig cfg = fixture_config(name, 100, 0);
    Circuit c = make_fixture(*fixture_kind_from_name(name), m);
    CampaignResult r = run_witness_campaign(cfg, c);
    if (!has_category(r, want))
      out.fail(std::string(name) + ": expected category missing in 100 pairs");
    double dt = seconds_since(t0);
    if (dt >= 10) out.fail(std::string(name) + " took " + std::to_string(dt) + "s");
  }
  return out;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion2() {
  Outcome out;
  ModulusPtr m = FieldModulus::create(kBn254ScalarDec);
  const std::pair<const char*, const char*> params[] = {{"5", "7"}, {"3", "4"}, {"6", "1"}};

  for (auto [a, b] : params) {
    auto t0 = std::chrono::steady_clock::now();
    Circuit c = make_fixture(FixtureKind::montgomery_add, m, {a, b});
    auto findings = soundness_probe(c, zero_inputs(c), ProbeBudget{10000, 1});

    bool divergent = false;
    for (const SoundnessFinding& f : findings) {
      bool x = false, y = false;
      for (const OutputDiff& d : f.diffs) {
        if (d.name == "out[0]" && !(d.honest == d.mutated)) x = true;
        if (d.name == "out[1]" && !(d.honest == d.mutated)) y = true;
      }
      if (x && y) divergent = true;
    }
    std::string tag = std::string("(A=") + a + ",B=" + b + ")";
    if (!divergent) out.fail(tag + ": no finding with divergent out[0]/out[1]");
    double dt = seconds_since(t0);
    if (dt >= 60) out.fail(tag + " took " + std::to_string(dt) + "s");
  }
  return out;
}

// ------------------------------------------------------------ criteria 3 and 7

CampaignConfig shipped_config() {
  CampaignConfig cfg;
  cfg.mode = "regex";
  cfg.seed = 1;
  cfg.workers = 1;
  cfg.grammar_path = kGrammarPath;
  cfg.corpus_path = kCorpusPath;
  cfg.max_len = 12;
  return cfg;  // alphabet 0x20..0x7E, BN254, builtin reference: the defaults
}

Outcome criterion3(CampaignResult& keep) {
  Outcome out;
  auto t0 = std::chrono::steady_clock::now();
  CampaignConfig cfg = shipped_config();
  cfg.iterations = 40;
  cfg.valid_per_regex = 16;
  cfg.invalid_per_regex = 16;

  keep = run_regex_campaign(cfg);
  const std::uint64_t pairs = keep.stats.witnesses_generated;
  if (pairs < 1000) out.fail("only " + std::to_string(pairs) + " (regex, string) pairs ran");
  if (!keep.reports.empty())
    out.fail(std::to_string(keep.reports.size()) + " reports on a clean transpiler");
  if (keep.stats.errors != 0)
    out.fail(std::to_string(keep.stats.errors) + " pipeline errors");
  double dt = seconds_since(t0);
  if (dt >= 300) out.fail("took " + std::to_string(dt) + "s");
  out.note = std::to_string(pairs) + " pairs, " + std::to_string(keep.reports.size()) +
             " reports, " + std::to_string(dt).substr(0, 4) + "s";
  return out;
}

ConstraintCoverage random_coverage(Rng& rng, std::size_t n) {
  ConstraintCoverage c(n);
  for (auto& f : c.flags) f = static_cast<std::uint8_t>(rng.below(4));
  return c;
}

CoverageMap random_map(Rng& rng) {
  CoverageMap m;
  const char* hashes[] = {"h1", "h2", "h3"};
  for (const char* h : hashes)
    if (rng.chance(0.7)) m.circuits[h] = random_coverage(rng, 4 + (h[1] - '0'));
  const char* patterns[] = {"p", "q"};
  for (const char* p : patterns)
    if (rng.chance(0.7)) {
      std::vector<std::uint64_t>& hits = m.dfa_hits[p];
      hits.resize(6);
      for (auto& h : hits) h = rng.below(3);
    }
  return m;
}

Outcome criterion7(const CampaignResult& full) {
  Outcome out;
  if (full.coverage.total() == 0) {
    out.fail("no coverage captured by the shipped-corpus run");
    return out;
  }

  // First ten pairs: the first pattern with five strings per direction.
  CampaignConfig cfg = shipped_config();
  cfg.iterations = 1;
  cfg.valid_per_regex = 5;
  cfg.invalid_per_regex = 5;
  CampaignResult small = run_regex_campaign(cfg);
  if (small.stats.witnesses_generated != 10)
    out.fail("warm-up slice ran " + std::to_string(small.stats.witnesses_generated) +
             " pairs, wanted 10");

  const double f_full = double(full.coverage.covered()) / double(full.coverage.total());
  const double f_small = small.coverage.total() == 0
                             ? 0.0
                             : double(small.coverage.covered()) / double(small.coverage.total());
  if (!(f_full > f_small)) {
    std::ostringstream s;
    s << "coverage fraction did not grow: " << f_full << " vs " << f_small;
    out.fail(s.str());
  }

  // Merge laws on randomized maps: identity, commutativity, monotonicity.
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    Rng rng = Rng(900).split(trial);
    CoverageMap a = random_map(rng);
    CoverageMap b = random_map(rng);

    CoverageMap id = a;
    id.merge(CoverageMap{});
    if (!(id == a)) {
      out.fail("identity law failed at trial " + std::to_string(trial));
      break;
    }

    CoverageMap ab = a;
    ab.merge(b);
    CoverageMap ba = b;
    ba.merge(a);
    if (!(ab == ba)) {
      out.fail("commutativity law failed at trial " + std::to_string(trial));
      break;
    }

    if (ab.covered() < a.covered() || ab.covered() < b.covered() ||
        ab.transitions_hit() < a.transitions_hit()) {
      out.fail("monotonicity law failed at trial " + std::to_string(trial));
      break;
    }
  }

  std::ostringstream s;
  s.precision(4);
  s << f_full << " (1000+ pairs) vs " << f_small << " (10 pairs)";
  if (!out.note.empty()) s << "; " << out.note;
  out.note = s.str();
  return out;
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion4() {
  Outcome out;
  std::ostringstream table;

  for (InjectionKind kind : all_injection_kinds()) {
    int category_hits = 0;
    int site_hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      CampaignConfig cfg;
      cfg.mode = "regex";
      cfg.seed = seed;
      cfg.workers = 1;
      cfg.iterations = 40;
      cfg.wall_seconds = 300;
      cfg.grammar_path = kGrammarPath;
      cfg.alphabet_lo = 'a';
      cfg.alphabet_hi = 'e';
      cfg.max_len = 6;
      cfg.valid_per_regex = 4;
      cfg.invalid_per_regex = 4;
      cfg.modulus_dec = "65537";
      cfg.probe_budget = 250;
      cfg.stop_on_report = true;
      cfg.injection = BugInjection{kind, seed};

      CampaignResult r = run_regex_campaign(cfg);
      bool cat = false, site = false;
      for (const BugReport& rep : r.reports) {
        if (category_name(rep.category) == rep.injection_expected) cat = true;
        if (site_matches(rep.site, rep.injection_site) ||
            (!rep.injection_signal.empty() && rep.site == rep.injection_signal))
          site = true;
      }
      category_hits += cat;
      site_hits += site;
    }
    table << "\n    " << injection_kind_name(kind) << ": category " << category_hits
          << "/10, site " << site_hits << "/10";
    if (kind == InjectionKind::drop_booleanity && category_hits == 0)
      table << " (the booleanity row is redundant here: state signals stay pinned by "
               "their wiring equalities, so removing it admits no new witness)";
    if (category_hits < 9)
      out.fail(std::string(injection_kind_name(kind)) + " category score " +
               std::to_string(category_hits) + "/10");
    if (site_hits < 7)
      out.fail(std::string(injection_kind_name(kind)) + " site score " +
               std::to_string(site_hits) + "/10");
  }
  out.note += table.str();
  return out;
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion5() {
  Outcome out;
  auto t0 = std::chrono::steady_clock::now();
  const Alphabet ab{'a', 'd'};
  Grammar grammar = parse_bnf(read_file(kGrammarPath));

  Rng master(2026);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    GenBudget budget;
    budget.max_regex_len = 48;
    budget.rng_seed = master.next();
    const std::string pattern = generate_regex(grammar, budget);

    RegexAst ast = parse_regex(pattern, ab);
    Nfa nfa = build_nfa(ast, ab);
    Dfa dfa = determinize(nfa);
    Dfa comp = complement(dfa);

    // Every string of length 0..6 over the four symbols.
    Bytes s;
    auto walk = [&](auto&& self, std::size_t len) -> bool {
      if (s.size() == len) {
        const bool naive = testutil::naive_match(ast, s, ab);
        if (nfa_match(nfa, s) != naive) {
          out.fail("nfa disagrees with the naive matcher on /" + pattern + "/");
          return false;
        }
        if (dfa.matches(s) != naive) {
          out.fail("dfa disagrees with the naive matcher on /" + pattern + "/");
          return false;
        }
        if (comp.matches(s) == naive) {
          out.fail("complement violates the partition law on /" + pattern + "/");
          return false;
        }
        return true;
      }
      for (std::size_t k = 0; k < ab.size(); ++k) {
        s.push_back(ab.byte_at(k));
        bool ok = self(self, len);
        s.pop_back();
        if (!ok) return false;
      }
      return true;
    };
    bool ok = true;
    for (std::size_t len = 0; len <= 6 && ok; ++len) ok = walk(walk, len);
    if (!ok) return out;
    ++checked;
  }
  double dt = seconds_since(t0);
  if (dt >= 120) out.fail("took " + std::to_string(dt) + "s");
  out.note = std::to_string(checked) + " patterns, all strings to length 6, " +
             std::to_string(dt).substr(0, 4) + "s";
  return out;
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion6() {
  Outcome out;
  TempDir dir;

  CampaignConfig cfg;
  cfg.mode = "regex";
  cfg.seed = 3;
  cfg.workers = 1;
  cfg.iterations = 12;
  cfg.grammar_path = kGrammarPath;
  cfg.alphabet_lo = 'a';
  cfg.alphabet_hi = 'e';
  cfg.max_len = 6;
  cfg.valid_per_regex = 4;
  cfg.invalid_per_regex = 4;
  cfg.modulus_dec = "65537";
  cfg.injection = BugInjection{InjectionKind::class_off_by_one, 1};

  cfg.outdir = dir.file("one-a");
  CampaignResult first = run_regex_campaign(cfg);
  cfg.outdir = dir.file("one-b");
  run_regex_campaign(cfg);

  const std::string bytes_a = read_file(dir.file("one-a") + "/reports.json");
  const std::string bytes_b = read_file(dir.file("one-b") + "/reports.json");
  if (bytes_a != bytes_b) out.fail("workers=1 reruns differ byte for byte");
  if (first.reports.empty()) out.fail("determinism run produced no reports to compare");

  cfg.workers = 4;
  cfg.outdir.clear();
  CampaignResult parallel = run_regex_campaign(cfg);
  std::set<std::string> ids_one, ids_four;
  for (const BugReport& r : first.reports) ids_one.insert(r.id);
  for (const BugReport& r : parallel.reports) ids_four.insert(r.id);
  if (ids_one != ids_four) out.fail("workers=4 changed the deduped report set");

  out.note = std::to_string(first.reports.size()) + " reports, stable across reruns and workers";
  return out;
}

}  // namespace
}  // namespace circfuzz

int main() {
  using namespace circfuzz;

  int failures = 0;
  auto report = [&](int n, Outcome out) {
    if (out.pass) {
      std::printf("criterion %d: PASS%s%s\n", n, out.note.empty() ? "" : " - ",
                  out.note.c_str());
    } else {
      ++failures;
      std::printf("criterion %d: FAIL (%s)\n", n, out.note.c_str());
    }
    std::fflush(stdout);
  };

  try {
    report(1, criterion1());
    report(2, criterion2());
    CampaignResult shipped;
    report(3, criterion3(shipped));
    report(4, criterion4());
    report(5, criterion5());
    report(6, criterion6());
    report(7, criterion7(shipped));
  } catch (const Error& e) {
    std::printf("aborted: %s\n", e.what());
    return 99;
  }
  return failures;
}
