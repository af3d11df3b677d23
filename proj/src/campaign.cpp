#include "circfuzz/campaign.hpp"

#include <omp.h>
#include <signal.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "circfuzz/circuit_json.hpp"
#include "circfuzz/errors.hpp"
#include "circfuzz/grammar.hpp"
#include "circfuzz/mutator.hpp"
#include "circfuzz/reference.hpp"
#include "circfuzz/rng.hpp"
#include "circfuzz/strgen.hpp"
#include "circfuzz/util.hpp"

namespace circfuzz {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::uint8_t config_byte(const ordered_json& v, const char* which) {
  if (v.is_number_integer() || v.is_number_unsigned()) {
    long long n = v.get<long long>();
    if (n < 0 || n > 255)
      throw ConfigError(std::string("alphabet ") + which + " is out of byte range");
    return static_cast<std::uint8_t>(n);
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.size() == 1) return static_cast<std::uint8_t>(s[0]);
  }
  throw ConfigError(std::string("alphabet ") + which +
                    " must be an integer or a one-character string");
}

}  // namespace

CampaignConfig load_campaign_config(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path + " must be a JSON object");
  CampaignConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "mode") {
        c.mode = value.get<std::string>();
        if (c.mode != "regex" && c.mode != "witness")
          throw ConfigError("mode must be \"regex\" or \"witness\"");
      } else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "workers") c.workers = value.get<int>();
      else if (key == "iterations") c.iterations = value.get<std::uint64_t>();
      else if (key == "wall_seconds") c.wall_seconds = value.get<double>();
      else if (key == "grammar") c.grammar_path = value.get<std::string>();
      else if (key == "corpus") c.corpus_path = value.get<std::string>();
      else if (key == "alphabet") {
        if (!value.is_array() || value.size() != 2)
          throw ConfigError("alphabet must be a [lo, hi] pair");
        c.alphabet_lo = config_byte(value[0], "lo");
        c.alphabet_hi = config_byte(value[1], "hi");
      } else if (key == "max_len") c.max_len = value.get<std::size_t>();
      else if (key == "valid_per_regex") c.valid_per_regex = value.get<std::size_t>();
      else if (key == "invalid_per_regex") c.invalid_per_regex = value.get<std::size_t>();
      else if (key == "injection") {
        if (value.is_null()) continue;
        BugInjection inj;
        const std::string kind = value.at("kind").get<std::string>();
        auto parsed = injection_kind_from_name(kind);
        if (!parsed) throw ConfigError("unknown injection kind \"" + kind + "\"");
        inj.kind = *parsed;
        inj.site = value.value("site_index", std::uint64_t{0});
        c.injection = inj;
      } else if (key == "reference") c.reference = value.get<std::string>();
      else if (key == "dfa_state_cap") c.dfa_state_cap = value.get<std::size_t>();
      else if (key == "fixture") c.fixture = value.get<std::string>();
      else if (key == "fixture_params") {
        c.fixture_a = value.value("a", c.fixture_a);
        c.fixture_b = value.value("b", c.fixture_b);
      } else if (key == "circuit") c.circuit_path = value.get<std::string>();
      else if (key == "inputs") c.inputs_path = value.get<std::string>();
      else if (key == "generate_inputs") c.generate_inputs = value.get<std::uint64_t>();
      else if (key == "modulus") c.modulus_dec = value.get<std::string>();
      else if (key == "outdir") c.outdir = value.get<std::string>();
      else if (key == "probe_budget") c.probe_budget = value.get<std::size_t>();
      else if (key == "flush_seconds") c.flush_seconds = value.get<int>();
      else if (key == "stop_on_report") c.stop_on_report = value.get<bool>();
      else throw ConfigError("unknown config key \"" + key + "\" in " + path);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key \"" + key + "\": " + e.what());
    }
  }
  return c;
}

void apply_env_seed(CampaignConfig& config) {
  const char* env = std::getenv("CIRCFUZZ_SEED");
  if (!env || !*env) return;
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0')
    throw ConfigError("CIRCFUZZ_SEED must be a decimal integer");
  config.seed = v;
}

namespace {

void validate_common(const CampaignConfig& c) {
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (c.iterations == 0 && c.wall_seconds <= 0)
    throw ConfigError("campaign needs an iteration or wall-clock budget");
  if (c.alphabet_lo > c.alphabet_hi) throw ConfigError("alphabet range is inverted");
  if (c.flush_seconds < 1) throw ConfigError("flush_seconds must be >= 1");
  FieldModulus::create(c.modulus_dec);  // rejects unusable moduli
}

}  // namespace

void validate_regex_config(const CampaignConfig& c) {
  validate_common(c);
  if (c.grammar_path.empty() && c.corpus_path.empty())
    throw ConfigError("regex campaign needs a grammar and/or a corpus");
  if (!c.grammar_path.empty() && !fs::exists(c.grammar_path))
    throw ConfigError("grammar file does not exist: " + c.grammar_path);
  if (!c.corpus_path.empty() && !fs::exists(c.corpus_path))
    throw ConfigError("corpus file does not exist: " + c.corpus_path);
  if (c.valid_per_regex + c.invalid_per_regex == 0)
    throw ConfigError("strings-per-regex must be positive");
}

void validate_witness_config(const CampaignConfig& c) {
  validate_common(c);
  if (c.fixture.empty() == c.circuit_path.empty())
    throw ConfigError("witness campaign needs exactly one of fixture or circuit");
  if (!c.fixture.empty() && !fixture_kind_from_name(c.fixture))
    throw ConfigError("unknown fixture \"" + c.fixture + "\"");
  if (!c.circuit_path.empty() && !fs::exists(c.circuit_path))
    throw ConfigError("circuit file does not exist: " + c.circuit_path);
  if (c.inputs_path.empty() && c.generate_inputs == 0)
    throw ConfigError("witness campaign needs an inputs file or generate_inputs > 0");
  if (!c.inputs_path.empty() && !fs::exists(c.inputs_path))
    throw ConfigError("inputs file does not exist: " + c.inputs_path);
}

// ---------------------------------------------------------------- coverage

void CoverageMap::merge(const CoverageMap& other) {
  for (const auto& [hash, cov] : other.circuits) {
    auto it = circuits.find(hash);
    if (it == circuits.end()) circuits.emplace(hash, cov);
    else it->second.merge(cov);
  }
  for (const auto& [pattern, hits] : other.dfa_hits) {
    auto it = dfa_hits.find(pattern);
    if (it == dfa_hits.end()) {
      dfa_hits.emplace(pattern, hits);
    } else {
      if (it->second.size() != hits.size())
        throw CircuitError("coverage merge: transition table shape mismatch for \"" + pattern +
                           "\"");
      for (std::size_t i = 0; i < hits.size(); ++i) it->second[i] += hits[i];
    }
  }
}

bool CoverageMap::operator==(const CoverageMap& other) const {
  return circuits == other.circuits && dfa_hits == other.dfa_hits;
}

std::size_t CoverageMap::covered() const {
  std::size_t n = 0;
  for (const auto& [hash, cov] : circuits) n += cov.covered();
  return n;
}

std::size_t CoverageMap::total() const {
  std::size_t n = 0;
  for (const auto& [hash, cov] : circuits) n += cov.total();
  return n;
}

std::uint64_t CoverageMap::transitions_hit() const {
  std::uint64_t n = 0;
  for (const auto& [pattern, hits] : dfa_hits)
    for (std::uint64_t h : hits)
      if (h > 0) ++n;
  return n;
}

std::size_t CoverageMap::newly_covered_by(const CoverageMap& other) const {
  std::size_t n = 0;
  for (const auto& [hash, cov] : other.circuits) {
    auto it = circuits.find(hash);
    for (std::size_t i = 0; i < cov.flags.size(); ++i) {
      std::uint8_t extra = cov.flags[i];
      if (it != circuits.end() && i < it->second.flags.size()) extra &= ~it->second.flags[i];
      n += (extra & ConstraintCoverage::kSeenZero ? 1 : 0) +
           (extra & ConstraintCoverage::kSeenNonzero ? 1 : 0);
    }
  }
  for (const auto& [pattern, hits] : other.dfa_hits) {
    auto it = dfa_hits.find(pattern);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (hits[i] == 0) continue;
      if (it == dfa_hits.end() || i >= it->second.size() || it->second[i] == 0) ++n;
    }
  }
  return n;
}

// ------------------------------------------------------------ interruption

namespace {

std::atomic<bool> g_interrupted{false};

void note_interrupt(int) { g_interrupted.store(true); }

struct SignalGuard {
  struct sigaction old_int {}, old_term {};
  SignalGuard() {
    g_interrupted.store(false);
    struct sigaction sa {};
    sa.sa_handler = note_interrupt;
    sigemptyset(&sa.sa_mask);
    sigaction(SIGINT, &sa, &old_int);
    sigaction(SIGTERM, &sa, &old_term);
  }
  ~SignalGuard() {
    sigaction(SIGINT, &old_int, nullptr);
    sigaction(SIGTERM, &old_term, nullptr);
  }
};

// ----------------------------------------------------------- regex circuits

struct CacheEntry {
  Circuit circuit;
  std::string hash;
  std::string injection, injection_site, injection_signal, injection_expected;
  std::uint64_t injection_site_index = 0;
};

// (pattern, length) -> compiled circuit, shared across workers.  Entries are
// immutable once published; eviction wipes the table, which only costs a
// recompile.
class CircuitCache {
 public:
  CircuitCache(const CampaignConfig& cfg, ModulusPtr mod)
      : cfg_(cfg), mod_(std::move(mod)) {}

  std::shared_ptr<const CacheEntry> get(const std::string& pattern, const Dfa& dfa,
                                        std::size_t length, std::uint64_t* compiled) {
    auto key = std::make_pair(pattern, length);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    auto entry = std::make_shared<CacheEntry>();
    TranspileSpec spec;
    spec.dfa = dfa;
    spec.input_length = length;
    spec.max_length = std::max<std::size_t>(cfg_.max_len, 64);
    spec.max_states = cfg_.dfa_state_cap;
    std::map<std::string, std::string> meta{{"regex", pattern}};
    if (cfg_.injection) {
      InjectionResult injected = inject_bug(spec, *cfg_.injection, mod_, std::move(meta));
      entry->circuit = std::move(injected.circuit);
      entry->injection = injection_kind_name(cfg_.injection->kind);
      entry->injection_site_index = cfg_.injection->site;
      entry->injection_site = injected.site;
      entry->injection_signal = injected.signal;
      entry->injection_expected = category_name(injected.expected);
    } else {
      entry->circuit = transpile(spec, mod_, std::move(meta));
    }
    entry->hash = circuit_hash(entry->circuit);
    ++*compiled;
    std::lock_guard<std::mutex> lock(mu_);
    if (map_.size() >= 512) map_.clear();
    auto [it, inserted] = map_.emplace(std::move(key), std::move(entry));
    return it->second;
  }

 private:
  const CampaignConfig& cfg_;
  ModulusPtr mod_;
  std::mutex mu_;
  std::map<std::pair<std::string, std::size_t>, std::shared_ptr<const CacheEntry>> map_;
};

struct IterPlan {
  std::uint64_t index = 0;
  std::string pattern;
};

struct IterResult {
  std::uint64_t index = 0;
  std::string pattern;
  std::vector<BugReport> reports;
  CoverageMap coverage;
  std::uint64_t compiled = 0, witnesses = 0, proofs = 0, probes = 0;
  std::uint64_t skipped = 0, errors = 0;
};

IterResult run_iteration(const CampaignConfig& cfg, const ModulusPtr& mod,
                         const Alphabet& alphabet, const IterPlan& plan, CircuitCache& cache,
                         ReferenceMatcher& ref) {
  IterResult out;
  out.index = plan.index;
  out.pattern = plan.pattern;
  try {
    Rng base = Rng(cfg.seed).split(plan.index);
    base.next();  // pattern draw, consumed at planning time
    const std::uint64_t valid_seed = base.next();
    const std::uint64_t invalid_seed = base.next();
    const std::uint64_t probe_base = base.next();

    RegexAst ast = parse_regex(plan.pattern, alphabet);
    Nfa nfa = build_nfa(ast, alphabet);
    Dfa dfa = determinize(nfa, cfg.dfa_state_cap);

    StrGenOptions vopt;
    vopt.count = cfg.valid_per_regex;
    vopt.max_len = cfg.max_len;
    vopt.seed = valid_seed;
    StringBatch valid = generate_valid_strings(ast, nfa, dfa, vopt);
    StrGenOptions iopt = vopt;
    iopt.count = cfg.invalid_per_regex;
    iopt.seed = invalid_seed;
    StringBatch invalid = generate_invalid_strings(nfa, dfa, valid.strings, iopt);

    std::vector<std::uint64_t>& hits = out.coverage.dfa_hits[plan.pattern];
    hits.assign(static_cast<std::size_t>(dfa.n_states) * alphabet.size(), 0);

    std::vector<std::pair<Bytes, InputLabel>> work;
    for (const GeneratedString& g : valid.strings)
      work.emplace_back(g.bytes, InputLabel::expected_valid);
    for (const GeneratedString& g : invalid.strings)
      work.emplace_back(g.bytes, InputLabel::expected_invalid);

    std::set<std::pair<std::string, int>> probed;

    for (std::size_t si = 0; si < work.size(); ++si) {
      const Bytes& bytes = work[si].first;
      const InputLabel label = work[si].second;

      std::uint32_t cur = dfa.start;
      for (std::uint8_t b : bytes) {
        std::size_t cell = static_cast<std::size_t>(cur) * alphabet.size() + alphabet.index_of(b);
        ++hits[cell];
        cur = dfa.transitions[cell];
      }

      std::shared_ptr<const CacheEntry> entry;
      try {
        entry = cache.get(plan.pattern, dfa, bytes.size(), &out.compiled);
      } catch (const Error&) {
        ++out.skipped;
        ++out.errors;
        continue;
      }

      Observation obs;
      obs.circuit_hash = entry->hash;
      obs.regex = plan.pattern;
      obs.input_bytes = bytes;
      obs.label = label;
      obs.seed = cfg.seed;
      obs.iteration = plan.index;
      obs.injection = entry->injection;
      obs.injection_site_index = entry->injection_site_index;
      obs.injection_site = entry->injection_site;
      obs.injection_signal = entry->injection_signal;
      obs.injection_expected = entry->injection_expected;
      obs.alphabet_lo = cfg.alphabet_lo;
      obs.alphabet_hi = cfg.alphabet_hi;
      obs.modulus_dec = cfg.modulus_dec;

      InputMap inputs;
      for (std::size_t i = 0; i < bytes.size(); ++i)
        inputs["char[" + std::to_string(i) + "]"] = FieldElement::from_u64(bytes[i], mod);

      Witness w;
      bool wit_ok = true;
      try {
        w = generate_witness(entry->circuit, inputs);
        ++out.witnesses;
      } catch (const Error& e) {
        wit_ok = false;
        obs.witgen_ok = false;
        obs.witgen_error = e.what();
      }

      if (wit_ok) {
        auto [cit, fresh] = out.coverage.circuits.try_emplace(
            entry->hash, ConstraintCoverage(entry->circuit.constraints.size()));
        MockResult proof = mock_prove(entry->circuit, w, &cit->second);
        ++out.proofs;
        obs.satisfied = proof.satisfied;
        obs.violations = std::move(proof.violations);
        obs.outputs = read_outputs(entry->circuit, w);
      }

      try {
        obs.reference_verdict = ref.matches(plan.pattern, bytes);
      } catch (const Error&) {
        ++out.errors;  // run on without a referee for this string
      }

      if (wit_ok && obs.satisfied && *obs.satisfied && cfg.probe_budget > 0 &&
          probed.emplace(entry->hash, static_cast<int>(label)).second) {
        ProbeBudget pb;
        pb.iterations = cfg.probe_budget;
        pb.seed = Rng(probe_base).split(si).next();
        try {
          obs.findings = soundness_probe(entry->circuit, inputs, pb);
          ++out.probes;
        } catch (const Error&) {
          ++out.errors;
        }
      }

      if (auto report = classify(obs)) out.reports.push_back(std::move(*report));
    }
  } catch (const Error&) {
    ++out.errors;
  }
  return out;
}

CampaignResult snapshot_result(const std::vector<BugReport>& raw, CampaignStats stats,
                               const CoverageMap& coverage,
                               std::chrono::steady_clock::time_point t0) {
  CampaignResult result;
  result.reports = dedupe(raw);
  for (const BugReport& r : result.reports) ++stats.reports_by_category[category_name(r.category)];
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.stats = std::move(stats);
  result.coverage = coverage;
  return result;
}

}  // namespace

// ---------------------------------------------------------------- campaigns

CampaignResult run_regex_campaign(const CampaignConfig& cfg) {
  validate_regex_config(cfg);
  SignalGuard guard;
  const auto t0 = std::chrono::steady_clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(cfg.wall_seconds));
  ModulusPtr mod = FieldModulus::create(cfg.modulus_dec);
  const Alphabet alphabet = cfg.alphabet();

  std::optional<Grammar> grammar;
  if (!cfg.grammar_path.empty()) grammar = parse_bnf(read_file(cfg.grammar_path));
  std::vector<std::string> corpus;
  if (!cfg.corpus_path.empty()) corpus = load_seed_corpus(cfg.corpus_path, alphabet);
  if (!grammar && corpus.empty())
    throw ConfigError("corpus has no usable patterns and no grammar was given");

  CircuitCache cache(cfg, mod);
  std::vector<std::unique_ptr<ReferenceMatcher>> matchers;
  for (int wkr = 0; wkr < cfg.workers; ++wkr)
    matchers.push_back(make_reference(cfg.reference, alphabet));

  std::vector<BugReport> raw;
  CampaignStats stats;
  CoverageMap coverage;
  std::deque<std::string> requeue;
  auto last_flush = t0;

  constexpr std::uint64_t kBatch = 16;
  std::uint64_t next_iter = 0;
  while (true) {
    if (cfg.iterations > 0 && next_iter >= cfg.iterations) break;
    if (cfg.wall_seconds > 0 && std::chrono::steady_clock::now() >= deadline) break;
    if (g_interrupted.load()) break;

    std::uint64_t batch = kBatch;
    if (cfg.iterations > 0) batch = std::min(batch, cfg.iterations - next_iter);

    std::vector<IterPlan> plans;
    plans.reserve(batch);
    for (std::uint64_t k = 0; k < batch; ++k) {
      const std::uint64_t i = next_iter + k;
      Rng base = Rng(cfg.seed).split(i);
      const std::uint64_t grammar_seed = base.next();
      IterPlan plan;
      plan.index = i;
      if (i < corpus.size()) {
        plan.pattern = corpus[i];
      } else if (!requeue.empty() && i % 4 == 3) {
        plan.pattern = requeue.front();
        requeue.pop_front();
      } else if (grammar) {
        GenBudget gb;
        gb.max_regex_len = 48;
        gb.rng_seed = grammar_seed;
        try {
          plan.pattern = generate_regex(*grammar, gb);
        } catch (const Error&) {
          plan.pattern.clear();
        }
      } else {
        plan.pattern = corpus[i % corpus.size()];
      }
      plans.push_back(std::move(plan));
    }

    std::vector<IterResult> results(plans.size());
#pragma omp parallel for num_threads(cfg.workers) schedule(dynamic, 1)
    for (long k = 0; k < static_cast<long>(plans.size()); ++k) {
      const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num()) % matchers.size();
      results[static_cast<std::size_t>(k)] =
          run_iteration(cfg, mod, alphabet, plans[static_cast<std::size_t>(k)], cache,
                        *matchers[tid]);
    }

    for (IterResult& r : results) {
      ++stats.iterations;
      stats.circuits_compiled += r.compiled;
      stats.witnesses_generated += r.witnesses;
      stats.mock_proofs += r.proofs;
      stats.probes_run += r.probes;
      stats.strings_skipped += r.skipped;
      stats.errors += r.errors;
      const std::size_t fresh = coverage.newly_covered_by(r.coverage);
      coverage.merge(r.coverage);
      if (fresh > 0 && !r.pattern.empty()) {
        // Feedback: a pattern that lit up new coverage earns extra string
        // batches, weighted by how much it found.
        std::size_t copies = std::min<std::size_t>(1 + fresh, 4);
        while (copies-- > 0 && requeue.size() < 64) requeue.push_back(r.pattern);
      }
      for (BugReport& b : r.reports) raw.push_back(std::move(b));
    }
    next_iter += batch;
    if (cfg.stop_on_report && !raw.empty()) break;

    const auto now = std::chrono::steady_clock::now();
    if (!cfg.outdir.empty() && now - last_flush >= std::chrono::seconds(cfg.flush_seconds)) {
      emit_report_bundle(cfg, snapshot_result(raw, stats, coverage, t0), cfg.outdir);
      last_flush = now;
    }
  }

  CampaignResult result = snapshot_result(raw, stats, coverage, t0);
  if (!cfg.outdir.empty()) emit_report_bundle(cfg, result, cfg.outdir);
  return result;
}

namespace {

FieldElement random_field_element(Rng& rng, const ModulusPtr& mod) {
  mpz_class hi(std::to_string(rng.next()));
  mpz_class lo(std::to_string(rng.next()));
  return FieldElement(hi * mpz_class("18446744073709551616") + lo, mod);
}

std::vector<InputMap> load_inputs_file(const std::string& path, const Circuit& circuit) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("inputs " + path + ": " + e.what());
  }
  std::vector<ordered_json> entries;
  if (j.is_object()) entries.push_back(j);
  else if (j.is_array())
    for (const auto& e : j) entries.push_back(e);
  else throw ConfigError("inputs file must be an object or an array of objects");

  std::vector<InputMap> out;
  for (const ordered_json& e : entries) {
    if (!e.is_object()) throw ConfigError("each inputs entry must be an object");
    InputMap m;
    for (const auto& [name, value] : e.items()) {
      std::string dec = value.is_string() ? value.get<std::string>() : value.dump();
      if (!circuit.find_signal(name))
        throw ConfigError("inputs name \"" + name + "\" is not a circuit signal");
      m[name] = FieldElement::from_decimal(dec, circuit.modulus);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

CampaignResult run_witness_campaign(const CampaignConfig& cfg, const Circuit& circuit) {
  validate_common(cfg);
  if (cfg.inputs_path.empty() && cfg.generate_inputs == 0)
    throw ConfigError("witness campaign needs an inputs file or generate_inputs > 0");
  SignalGuard guard;
  const auto t0 = std::chrono::steady_clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(cfg.wall_seconds));
  const ModulusPtr& mod = circuit.modulus;
  const std::string hash = circuit_hash(circuit);

  std::string fixture_name;
  if (auto it = circuit.metadata.find("fixture"); it != circuit.metadata.end())
    fixture_name = it->second;
  const auto fixture_kind = fixture_kind_from_name(fixture_name);
  std::string param_a, param_b;
  if (auto it = circuit.metadata.find("param_a"); it != circuit.metadata.end())
    param_a = it->second;
  if (auto it = circuit.metadata.find("param_b"); it != circuit.metadata.end())
    param_b = it->second;

  std::string injection, injection_site, injection_signal, injection_expected;
  std::uint64_t injection_site_index = 0;
  if (auto it = circuit.metadata.find("injection"); it != circuit.metadata.end()) {
    injection = it->second;
    if (auto s = circuit.metadata.find("injection_site"); s != circuit.metadata.end())
      injection_site = s->second;
    if (auto s = circuit.metadata.find("injection_signal"); s != circuit.metadata.end())
      injection_signal = s->second;
    if (auto s = circuit.metadata.find("injection_expected"); s != circuit.metadata.end())
      injection_expected = s->second;
    if (cfg.injection) injection_site_index = cfg.injection->site;
  }

  std::vector<InputMap> assignments;
  if (!cfg.inputs_path.empty()) {
    assignments = load_inputs_file(cfg.inputs_path, circuit);
  } else {
    const std::vector<SignalId> input_ids = circuit.inputs();
    for (std::uint64_t k = 0; k < cfg.generate_inputs; ++k) {
      Rng rng = Rng(cfg.seed).split(k);
      InputMap m;
      for (SignalId s : input_ids) m[circuit.signal_name(s)] = random_field_element(rng, mod);
      assignments.push_back(std::move(m));
    }
  }

  std::vector<BugReport> raw;
  CampaignStats stats;
  CoverageMap coverage;

  for (std::size_t k = 0; k < assignments.size(); ++k) {
    if (g_interrupted.load()) break;
    if (cfg.wall_seconds > 0 && std::chrono::steady_clock::now() >= deadline) break;
    if (cfg.iterations > 0 && k >= cfg.iterations) break;
    if (cfg.stop_on_report && !raw.empty()) break;
    ++stats.iterations;

    Observation obs;
    obs.circuit_hash = hash;
    obs.label = InputLabel::expected_valid;
    obs.seed = cfg.seed;
    obs.iteration = k;
    obs.fixture = fixture_name;
    obs.fixture_a = param_a;
    obs.fixture_b = param_b;
    obs.injection = injection;
    obs.injection_site_index = injection_site_index;
    obs.injection_site = injection_site;
    obs.injection_signal = injection_signal;
    obs.injection_expected = injection_expected;
    obs.inputs = assignments[k];
    obs.modulus_dec = mod->decimal();

    Witness w;
    bool wit_ok = true;
    try {
      w = generate_witness(circuit, assignments[k]);
      ++stats.witnesses_generated;
    } catch (const Error& e) {
      wit_ok = false;
      obs.witgen_ok = false;
      obs.witgen_error = e.what();
    }

    if (wit_ok) {
      auto [cit, fresh] = coverage.circuits.try_emplace(
          hash, ConstraintCoverage(circuit.constraints.size()));
      MockResult proof = mock_prove(circuit, w, &cit->second);
      ++stats.mock_proofs;
      obs.satisfied = proof.satisfied;
      obs.violations = std::move(proof.violations);
      obs.outputs = read_outputs(circuit, w);
      if (fixture_kind) {
        auto reference = fixture_reference_outputs(*fixture_kind, assignments[k], mod);
        if (reference) obs.reference_outputs = std::move(*reference);
      }
    }

    if (wit_ok && obs.satisfied && *obs.satisfied && cfg.probe_budget > 0) {
      ProbeBudget pb;
      pb.iterations = cfg.probe_budget;
      pb.seed = Rng(cfg.seed).split(k).split(1).next();
      try {
        obs.findings = soundness_probe(circuit, assignments[k], pb);
        ++stats.probes_run;
      } catch (const Error&) {
        ++stats.errors;
      }
    }

    if (auto report = classify(obs)) raw.push_back(std::move(*report));
  }

  CampaignResult result = snapshot_result(raw, stats, coverage, t0);
  if (!cfg.outdir.empty()) emit_report_bundle(cfg, result, cfg.outdir);
  return result;
}

// ------------------------------------------------------------------ bundle

void emit_report_bundle(const CampaignConfig& cfg, const CampaignResult& result,
                        const std::string& outdir) {
  try {
    fs::create_directories(outdir);
    fs::create_directories(fs::path(outdir) / "reproducers");
  } catch (const fs::filesystem_error& e) {
    throw IoError(std::string("cannot create output directory: ") + e.what());
  }
  const fs::path root(outdir);

  ordered_json reports = ordered_json::array();
  for (const BugReport& r : result.reports) reports.push_back(ordered_json::parse(report_to_json(r)));
  write_file((root / "reports.json").string(), reports.dump(2) + "\n");

  ordered_json s;
  s["seed"] = cfg.seed;
  s["workers"] = cfg.workers;
  s["rng"] = kRngAlgorithm;
  s["iterations"] = result.stats.iterations;
  s["circuits_compiled"] = result.stats.circuits_compiled;
  s["witnesses_generated"] = result.stats.witnesses_generated;
  s["mock_proofs"] = result.stats.mock_proofs;
  s["probes_run"] = result.stats.probes_run;
  s["strings_skipped"] = result.stats.strings_skipped;
  s["errors"] = result.stats.errors;
  ordered_json by_cat = ordered_json::object();
  for (const auto& [cat, n] : result.stats.reports_by_category) by_cat[cat] = n;
  s["reports"] = ordered_json{{"total", result.reports.size()}, {"by_category", by_cat}};
  const std::size_t covered = result.coverage.covered();
  const std::size_t total = result.coverage.total();
  s["coverage"] = ordered_json{
      {"constraint_slots_covered", covered},
      {"constraint_slots_total", total},
      {"fraction", total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total)},
      {"dfa_transitions_hit", result.coverage.transitions_hit()}};
  s["wall_seconds"] = result.stats.wall_seconds;
  write_file((root / "stats.json").string(), s.dump(2) + "\n");

  ordered_json cov;
  ordered_json circuits = ordered_json::object();
  for (const auto& [hash, c] : result.coverage.circuits) {
    ordered_json entry;
    entry["n_constraints"] = c.n_constraints;
    entry["flags"] = c.flags;
    circuits[hash] = entry;
  }
  cov["circuits"] = circuits;
  ordered_json dfa = ordered_json::object();
  for (const auto& [pattern, hits] : result.coverage.dfa_hits) dfa[pattern] = hits;
  cov["dfa"] = dfa;
  write_file((root / "coverage.json").string(), cov.dump(2) + "\n");

  std::size_t idx = 0;
  for (const BugReport& r : result.reports) {
    std::ostringstream name;
    name << std::setw(3) << std::setfill('0') << idx++ << "-" << r.id << ".json";
    write_file((root / "reproducers" / name.str()).string(), report_to_json(r) + "\n");
  }

  std::ostringstream md;
  md << "# campaign summary\n\n";
  md << "- iterations: " << result.stats.iterations << "\n";
  md << "- witnesses: " << result.stats.witnesses_generated << ", mock proofs: "
     << result.stats.mock_proofs << ", probes: " << result.stats.probes_run << "\n";
  md << "- errors: " << result.stats.errors << ", strings skipped: "
     << result.stats.strings_skipped << "\n";
  md << "- constraint coverage: " << covered << "/" << total << "\n";
  md << "- reports: " << result.reports.size() << "\n";
  if (!result.reports.empty()) {
    md << "\n| id | category | oracle | site | source |\n";
    md << "|----|----------|--------|------|--------|\n";
    for (const BugReport& r : result.reports) {
      std::string source = r.regex ? ("`" + *r.regex + "`") : r.fixture;
      md << "| " << r.id << " | " << category_name(r.category) << " | "
         << oracle_kind_name(r.oracle) << " | `" << r.site << "` | " << source << " |\n";
    }
  }
  write_file((root / "index.md").string(), md.str());
}

}  // namespace circfuzz
