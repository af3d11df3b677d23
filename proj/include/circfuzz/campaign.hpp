#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circfuzz/eval.hpp"
#include "circfuzz/fixtures.hpp"
#include "circfuzz/oracle.hpp"
#include "circfuzz/regex.hpp"
#include "circfuzz/transpiler.hpp"

namespace circfuzz {

// BN254 scalar field order, the default campaign modulus.
inline constexpr const char* kBn254ScalarDec =
    "21888242871839275222246405745257275088548364400416034343698204186575808495617";

struct CampaignConfig {
  std::string mode = "regex";  // "regex" | "witness"
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t iterations = 32;  // 0 = unbounded (requires a wall budget)
  double wall_seconds = 0;        // 0 = unbounded (requires an iteration budget)

  // Regex pipeline.
  std::string grammar_path;
  std::string corpus_path;
  std::uint8_t alphabet_lo = 0x20, alphabet_hi = 0x7E;
  std::size_t max_len = 12;
  std::size_t valid_per_regex = 16;
  std::size_t invalid_per_regex = 16;
  std::optional<BugInjection> injection;
  std::string reference = "builtin";  // or an external command line
  std::size_t dfa_state_cap = kDefaultDfaStateCap;

  // Witness pipeline.
  std::string fixture;       // fixture name, or
  std::string circuit_path;  // serialized circuit file
  std::string fixture_a = "5", fixture_b = "7";
  std::string inputs_path;            // JSON input assignment(s), or
  std::uint64_t generate_inputs = 0;  // draw this many random assignments

  std::string modulus_dec = kBn254ScalarDec;
  std::string outdir;            // empty: no bundle on disk
  std::size_t probe_budget = 0;  // per-witness soundness probe iterations
  int flush_seconds = 30;
  // Stop at the first batch boundary after a report lands (efficacy runs).
  bool stop_on_report = false;

  Alphabet alphabet() const { return Alphabet{alphabet_lo, alphabet_hi}; }
};

// JSON file -> config.  Unknown keys are configuration errors.
CampaignConfig load_campaign_config(const std::string& path);
// CIRCFUZZ_SEED, when set, overrides the file seed (flags override both).
void apply_env_seed(CampaignConfig& config);
// Launch-time validation: budgets, paths, ranges.  Throws ConfigError.
void validate_regex_config(const CampaignConfig& config);
void validate_witness_config(const CampaignConfig& config);

// Exercise tracking.  Constraint side: per circuit, the zero/nonzero flags
// of every (constraint, linear combination) slot.  Automaton side: per
// pattern, hit counts of every DFA transition.
struct CoverageMap {
  std::map<std::string, ConstraintCoverage> circuits;           // circuit hash
  std::map<std::string, std::vector<std::uint64_t>> dfa_hits;   // pattern

  // Field-wise OR / sum.  Shape mismatch on a shared key is an error.
  void merge(const CoverageMap& other);
  bool operator==(const CoverageMap& other) const;

  std::size_t covered() const;  // constraint slots with both flags
  std::size_t total() const;
  std::uint64_t transitions_hit() const;  // DFA cells with count > 0
  // Flags/cells `other` would newly light up; merge feedback uses this.
  std::size_t newly_covered_by(const CoverageMap& other) const;
};

struct CampaignStats {
  std::uint64_t iterations = 0;
  std::uint64_t circuits_compiled = 0;
  std::uint64_t witnesses_generated = 0;
  std::uint64_t mock_proofs = 0;
  std::uint64_t probes_run = 0;
  std::uint64_t strings_skipped = 0;
  std::uint64_t errors = 0;
  std::map<std::string, std::uint64_t> reports_by_category;
  double wall_seconds = 0;
};

struct CampaignResult {
  std::vector<BugReport> reports;  // deduped, first-seen order
  CampaignStats stats;
  CoverageMap coverage;
};

// The full loop: pattern (corpus first, then grammar, with coverage-driven
// requeue) -> automata -> string batches -> per-length circuit -> witness ->
// mock prove -> reference -> classify.  Deterministic for a fixed config:
// byte-identical reports for any worker count.
CampaignResult run_regex_campaign(const CampaignConfig& config);

// Honest witness + soundness probe over a stream of input assignments for
// one fixed circuit.
CampaignResult run_witness_campaign(const CampaignConfig& config, const Circuit& circuit);

// reports.json, stats.json, coverage.json, reproducers/NNN-<id>.json, and an
// index.md summary.  I/O failures throw IoError.
void emit_report_bundle(const CampaignConfig& config, const CampaignResult& result,
                        const std::string& outdir);

}  // namespace circfuzz
