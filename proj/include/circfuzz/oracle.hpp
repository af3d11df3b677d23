#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circfuzz/category.hpp"
#include "circfuzz/eval.hpp"
#include "circfuzz/mutator.hpp"
#include "circfuzz/util.hpp"

namespace circfuzz {

enum class InputLabel { expected_valid, expected_invalid, not_applicable };

const char* input_label_name(InputLabel l);

enum class OracleKind { spec_based, differential, invariant };

const char* oracle_kind_name(OracleKind k);

// Everything the evaluator saw for one (circuit, input) execution.
struct Observation {
  std::string circuit_hash;
  std::optional<std::string> regex;
  std::optional<Bytes> input_bytes;  // regex-pipeline string
  InputLabel label = InputLabel::not_applicable;

  bool witgen_ok = true;
  std::string witgen_error;
  std::optional<bool> satisfied;  // honest mock-prove outcome
  std::vector<Violation> violations;

  std::map<std::string, FieldElement> outputs;            // honest run
  std::map<std::string, FieldElement> reference_outputs;  // expected (fixtures)
  std::optional<bool> reference_verdict;                  // reference matcher

  std::vector<SoundnessFinding> findings;

  // Reproducer context.
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  std::string injection;            // kind name, or ""
  std::uint64_t injection_site_index = 0;
  std::string injection_site;       // resolved site, as the injector named it
  std::string injection_signal;     // under-constrained signal, or ""
  std::string injection_expected;   // category the injector predicts
  std::string fixture;              // fixture name, or ""
  std::string fixture_a, fixture_b;
  InputMap inputs;                  // inputs for non-regex replays
  std::uint8_t alphabet_lo = 0, alphabet_hi = 0;  // regex pipeline only
  std::string modulus_dec;
};

struct WitnessDeltaDiff {
  std::string output;
  std::string honest;
  std::string mutated;
};

struct WitnessDelta {
  std::string signal;
  std::string value_dec;
  PatchMode patch = PatchMode::none;
  std::vector<WitnessDeltaDiff> diffs;
};

struct BugReport {
  std::string id;
  BugCategory category = BugCategory::soundness;
  OracleKind oracle = OracleKind::invariant;
  std::string circuit_hash;
  std::string site;          // primary evidence site: constraint label or signal
  std::string evidence;      // one-line description
  std::string evidence_tag;  // "" or "unexpected-unsat"

  std::optional<std::string> regex;
  std::optional<std::string> string_b64;
  std::optional<std::size_t> input_length;
  std::string injection;
  std::uint64_t injection_site_index = 0;
  std::string injection_site;
  std::string injection_signal;
  std::string injection_expected;
  std::string fixture;
  std::string fixture_a, fixture_b;
  std::map<std::string, std::string> inputs_dec;
  std::uint8_t alphabet_lo = 0, alphabet_hi = 0;
  std::string modulus_dec;
  std::uint64_t seed = 0;
  std::optional<WitnessDelta> witness_delta;

  std::uint64_t first_seen_iteration = 0;
  std::uint64_t duplicates = 0;
};

// Decision table, first match wins:
//   1. expected-valid input and the honest run failed       -> completeness
//   2. honest run clean but outputs contradict reference    -> correctness
//   3. expected-invalid input and the honest run failed     -> correctness
//      (tag "unexpected-unsat": this encoding computes rejection, so an
//      unsatisfiable honest run is a compiler defect, not a proof gap)
//   4. soundness finding present                            -> soundness
//   5. otherwise                                            -> no report
std::optional<BugReport> classify(const Observation& obs);

// Stable dedup on (circuit hash, category, site); first occurrence kept,
// later ones counted into `duplicates`.
std::vector<BugReport> dedupe(std::vector<BugReport> reports);

std::string report_to_json(const BugReport& report);
BugReport report_from_json(const std::string& text);

}  // namespace circfuzz
