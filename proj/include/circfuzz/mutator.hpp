#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circfuzz/eval.hpp"

namespace circfuzz {

enum class PatchMode { none, downstream_replay };

const char* patch_mode_name(PatchMode m);
std::optional<PatchMode> patch_mode_from_name(const std::string& s);

struct MutationPlan {
  SignalId target = 0;
  FieldElement new_value;
  PatchMode patch = PatchMode::none;
};

// Copy of `honest` with the plan applied.  downstream_replay re-executes
// every program instruction after the target's defining one, treating the
// mutated value as given.  Throws CircuitError when the plan targets a
// public input or the constant-one signal.
Witness mutate_witness(const Circuit& circuit, const Witness& honest,
                       const MutationPlan& plan);

struct OutputDiff {
  std::string name;
  FieldElement honest, mutated;
};

// A satisfying witness that disagrees with the honest one on public output.
struct SoundnessFinding {
  MutationPlan plan;
  std::string target_name;
  FieldElement honest_value;
  std::vector<OutputDiff> diffs;
  std::string honest_digest;  // hash of the honest witness values
};

struct ProbeBudget {
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
};

struct ProbeWeights {
  // Target-class weights: hint signals (defined by a plain assignment) are
  // the canonical under-constraint suspects.
  double hint = 4.0;
  double internal_signal = 1.0;
  double output = 1.0;
  // Value strategies: uniform field element / honest +- 1..16 / zero / one.
  double value_random = 0.25;
  double value_offset = 0.2;
  double value_zero = 0.15;
  double value_one = 0.1;
  double value_flip = 0.3;  // 0 <-> 1 when the honest value is boolean
};

// Mutation loop over the honest witness for `inputs`.  Each draw picks a
// target (weighted; weights adapt toward targets whose mutations violate
// few constraints), a value strategy, and tries the plan both unpatched and
// with downstream replay.  Findings are deduplicated by (target, differing
// output set) and re-verified independently before return.
std::vector<SoundnessFinding> soundness_probe(const Circuit& circuit,
                                              const InputMap& inputs,
                                              const ProbeBudget& budget,
                                              const ProbeWeights& weights = {});

}  // namespace circfuzz
