#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "circfuzz/circuit.hpp"

namespace circfuzz {

struct Witness {
  std::vector<FieldElement> values;  // dense, indexed by SignalId
  // (instruction index, divides-by-zero) for every division whose divisor
  // evaluated to zero; these mark prover-chosen defaults worth probing.
  std::vector<std::pair<std::size_t, bool>> hint_events;
};

using InputMap = std::map<std::string, FieldElement>;

// Runs the witness program over the public inputs.  Throws CircuitError on
// missing or extra inputs and on programs that read unassigned signals.
Witness generate_witness(const Circuit& circuit, const InputMap& inputs);

// Re-executes the program suffix starting at `first_instr`, in place.
void replay_program(const Circuit& circuit, Witness& w, std::size_t first_instr);

struct Violation {
  std::size_t index = 0;   // constraint index
  std::string label;
  FieldElement lhs;        // value of a*b - c
};

struct MockResult {
  bool satisfied = false;
  std::vector<Violation> violations;  // every violated constraint, in index order
};

// Per-circuit constraint-exercise coverage: two bits per linear combination
// (seen-zero / seen-nonzero) for each of a, b, c of every constraint.
struct ConstraintCoverage {
  std::size_t n_constraints = 0;
  std::vector<std::uint8_t> flags;  // 3 * n_constraints entries

  static constexpr std::uint8_t kSeenZero = 1;
  static constexpr std::uint8_t kSeenNonzero = 2;

  explicit ConstraintCoverage(std::size_t n = 0) : n_constraints(n), flags(3 * n, 0) {}

  std::size_t covered() const;   // combinations with both bits set
  std::size_t total() const { return flags.size(); }
  // Throws CircuitError when shapes differ.
  void merge(const ConstraintCoverage& other);
  bool operator==(const ConstraintCoverage&) const = default;
};

// Checks every constraint against the witness; never short-circuits.  The
// parallel variant splits constraint evaluation across OpenMP threads and
// must agree with mock_prove_serial bit for bit (tests enforce this).
MockResult mock_prove_serial(const Circuit& circuit, const Witness& w,
                             ConstraintCoverage* coverage = nullptr);
MockResult mock_prove(const Circuit& circuit, const Witness& w,
                      ConstraintCoverage* coverage = nullptr);

// Public outputs by name.
std::map<std::string, FieldElement> read_outputs(const Circuit& circuit, const Witness& w);

}  // namespace circfuzz
