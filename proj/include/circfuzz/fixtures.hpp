#pragma once

#include <optional>
#include <string>
#include <vector>

#include "circfuzz/circuit.hpp"
#include "circfuzz/eval.hpp"

namespace circfuzz {

// Known-answer circuits: four multiplier variants covering the bug taxonomy
// (safe, under-constrained, wrong computation with the constraint kept, and
// wrong computation with a matching constraint) plus a Montgomery-curve
// point addition whose unconstrained-lambda corner is the classic
// under-constraint bug.
enum class FixtureKind {
  multiplier_safe,
  multiplier_soundness,
  multiplier_completeness,
  multiplier_correctness,
  montgomery_add,
};

const char* fixture_kind_name(FixtureKind k);
std::optional<FixtureKind> fixture_kind_from_name(const std::string& s);
std::vector<FixtureKind> all_fixture_kinds();

struct FixtureParams {
  // Montgomery curve B*y^2 = x^3 + A*x^2 + x; B must be nonzero.
  std::string a = "5";
  std::string b = "7";
};

// Throws ConfigError when params are invalid for the kind (B == 0).
Circuit make_fixture(FixtureKind kind, const ModulusPtr& modulus,
                     const FixtureParams& params = {});

// Ground-truth outputs where the fixture's intent defines them: the
// multiplier family means c = a*b.  Montgomery addition has no built-in
// reference (the curve math is out of scope), so it returns nullopt.
std::optional<std::map<std::string, FieldElement>> fixture_reference_outputs(
    FixtureKind kind, const InputMap& inputs, const ModulusPtr& modulus);

}  // namespace circfuzz
