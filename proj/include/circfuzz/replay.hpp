#pragma once

#include <optional>
#include <string>

#include "circfuzz/circuit.hpp"
#include "circfuzz/oracle.hpp"

namespace circfuzz {

struct ReplayOutcome {
  bool reproduced = false;                // same category came back
  std::optional<BugCategory> category;    // what the replay classified
  bool hash_matched = true;               // rebuilt circuit vs recorded hash
  std::string detail;
};

// Rebuilds the circuit named by the reproducer (regex + injection, or
// fixture + params), reruns the recorded input, reapplies any witness
// delta, and classifies from scratch.  `circuit_override` supplies the
// circuit for reports whose reproducer cannot rebuild one (witness
// campaigns over ad-hoc circuit files).  Throws Error when the reproducer
// is unusable.
ReplayOutcome replay_report(const BugReport& report,
                            const std::string& reference_spec = "builtin",
                            const Circuit* circuit_override = nullptr);

}  // namespace circfuzz
