#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circfuzz/category.hpp"
#include "circfuzz/circuit.hpp"
#include "circfuzz/regex.hpp"

namespace circfuzz {

// One DFA edge: all bytes that move `from` to `to`, as normalized ranges.
struct DfaEdge {
  std::uint32_t from = 0, to = 0;
  std::vector<ByteRange> ranges;

  std::size_t byte_count() const;
  bool contains(std::uint8_t b) const;
};

// Canonical edge list: sorted by (from, to), ranges normalized.
std::vector<DfaEdge> dfa_edges(const Dfa& dfa);

struct TranspileSpec {
  Dfa dfa;
  std::size_t input_length = 0;
  std::size_t max_length = 64;
  std::size_t max_states = kDefaultDfaStateCap;
};

// Compile the DFA into a circuit specialized to inputs of exactly
// `input_length` bytes.
//
// Layout, for n = input_length, states q in 0..S-1, edge list E:
//   inputs   char[i]                       i in 0..n-1
//   gadgets  eq[i][b].inv / eq[i][b].out   per position and alphabet byte
//   products t[i][e] <== s[i][from_e] * (sum of eq outs over e's ranges)
//   states   s[0][q] <== start indicator; s[i+1][q'] <== sum of incoming t
//   output   accept <== sum of s[n][q] over accepting q
// plus, per position, the range constraint sum_b eq[i][b].out === 1, and,
// for every step past 0, a booleanity constraint s[i][q]*(s[i][q]-1) === 0.
//
// The booleanity row is hardening: state signals are already pinned by
// their wiring equalities, so a sound witness cannot put a non-boolean
// value there.  Keeping it gives the injector a named redundant target.
Circuit transpile(const TranspileSpec& spec, ModulusPtr modulus,
                  std::map<std::string, std::string> metadata = {});

// Closed-form constraint count for the layout above; tests compare the
// emitted circuit against it to guard against silently lost constraints.
//   S + n*(2A + 1) + n*E + 2*n*S + 1
std::size_t transpile_constraint_count(std::size_t states, std::size_t alphabet_size,
                                       std::size_t input_length, std::size_t edges);

enum class InjectionKind {
  drop_booleanity,
  drop_transition,
  flip_accept_state,
  class_off_by_one,
  hint_unconstrained,
};

const char* injection_kind_name(InjectionKind k);
std::optional<InjectionKind> injection_kind_from_name(const std::string& s);
std::vector<InjectionKind> all_injection_kinds();

struct BugInjection {
  InjectionKind kind = InjectionKind::hint_unconstrained;
  // Site selector; reduced modulo the viable-site count for the circuit.
  std::uint64_t site = 0;
};

struct InjectionResult {
  Circuit circuit;
  BugCategory expected;
  // Site naming for report cross-checks.  `site` is the edited constraint
  // label (or signal), with "[*]" where any step index matches; `signal`
  // is the witness signal the edit leaves under-constrained ("" if none).
  std::string site;
  std::string signal;
};

// Transpile, then apply one catalogued miscompilation.  Metadata keys
// injection / injection_site / injection_signal / injection_expected are
// added to the circuit.  Throws CircuitError when the spec admits no
// viable site for the kind (e.g. a zero-length circuit).
InjectionResult inject_bug(const TranspileSpec& spec, const BugInjection& injection,
                           ModulusPtr modulus,
                           std::map<std::string, std::string> metadata = {});

// Evidence-site comparison: exact match, except "[*]" in `expected` matches
// any "[<digits>]" segment.
bool site_matches(const std::string& evidence, const std::string& expected);

}  // namespace circfuzz
