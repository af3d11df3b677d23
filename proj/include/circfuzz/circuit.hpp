#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circfuzz/field.hpp"

namespace circfuzz {

using SignalId = std::uint32_t;

inline constexpr SignalId kOneSignal = 0;  // constant-one, always index 0

enum class SignalRole { const_one, public_input, public_output, internal };

const char* role_name(SignalRole r);
std::optional<SignalRole> role_from_name(const std::string& s);

struct Signal {
  std::string name;
  SignalRole role = SignalRole::internal;
};

// Sparse linear combination over signals; the constant term rides on the
// constant-one signal.  Terms are kept sorted by signal with nonzero
// coefficients so serialization is canonical.
struct LinComb {
  std::vector<std::pair<SignalId, FieldElement>> terms;

  void add_term(SignalId sig, const FieldElement& coeff);
  bool empty() const { return terms.empty(); }
  LinComb negated() const;
};

// a * b - c = 0 over the witness.
struct Constraint {
  LinComb a, b, c;
  std::string label;
};

// Arithmetic expression tree; "add" is n-ary, the rest binary.
struct Expr {
  enum class Op { sig, cst, add, sub, mul, div };

  Op op = Op::cst;
  SignalId signal = 0;
  FieldElement constant;
  std::vector<Expr> kids;

  static Expr sig(SignalId s);
  static Expr cst(FieldElement v);
  static Expr add(std::vector<Expr> kids);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
};

enum class InstrKind { assign, assign_and_constrain, constrain };

const char* instr_kind_name(InstrKind k);
std::optional<InstrKind> instr_kind_from_name(const std::string& s);

// assign:                target <-- expr          (no constraint)
// assign_and_constrain:  target <== expr          (assignment + equality)
// constrain:             expr === 0               (no assignment)
struct Instruction {
  InstrKind kind = InstrKind::assign;
  SignalId target = 0;  // meaningless for constrain
  Expr expr;
};

struct Circuit {
  ModulusPtr modulus;
  std::vector<Signal> signals;
  std::vector<Constraint> constraints;
  std::vector<Instruction> program;
  std::map<std::string, std::string> metadata;

  std::optional<SignalId> find_signal(const std::string& name) const;
  const std::string& signal_name(SignalId s) const { return signals.at(s).name; }
  std::vector<SignalId> inputs() const;
  std::vector<SignalId> outputs() const;
};

// Incremental circuit construction with circom-style operations.  The
// builder checks the program stays in topological order (instructions only
// read already-assigned signals) and lowers constrained expressions to
// rank-1, introducing auxiliary product signals for nested products.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(ModulusPtr modulus);

  SignalId add_input(const std::string& name);
  SignalId add_output(const std::string& name);
  SignalId add_internal(const std::string& name);

  FieldElement fe(std::uint64_t v) const;
  FieldElement fe_signed(std::int64_t v) const;
  const ModulusPtr& modulus() const { return modulus_; }

  // target <-- expr
  void assign(SignalId target, Expr expr);
  // target <== expr; constraint labeled `label` (or a generated one)
  void assign_and_constrain(SignalId target, Expr expr, std::string label = "");
  // lhs === rhs
  void constrain(Expr lhs, Expr rhs, std::string label = "");

  // IsZero gadget: returns `out` with out = 1 when x == 0 and 0 otherwise.
  // Allocates out and inv signals named from `prefix`.
  SignalId iszero(Expr x, const std::string& prefix);

  // Emission positions, for callers that need to map what they just built
  // back to constraint/instruction indices.
  std::size_t n_constraints() const { return circuit_.constraints.size(); }
  std::size_t n_instructions() const { return circuit_.program.size(); }

  Circuit take(std::map<std::string, std::string> metadata = {});

 private:
  struct Lowered;
  Lowered lower(const Expr& e, const std::string& label);
  SignalId alloc(const std::string& name, SignalRole role);
  void check_reads_assigned(const Expr& e) const;

  ModulusPtr modulus_;
  Circuit circuit_;
  std::vector<bool> assigned_;
  std::map<std::string, SignalId> by_name_;
};

}  // namespace circfuzz
