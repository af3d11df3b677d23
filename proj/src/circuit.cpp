#include "circfuzz/circuit.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "circfuzz/errors.hpp"

namespace circfuzz {

const char* role_name(SignalRole r) {
  switch (r) {
    case SignalRole::const_one: return "const_one";
    case SignalRole::public_input: return "public_input";
    case SignalRole::public_output: return "public_output";
    case SignalRole::internal: return "internal";
  }
  return "?";
}

std::optional<SignalRole> role_from_name(const std::string& s) {
  if (s == "const_one") return SignalRole::const_one;
  if (s == "public_input") return SignalRole::public_input;
  if (s == "public_output") return SignalRole::public_output;
  if (s == "internal") return SignalRole::internal;
  return std::nullopt;
}

const char* instr_kind_name(InstrKind k) {
  switch (k) {
    case InstrKind::assign: return "assign";
    case InstrKind::assign_and_constrain: return "assign_and_constrain";
    case InstrKind::constrain: return "constrain";
  }
  return "?";
}

std::optional<InstrKind> instr_kind_from_name(const std::string& s) {
  if (s == "assign") return InstrKind::assign;
  if (s == "assign_and_constrain") return InstrKind::assign_and_constrain;
  if (s == "constrain") return InstrKind::constrain;
  return std::nullopt;
}

void LinComb::add_term(SignalId sig, const FieldElement& coeff) {
  if (coeff.is_zero()) return;
  auto it = std::lower_bound(terms.begin(), terms.end(), sig,
                             [](const auto& t, SignalId s) { return t.first < s; });
  if (it != terms.end() && it->first == sig) {
    it->second = fe_add(it->second, coeff);
    if (it->second.is_zero()) terms.erase(it);
  } else {
    terms.insert(it, {sig, coeff});
  }
}

LinComb LinComb::negated() const {
  LinComb out;
  out.terms.reserve(terms.size());
  for (const auto& [s, c] : terms) out.terms.emplace_back(s, fe_neg(c));
  return out;
}

Expr Expr::sig(SignalId s) {
  Expr e;
  e.op = Op::sig;
  e.signal = s;
  return e;
}

Expr Expr::cst(FieldElement v) {
  Expr e;
  e.op = Op::cst;
  e.constant = std::move(v);
  return e;
}

Expr Expr::add(std::vector<Expr> kids) {
  // Canonical form: a one-term sum is the term.  Serialized circuits rely
  // on '+' always carrying two or more operands.
  if (kids.empty()) throw CircuitError("sum needs at least one term");
  if (kids.size() == 1) return std::move(kids[0]);
  Expr e;
  e.op = Op::add;
  e.kids = std::move(kids);
  return e;
}

namespace {
Expr binary(Expr::Op op, Expr a, Expr b) {
  Expr e;
  e.op = op;
  e.kids.push_back(std::move(a));
  e.kids.push_back(std::move(b));
  return e;
}
}  // namespace

Expr Expr::sub(Expr a, Expr b) { return binary(Op::sub, std::move(a), std::move(b)); }
Expr Expr::mul(Expr a, Expr b) { return binary(Op::mul, std::move(a), std::move(b)); }
Expr Expr::div(Expr a, Expr b) { return binary(Op::div, std::move(a), std::move(b)); }

std::optional<SignalId> Circuit::find_signal(const std::string& name) const {
  for (SignalId i = 0; i < signals.size(); ++i)
    if (signals[i].name == name) return i;
  return std::nullopt;
}

std::vector<SignalId> Circuit::inputs() const {
  std::vector<SignalId> out;
  for (SignalId i = 0; i < signals.size(); ++i)
    if (signals[i].role == SignalRole::public_input) out.push_back(i);
  return out;
}

std::vector<SignalId> Circuit::outputs() const {
  std::vector<SignalId> out;
  for (SignalId i = 0; i < signals.size(); ++i)
    if (signals[i].role == SignalRole::public_output) out.push_back(i);
  return out;
}

CircuitBuilder::CircuitBuilder(ModulusPtr modulus) : modulus_(std::move(modulus)) {
  circuit_.modulus = modulus_;
  alloc("one", SignalRole::const_one);
  assigned_[kOneSignal] = true;
}

SignalId CircuitBuilder::alloc(const std::string& name, SignalRole role) {
  if (by_name_.count(name)) throw CircuitError("duplicate signal name: " + name);
  SignalId id = static_cast<SignalId>(circuit_.signals.size());
  circuit_.signals.push_back({name, role});
  assigned_.push_back(false);
  by_name_[name] = id;
  return id;
}

SignalId CircuitBuilder::add_input(const std::string& name) {
  SignalId id = alloc(name, SignalRole::public_input);
  assigned_[id] = true;
  return id;
}

SignalId CircuitBuilder::add_output(const std::string& name) {
  return alloc(name, SignalRole::public_output);
}

SignalId CircuitBuilder::add_internal(const std::string& name) {
  return alloc(name, SignalRole::internal);
}

FieldElement CircuitBuilder::fe(std::uint64_t v) const {
  return FieldElement::from_u64(v, modulus_);
}

FieldElement CircuitBuilder::fe_signed(std::int64_t v) const {
  return FieldElement::from_i64(v, modulus_);
}

void CircuitBuilder::check_reads_assigned(const Expr& e) const {
  if (e.op == Expr::Op::sig) {
    if (e.signal >= assigned_.size()) throw CircuitError("expression reads unknown signal");
    if (!assigned_[e.signal])
      throw CircuitError("expression reads unassigned signal " + circuit_.signals[e.signal].name);
    return;
  }
  for (const auto& k : e.kids) check_reads_assigned(k);
}

// Quadratic normal form: value = prod_a * prod_b + lin (prod absent when the
// expression is linear).
struct CircuitBuilder::Lowered {
  bool has_prod = false;
  LinComb prod_a, prod_b;
  LinComb lin;
};

namespace {
std::optional<FieldElement> as_constant(const LinComb& l, const ModulusPtr& m) {
  if (l.terms.empty()) return FieldElement(0, m);
  if (l.terms.size() == 1 && l.terms[0].first == kOneSignal) return l.terms[0].second;
  return std::nullopt;
}

LinComb scaled(const LinComb& l, const FieldElement& k) {
  LinComb out;
  if (k.is_zero()) return out;
  for (const auto& [s, c] : l.terms) out.terms.emplace_back(s, fe_mul(c, k));
  return out;
}

void accumulate(LinComb& into, const LinComb& from) {
  for (const auto& [s, c] : from.terms) into.add_term(s, c);
}
}  // namespace

CircuitBuilder::Lowered CircuitBuilder::lower(const Expr& e, const std::string& label) {
  Lowered out;
  switch (e.op) {
    case Expr::Op::sig:
      out.lin.add_term(e.signal, fe(1));
      return out;
    case Expr::Op::cst:
      out.lin.add_term(kOneSignal, e.constant);
      return out;
    case Expr::Op::add: {
      for (const auto& k : e.kids) {
        Lowered part = lower(k, label);
        if (part.has_prod) {
          if (out.has_prod)
            throw CircuitError("expression '" + label +
                               "' has more than one signal product; "
                               "introduce an explicit intermediate signal");
          out.has_prod = true;
          out.prod_a = std::move(part.prod_a);
          out.prod_b = std::move(part.prod_b);
        }
        accumulate(out.lin, part.lin);
      }
      return out;
    }
    case Expr::Op::sub: {
      Lowered a = lower(e.kids[0], label);
      Lowered b = lower(e.kids[1], label);
      if (a.has_prod && b.has_prod)
        throw CircuitError("expression has more than one signal product; "
                           "introduce an explicit intermediate signal");
      if (b.has_prod) {
        out.has_prod = true;
        out.prod_a = scaled(b.prod_a, fe_signed(-1));
        out.prod_b = b.prod_b;
      } else if (a.has_prod) {
        out.has_prod = true;
        out.prod_a = a.prod_a;
        out.prod_b = a.prod_b;
      }
      out.lin = a.lin;
      accumulate(out.lin, b.lin.negated());
      return out;
    }
    case Expr::Op::mul: {
      Lowered a = lower(e.kids[0], label);
      Lowered b = lower(e.kids[1], label);
      auto ka = a.has_prod ? std::nullopt : as_constant(a.lin, modulus_);
      auto kb = b.has_prod ? std::nullopt : as_constant(b.lin, modulus_);
      if (ka) {
        out = b;
        if (out.has_prod) out.prod_a = scaled(out.prod_a, *ka);
        out.lin = scaled(out.lin, *ka);
        return out;
      }
      if (kb) {
        out = a;
        if (out.has_prod) out.prod_a = scaled(out.prod_a, *kb);
        out.lin = scaled(out.lin, *kb);
        return out;
      }
      if (a.has_prod || b.has_prod)
        throw CircuitError("nested signal product in constrained expression; "
                           "introduce an explicit intermediate signal");
      out.has_prod = true;
      out.prod_a = a.lin;
      out.prod_b = b.lin;
      return out;
    }
    case Expr::Op::div: {
      Lowered a = lower(e.kids[0], label);
      Lowered b = lower(e.kids[1], label);
      if (b.has_prod) throw CircuitError("division by a product in constrained expression");
      auto kb = as_constant(b.lin, modulus_);
      if (!kb) throw CircuitError("division by a signal in constrained expression");
      if (kb->is_zero()) throw CircuitError("division by constant zero in constrained expression");
      FieldElement inv = fe_inverse(*kb);
      out = a;
      if (out.has_prod) out.prod_a = scaled(out.prod_a, inv);
      out.lin = scaled(out.lin, inv);
      return out;
    }
  }
  throw CircuitError("bad expression");
}

void CircuitBuilder::assign(SignalId target, Expr expr) {
  if (target >= assigned_.size()) throw CircuitError("assign to unknown signal");
  if (assigned_[target])
    throw CircuitError("signal assigned twice: " + circuit_.signals[target].name);
  if (circuit_.signals[target].role == SignalRole::public_input ||
      circuit_.signals[target].role == SignalRole::const_one)
    throw CircuitError("cannot assign input signal " + circuit_.signals[target].name);
  check_reads_assigned(expr);
  assigned_[target] = true;
  Instruction ins;
  ins.kind = InstrKind::assign;
  ins.target = target;
  ins.expr = std::move(expr);
  circuit_.program.push_back(std::move(ins));
}

void CircuitBuilder::assign_and_constrain(SignalId target, Expr expr, std::string label) {
  if (target >= assigned_.size()) throw CircuitError("assign to unknown signal");
  if (assigned_[target])
    throw CircuitError("signal assigned twice: " + circuit_.signals[target].name);
  if (circuit_.signals[target].role == SignalRole::public_input ||
      circuit_.signals[target].role == SignalRole::const_one)
    throw CircuitError("cannot assign input signal " + circuit_.signals[target].name);
  check_reads_assigned(expr);
  if (label.empty()) label = circuit_.signals[target].name + " wiring";

  // Constraint value = target - expr, so A carries the negated product.
  Lowered rhs = lower(expr, label);
  Constraint c;
  if (rhs.has_prod) {
    c.a = scaled(rhs.prod_a, fe_signed(-1));
    c.b = rhs.prod_b;
  }
  c.c = rhs.lin;
  c.c.add_term(target, fe_signed(-1));
  c.label = std::move(label);
  circuit_.constraints.push_back(std::move(c));

  assigned_[target] = true;
  Instruction ins;
  ins.kind = InstrKind::assign_and_constrain;
  ins.target = target;
  ins.expr = std::move(expr);
  circuit_.program.push_back(std::move(ins));
}

void CircuitBuilder::constrain(Expr lhs, Expr rhs, std::string label) {
  check_reads_assigned(lhs);
  check_reads_assigned(rhs);
  if (label.empty()) label = "constraint " + std::to_string(circuit_.constraints.size());

  // Constraint value = lhs - rhs.
  Expr diff = Expr::sub(lhs, rhs);
  Lowered d = lower(diff, label);
  Constraint c;
  if (d.has_prod) {
    c.a = d.prod_a;
    c.b = d.prod_b;
  }
  c.c = d.lin.negated();
  c.label = label;
  circuit_.constraints.push_back(std::move(c));

  Instruction ins;
  ins.kind = InstrKind::constrain;
  ins.expr = std::move(diff);
  circuit_.program.push_back(std::move(ins));
}

SignalId CircuitBuilder::iszero(Expr x, const std::string& prefix) {
  SignalId inv = add_internal(prefix + ".inv");
  SignalId out = add_internal(prefix + ".out");
  // inv is a hint: 1/x when x != 0, else 0 (fe_div's total semantics).
  assign(inv, Expr::div(Expr::cst(fe(1)), x));
  // out <== 1 - x * inv
  assign_and_constrain(out, Expr::sub(Expr::cst(fe(1)), Expr::mul(x, Expr::sig(inv))),
                       prefix + " out === 1 - x*inv");
  // x * out === 0
  constrain(Expr::mul(x, Expr::sig(out)), Expr::cst(fe(0)), prefix + " x*out === 0");
  return out;
}

Circuit CircuitBuilder::take(std::map<std::string, std::string> metadata) {
  for (SignalId i = 0; i < circuit_.signals.size(); ++i) {
    if (!assigned_[i])
      throw CircuitError("signal never assigned: " + circuit_.signals[i].name);
  }
  circuit_.metadata = std::move(metadata);
  return std::move(circuit_);
}

}  // namespace circfuzz
