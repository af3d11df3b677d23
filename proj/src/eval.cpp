#include "circfuzz/eval.hpp"

#include <omp.h>

#include <algorithm>

#include "circfuzz/errors.hpp"

namespace circfuzz {

namespace {

struct EvalCtx {
  const Circuit& circuit;
  Witness& w;
  std::vector<bool> assigned;
  std::size_t instr_index = 0;
  bool record_hints = true;
};

FieldElement eval_expr(EvalCtx& ctx, const Expr& e) {
  switch (e.op) {
    case Expr::Op::sig: {
      if (e.signal >= ctx.w.values.size()) throw CircuitError("expression reads unknown signal");
      if (!ctx.assigned[e.signal])
        throw CircuitError("program reads unassigned signal " +
                           ctx.circuit.signals[e.signal].name);
      return ctx.w.values[e.signal];
    }
    case Expr::Op::cst:
      return e.constant;
    case Expr::Op::add: {
      FieldElement acc = FieldElement(0, ctx.circuit.modulus);
      for (const auto& k : e.kids) acc = fe_add(acc, eval_expr(ctx, k));
      return acc;
    }
    case Expr::Op::sub:
      return fe_sub(eval_expr(ctx, e.kids[0]), eval_expr(ctx, e.kids[1]));
    case Expr::Op::mul:
      return fe_mul(eval_expr(ctx, e.kids[0]), eval_expr(ctx, e.kids[1]));
    case Expr::Op::div: {
      FieldElement num = eval_expr(ctx, e.kids[0]);
      FieldElement den = eval_expr(ctx, e.kids[1]);
      auto [q, by_zero] = fe_div(num, den);
      if (by_zero && ctx.record_hints) ctx.w.hint_events.emplace_back(ctx.instr_index, true);
      return q;
    }
  }
  throw CircuitError("bad expression");
}

void run_program(EvalCtx& ctx, std::size_t first_instr) {
  for (std::size_t i = first_instr; i < ctx.circuit.program.size(); ++i) {
    const Instruction& ins = ctx.circuit.program[i];
    ctx.instr_index = i;
    switch (ins.kind) {
      case InstrKind::assign:
      case InstrKind::assign_and_constrain: {
        if (ins.target >= ctx.w.values.size())
          throw CircuitError("instruction assigns unknown signal");
        const Signal& sig = ctx.circuit.signals[ins.target];
        if (sig.role == SignalRole::public_input || sig.role == SignalRole::const_one)
          throw CircuitError("program assigns input signal " + sig.name);
        if (ctx.assigned[ins.target])
          throw CircuitError("signal assigned twice: " + sig.name);
        FieldElement v = eval_expr(ctx, ins.expr);
        ctx.w.values[ins.target] = v;
        ctx.assigned[ins.target] = true;
        break;
      }
      case InstrKind::constrain:
        // Checked by mock_prove, not during witness generation.
        break;
    }
  }
}

}  // namespace

Witness generate_witness(const Circuit& circuit, const InputMap& inputs) {
  Witness w;
  w.values.assign(circuit.signals.size(), FieldElement());
  std::vector<bool> assigned(circuit.signals.size(), false);

  w.values[kOneSignal] = FieldElement(1, circuit.modulus);
  assigned[kOneSignal] = true;

  std::size_t matched = 0;
  for (SignalId i = 0; i < circuit.signals.size(); ++i) {
    if (circuit.signals[i].role != SignalRole::public_input) continue;
    auto it = inputs.find(circuit.signals[i].name);
    if (it == inputs.end())
      throw CircuitError("missing input: " + circuit.signals[i].name);
    if (!(*it->second.modulus() == *circuit.modulus))
      throw ConfigError("input " + it->first + " uses a different modulus");
    w.values[i] = it->second;
    assigned[i] = true;
    ++matched;
  }
  if (matched != inputs.size()) {
    for (const auto& [name, _] : inputs) {
      auto id = circuit.find_signal(name);
      if (!id || circuit.signals[*id].role != SignalRole::public_input)
        throw CircuitError("input does not name a public input signal: " + name);
    }
  }

  EvalCtx ctx{circuit, w, std::move(assigned)};
  run_program(ctx, 0);

  for (SignalId i = 0; i < circuit.signals.size(); ++i)
    if (!ctx.assigned[i])
      throw CircuitError("program leaves signal unassigned: " + circuit.signals[i].name);
  return w;
}

void replay_program(const Circuit& circuit, Witness& w, std::size_t first_instr) {
  // Everything before the replay point (and every signal in general) is
  // taken as given; the suffix overwrites its own targets.
  std::vector<bool> assigned(circuit.signals.size(), true);
  for (std::size_t i = first_instr; i < circuit.program.size(); ++i) {
    const Instruction& ins = circuit.program[i];
    if (ins.kind != InstrKind::constrain) assigned[ins.target] = false;
  }
  EvalCtx ctx{circuit, w, std::move(assigned)};
  ctx.record_hints = false;
  run_program(ctx, first_instr);
}

namespace {

FieldElement eval_lincomb(const LinComb& lc, const Witness& w, const ModulusPtr& m) {
  mpz_class acc = 0;
  for (const auto& [sig, coeff] : lc.terms) {
    const FieldElement& v = w.values[sig];
    if (!v.valid()) throw CircuitError("witness value missing for constrained signal");
    acc += coeff.value() * v.value();
  }
  return FieldElement(std::move(acc), m);
}

FieldElement constraint_value(const Constraint& c, const Witness& w, const ModulusPtr& m,
                              std::uint8_t* cov3) {
  FieldElement a = eval_lincomb(c.a, w, m);
  FieldElement b = eval_lincomb(c.b, w, m);
  FieldElement cc = eval_lincomb(c.c, w, m);
  if (cov3) {
    cov3[0] = a.is_zero() ? ConstraintCoverage::kSeenZero : ConstraintCoverage::kSeenNonzero;
    cov3[1] = b.is_zero() ? ConstraintCoverage::kSeenZero : ConstraintCoverage::kSeenNonzero;
    cov3[2] = cc.is_zero() ? ConstraintCoverage::kSeenZero : ConstraintCoverage::kSeenNonzero;
  }
  return fe_sub(fe_mul(a, b), cc);
}

MockResult collect(const Circuit& circuit, std::vector<FieldElement> values,
                   ConstraintCoverage* coverage, const std::vector<std::uint8_t>& cov_local) {
  MockResult res;
  res.satisfied = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_zero()) {
      res.satisfied = false;
      res.violations.push_back({i, circuit.constraints[i].label, values[i]});
    }
  }
  if (coverage) {
    if (coverage->n_constraints != circuit.constraints.size())
      throw CircuitError("coverage shape does not match circuit");
    for (std::size_t i = 0; i < cov_local.size(); ++i) coverage->flags[i] |= cov_local[i];
  }
  return res;
}

}  // namespace

std::size_t ConstraintCoverage::covered() const {
  std::size_t n = 0;
  for (std::uint8_t f : flags)
    if (f == (kSeenZero | kSeenNonzero)) ++n;
  return n;
}

void ConstraintCoverage::merge(const ConstraintCoverage& other) {
  if (n_constraints != other.n_constraints || flags.size() != other.flags.size())
    throw CircuitError("coverage merge shape mismatch");
  for (std::size_t i = 0; i < flags.size(); ++i) flags[i] |= other.flags[i];
}

MockResult mock_prove_serial(const Circuit& circuit, const Witness& w,
                             ConstraintCoverage* coverage) {
  if (w.values.size() != circuit.signals.size())
    throw CircuitError("witness length does not match circuit");
  const std::size_t n = circuit.constraints.size();
  std::vector<FieldElement> values(n);
  std::vector<std::uint8_t> cov_local(coverage ? 3 * n : 0, 0);
  for (std::size_t i = 0; i < n; ++i)
    values[i] = constraint_value(circuit.constraints[i], w, circuit.modulus,
                                 coverage ? &cov_local[3 * i] : nullptr);
  return collect(circuit, std::move(values), coverage, cov_local);
}

MockResult mock_prove(const Circuit& circuit, const Witness& w, ConstraintCoverage* coverage) {
  if (w.values.size() != circuit.signals.size())
    throw CircuitError("witness length does not match circuit");
  const std::size_t n = circuit.constraints.size();
  if (n < 256) return mock_prove_serial(circuit, w, coverage);

  std::vector<FieldElement> values(n);
  std::vector<std::uint8_t> cov_local(coverage ? 3 * n : 0, 0);
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      values[i] = constraint_value(circuit.constraints[i], w, circuit.modulus,
                                   coverage ? &cov_local[3 * i] : nullptr);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return collect(circuit, std::move(values), coverage, cov_local);
}

std::map<std::string, FieldElement> read_outputs(const Circuit& circuit, const Witness& w) {
  std::map<std::string, FieldElement> out;
  for (SignalId i = 0; i < circuit.signals.size(); ++i)
    if (circuit.signals[i].role == SignalRole::public_output)
      out[circuit.signals[i].name] = w.values[i];
  return out;
}

}  // namespace circfuzz
