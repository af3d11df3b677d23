#include "circfuzz/mutator.hpp"

#include <algorithm>

#include "circfuzz/errors.hpp"
#include "circfuzz/rng.hpp"
#include "circfuzz/util.hpp"

namespace circfuzz {

const char* patch_mode_name(PatchMode m) {
  return m == PatchMode::none ? "none" : "downstream_replay";
}

std::optional<PatchMode> patch_mode_from_name(const std::string& s) {
  if (s == "none") return PatchMode::none;
  if (s == "downstream_replay") return PatchMode::downstream_replay;
  return std::nullopt;
}

namespace {

// Index of the instruction that assigns `target`, or the program size for
// signals assigned before the program runs (inputs).
std::size_t defining_instruction(const Circuit& circuit, SignalId target) {
  for (std::size_t i = 0; i < circuit.program.size(); ++i) {
    const Instruction& ins = circuit.program[i];
    if (ins.kind != InstrKind::constrain && ins.target == target) return i;
  }
  return circuit.program.size();
}

std::string witness_digest(const Witness& w) {
  std::string all;
  for (const FieldElement& v : w.values) {
    all += v.decimal();
    all += ',';
  }
  return sha256_hex(all);
}

}  // namespace

Witness mutate_witness(const Circuit& circuit, const Witness& honest,
                       const MutationPlan& plan) {
  if (plan.target >= circuit.signals.size())
    throw CircuitError("mutation target out of range");
  SignalRole role = circuit.signals[plan.target].role;
  if (role == SignalRole::public_input || role == SignalRole::const_one)
    throw CircuitError("mutation may not target public input " +
                       circuit.signal_name(plan.target) +
                       " (inputs fix the statement)");
  Witness out = honest;
  out.values[plan.target] = plan.new_value;
  if (plan.patch == PatchMode::downstream_replay)
    replay_program(circuit, out, defining_instruction(circuit, plan.target) + 1);
  return out;
}

std::vector<SoundnessFinding> soundness_probe(const Circuit& circuit,
                                              const InputMap& inputs,
                                              const ProbeBudget& budget,
                                              const ProbeWeights& weights) {
  Witness honest = generate_witness(circuit, inputs);
  {
    MockResult base = mock_prove(circuit, honest);
    if (!base.satisfied)
      throw CircuitError("soundness probe requires a satisfying honest witness");
  }
  auto honest_outputs = read_outputs(circuit, honest);
  std::string honest_hash = witness_digest(honest);
  const ModulusPtr& mod = circuit.modulus;

  // Hint signals: assigned but never by assign_and_constrain.
  std::vector<bool> is_hint(circuit.signals.size(), false);
  for (const Instruction& ins : circuit.program)
    if (ins.kind == InstrKind::assign) is_hint[ins.target] = true;
    else if (ins.kind == InstrKind::assign_and_constrain) is_hint[ins.target] = false;

  std::vector<SignalId> targets;
  std::vector<double> weight;
  for (SignalId s = 0; s < circuit.signals.size(); ++s) {
    SignalRole role = circuit.signals[s].role;
    if (role == SignalRole::public_input || role == SignalRole::const_one) continue;
    targets.push_back(s);
    weight.push_back(is_hint[s] ? weights.hint
                     : role == SignalRole::public_output ? weights.output
                                                         : weights.internal_signal);
  }
  if (targets.empty()) return {};

  Rng rng(budget.seed);
  std::vector<SoundnessFinding> findings;
  std::vector<std::pair<SignalId, std::string>> seen;  // dedup key

  auto try_plan = [&](const MutationPlan& plan) -> std::size_t {
    Witness mutated = mutate_witness(circuit, honest, plan);
    MockResult res = mock_prove(circuit, mutated);
    if (!res.satisfied) return res.violations.size();
    std::vector<OutputDiff> diffs;
    std::string key;
    auto outs = read_outputs(circuit, mutated);
    for (const auto& [name, hv] : honest_outputs) {
      const FieldElement& mv = outs.at(name);
      if (mv != hv) {
        diffs.push_back({name, hv, mv});
        key += name;
        key += ';';
      }
    }
    if (diffs.empty()) return 0;  // satisfied but observationally identical
    auto dk = std::make_pair(plan.target, key);
    if (std::find(seen.begin(), seen.end(), dk) == seen.end()) {
      seen.push_back(dk);
      findings.push_back({plan, circuit.signal_name(plan.target),
                          honest.values[plan.target], std::move(diffs), honest_hash});
    }
    return 0;
  };

  double vtotal = weights.value_random + weights.value_offset + weights.value_zero +
                  weights.value_one + weights.value_flip;
  for (std::size_t iter = 0; iter < budget.iterations; ++iter) {
    double wtotal = 0;
    for (double w : weight) wtotal += w;
    double x = rng.unit() * wtotal;
    std::size_t ti = 0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      ti = i;
      x -= weight[i];
      if (x <= 0) break;
    }
    SignalId target = targets[ti];

    FieldElement value;
    double v = rng.unit() * vtotal;
    if ((v -= weights.value_random) <= 0) {
      mpz_class r;
      // Two 64-bit draws cover the moduli in use far past bias concerns.
      mpz_class hi(std::to_string(rng.next()));
      mpz_class lo(std::to_string(rng.next()));
      r = hi * mpz_class("18446744073709551616") + lo;
      value = FieldElement(r, mod);
    } else if ((v -= weights.value_offset) <= 0) {
      std::int64_t d = static_cast<std::int64_t>(1 + rng.below(16));
      if (rng.chance(0.5)) d = -d;
      value = honest.values[target] + FieldElement::from_i64(d, mod);
    } else if ((v -= weights.value_zero) <= 0) {
      value = FieldElement::from_u64(0, mod);
    } else if ((v -= weights.value_one) <= 0) {
      value = FieldElement::from_u64(1, mod);
    } else {
      // Indicator signals dominate these circuits; flipping the bit is the
      // canonical cheat attempt.  Non-boolean targets fall back to +1.
      const mpz_class& hv = honest.values[target].value();
      if (hv == 0) value = FieldElement::from_u64(1, mod);
      else if (hv == 1) value = FieldElement::from_u64(0, mod);
      else value = honest.values[target] + FieldElement::from_u64(1, mod);
    }
    if (value == honest.values[target]) continue;

    std::size_t violations = try_plan({target, value, PatchMode::none});
    std::size_t with_patch = try_plan({target, value, PatchMode::downstream_replay});
    violations = std::min(violations, with_patch);

    // Feedback: targets whose mutations sail close to satisfaction get
    // probed more; noisy targets decay.
    double f = violations == 0 ? 1.5 : violations <= 2 ? 1.15 : 0.9;
    weight[ti] = std::clamp(weight[ti] * f, 0.05, 64.0);
  }

  // Independent verification pass: drop anything that does not reproduce.
  std::vector<SoundnessFinding> verified;
  for (SoundnessFinding& f : findings) {
    Witness mutated = mutate_witness(circuit, honest, f.plan);
    if (!mock_prove_serial(circuit, mutated).satisfied) continue;
    bool inputs_intact = true;
    for (SignalId s : circuit.inputs())
      if (mutated.values[s] != honest.values[s]) inputs_intact = false;
    auto outs = read_outputs(circuit, mutated);
    bool diverges = false;
    for (const auto& [name, hv] : honest_outputs)
      if (outs.at(name) != hv) diverges = true;
    if (inputs_intact && diverges) verified.push_back(std::move(f));
  }
  return verified;
}

}  // namespace circfuzz
