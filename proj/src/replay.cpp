#include "circfuzz/replay.hpp"

#include <sstream>

#include "circfuzz/campaign.hpp"
#include "circfuzz/circuit_json.hpp"
#include "circfuzz/errors.hpp"
#include "circfuzz/eval.hpp"
#include "circfuzz/fixtures.hpp"
#include "circfuzz/mutator.hpp"
#include "circfuzz/reference.hpp"
#include "circfuzz/transpiler.hpp"

namespace circfuzz {

namespace {

// Re-derives the soundness evidence from the recorded delta; only a delta
// that still satisfies the system, keeps inputs intact, and moves an output
// counts.
void reapply_delta(const Circuit& circuit, const Witness& honest, const BugReport& report,
                   Observation& obs) {
  const WitnessDelta& delta = *report.witness_delta;
  auto sid = circuit.find_signal(delta.signal);
  if (!sid) throw CircuitError("replay: circuit has no signal " + delta.signal);
  MutationPlan plan;
  plan.target = *sid;
  plan.new_value = FieldElement::from_decimal(delta.value_dec, circuit.modulus);
  plan.patch = delta.patch;
  Witness mutated = mutate_witness(circuit, honest, plan);
  if (!mock_prove_serial(circuit, mutated).satisfied) return;
  for (SignalId input : circuit.inputs())
    if (mutated.values[input] != honest.values[input]) return;
  auto honest_outputs = read_outputs(circuit, honest);
  auto mutated_outputs = read_outputs(circuit, mutated);
  std::vector<OutputDiff> diffs;
  for (const auto& [name, hv] : honest_outputs) {
    const FieldElement& mv = mutated_outputs.at(name);
    if (mv != hv) diffs.push_back({name, hv, mv});
  }
  if (diffs.empty()) return;
  SoundnessFinding finding;
  finding.plan = plan;
  finding.target_name = delta.signal;
  finding.honest_value = honest.values[*sid];
  finding.diffs = std::move(diffs);
  obs.findings.push_back(std::move(finding));
}

}  // namespace

ReplayOutcome replay_report(const BugReport& report, const std::string& reference_spec,
                            const Circuit* circuit_override) {
  ReplayOutcome out;
  ModulusPtr mod = FieldModulus::create(
      report.modulus_dec.empty() ? std::string(kBn254ScalarDec) : report.modulus_dec);

  Circuit rebuilt;
  const Circuit* circuit = nullptr;
  Observation obs;
  obs.seed = report.seed;
  obs.injection = report.injection;
  obs.injection_site_index = report.injection_site_index;
  obs.injection_site = report.injection_site;
  obs.injection_signal = report.injection_signal;
  obs.injection_expected = report.injection_expected;
  obs.fixture = report.fixture;
  obs.fixture_a = report.fixture_a;
  obs.fixture_b = report.fixture_b;
  obs.modulus_dec = mod->decimal();

  InputMap inputs;

  if (report.regex) {
    Alphabet alphabet;
    if (report.alphabet_lo != 0 || report.alphabet_hi != 0)
      alphabet = Alphabet{report.alphabet_lo, report.alphabet_hi};
    obs.alphabet_lo = alphabet.lo;
    obs.alphabet_hi = alphabet.hi;
    Bytes bytes;
    if (report.string_b64) bytes = base64_decode(*report.string_b64);
    const std::size_t length = report.input_length.value_or(bytes.size());
    if (length != bytes.size())
      throw CircuitError("replay: recorded input_length disagrees with the string");

    RegexAst ast = parse_regex(*report.regex, alphabet);
    Nfa nfa = build_nfa(ast, alphabet);
    Dfa dfa = determinize(nfa);

    TranspileSpec spec;
    spec.dfa = dfa;
    spec.input_length = length;
    spec.max_length = std::max<std::size_t>(length, 64);
    std::map<std::string, std::string> meta{{"regex", *report.regex}};
    if (!report.injection.empty()) {
      auto kind = injection_kind_from_name(report.injection);
      if (!kind) throw CircuitError("replay: unknown injection kind " + report.injection);
      BugInjection inj{*kind, report.injection_site_index};
      rebuilt = inject_bug(spec, inj, mod, std::move(meta)).circuit;
    } else {
      rebuilt = transpile(spec, mod, std::move(meta));
    }
    circuit = &rebuilt;

    obs.regex = report.regex;
    obs.input_bytes = bytes;
    for (std::size_t i = 0; i < bytes.size(); ++i)
      inputs["char[" + std::to_string(i) + "]"] = FieldElement::from_u64(bytes[i], mod);

    auto ref = make_reference(reference_spec, alphabet);
    const bool verdict = ref->matches(*report.regex, bytes);
    obs.reference_verdict = verdict;
    obs.label = verdict ? InputLabel::expected_valid : InputLabel::expected_invalid;
  } else if (!report.fixture.empty()) {
    auto kind = fixture_kind_from_name(report.fixture);
    if (!kind) throw CircuitError("replay: unknown fixture " + report.fixture);
    FixtureParams params;
    if (!report.fixture_a.empty()) params.a = report.fixture_a;
    if (!report.fixture_b.empty()) params.b = report.fixture_b;
    rebuilt = make_fixture(*kind, mod, params);
    circuit = &rebuilt;
    obs.label = InputLabel::expected_valid;
    for (const auto& [name, dec] : report.inputs_dec)
      inputs[name] = FieldElement::from_decimal(dec, mod);
    auto reference = fixture_reference_outputs(*kind, inputs, mod);
    if (reference) obs.reference_outputs = std::move(*reference);
  } else if (circuit_override) {
    circuit = circuit_override;
    obs.label = InputLabel::expected_valid;
    for (const auto& [name, dec] : report.inputs_dec)
      inputs[name] = FieldElement::from_decimal(dec, circuit->modulus);
  } else {
    throw CircuitError(
        "reproducer names neither a regex nor a fixture; pass the original circuit file");
  }

  obs.circuit_hash = circuit_hash(*circuit);
  out.hash_matched = obs.circuit_hash == report.circuit_hash;
  obs.inputs = inputs;

  Witness honest;
  bool wit_ok = true;
  try {
    honest = generate_witness(*circuit, inputs);
  } catch (const Error& e) {
    wit_ok = false;
    obs.witgen_ok = false;
    obs.witgen_error = e.what();
  }
  if (wit_ok) {
    MockResult proof = mock_prove_serial(*circuit, honest);
    obs.satisfied = proof.satisfied;
    obs.violations = std::move(proof.violations);
    obs.outputs = read_outputs(*circuit, honest);
    if (report.witness_delta && proof.satisfied) reapply_delta(*circuit, honest, report, obs);
  }

  auto replayed = classify(obs);
  std::ostringstream detail;
  if (!out.hash_matched)
    detail << "note: rebuilt circuit hash differs from the recorded one; ";
  if (replayed) {
    out.category = replayed->category;
    out.reproduced = replayed->category == report.category;
    detail << "replay classifies " << category_name(replayed->category) << " at "
           << replayed->site << " (recorded: " << category_name(report.category) << " at "
           << report.site << ")";
  } else {
    detail << "replay found nothing (recorded: " << category_name(report.category) << ")";
  }
  out.detail = detail.str();
  return out;
}

}  // namespace circfuzz
