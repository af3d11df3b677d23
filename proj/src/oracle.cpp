#include "circfuzz/oracle.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "circfuzz/circuit_json.hpp"
#include "circfuzz/errors.hpp"

namespace circfuzz {

using ordered_json = nlohmann::ordered_json;

const char* input_label_name(InputLabel l) {
  switch (l) {
    case InputLabel::expected_valid: return "expected_valid";
    case InputLabel::expected_invalid: return "expected_invalid";
    case InputLabel::not_applicable: return "n/a";
  }
  return "?";
}

const char* oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::spec_based: return "spec_based";
    case OracleKind::differential: return "differential";
    case OracleKind::invariant: return "invariant";
  }
  return "?";
}

namespace {

std::string violation_summary(const std::vector<Violation>& vs) {
  if (vs.empty()) return "no violation recorded";
  std::ostringstream out;
  out << "violated: " << vs.front().label;
  if (vs.size() > 1) out << " (+" << vs.size() - 1 << " more)";
  return out.str();
}

std::string failure_site(const Observation& obs) {
  if (!obs.violations.empty()) return obs.violations.front().label;
  return "witness generation";
}

std::string failure_detail(const Observation& obs) {
  if (!obs.witgen_ok) return "witness generation failed: " + obs.witgen_error;
  return violation_summary(obs.violations);
}

BugReport base_report(const Observation& obs) {
  BugReport r;
  r.circuit_hash = obs.circuit_hash;
  r.regex = obs.regex;
  if (obs.input_bytes) {
    r.string_b64 = base64_encode(*obs.input_bytes);
    r.input_length = obs.input_bytes->size();
  }
  r.injection = obs.injection;
  r.injection_site_index = obs.injection_site_index;
  r.injection_site = obs.injection_site;
  r.injection_signal = obs.injection_signal;
  r.injection_expected = obs.injection_expected;
  r.fixture = obs.fixture;
  r.fixture_a = obs.fixture_a;
  r.fixture_b = obs.fixture_b;
  for (const auto& [name, value] : obs.inputs) r.inputs_dec[name] = value.decimal();
  r.alphabet_lo = obs.alphabet_lo;
  r.alphabet_hi = obs.alphabet_hi;
  r.modulus_dec = obs.modulus_dec;
  r.seed = obs.seed;
  r.first_seen_iteration = obs.iteration;
  return r;
}

void finish_id(BugReport& r) {
  std::ostringstream key;
  const char sep = '\x1f';
  key << r.circuit_hash << sep << category_name(r.category) << sep
      << oracle_kind_name(r.oracle) << sep << r.site << sep << r.evidence_tag << sep
      << (r.regex ? *r.regex : "") << sep << (r.string_b64 ? *r.string_b64 : "") << sep
      << r.injection << sep << r.fixture << sep;
  for (const auto& [name, value] : r.inputs_dec) key << name << '=' << value << sep;
  if (r.witness_delta) {
    key << r.witness_delta->signal << sep << r.witness_delta->value_dec << sep
        << patch_mode_name(r.witness_delta->patch);
  }
  r.id = sha256_hex(key.str()).substr(0, 16);
}

bool honest_run_clean(const Observation& obs) {
  return obs.witgen_ok && obs.satisfied && *obs.satisfied;
}

}  // namespace

std::optional<BugReport> classify(const Observation& obs) {
  // Regex observations always carry a by-construction label; fixture inputs
  // are honest-user inputs and arrive labeled expected_valid.
  if (obs.regex.has_value() && obs.label == InputLabel::not_applicable)
    throw CircuitError("regex observation is missing its input label");

  const bool honest_failed =
      !obs.witgen_ok || (obs.satisfied && !*obs.satisfied);

  // 1. A valid input must go through cleanly.
  if (obs.label == InputLabel::expected_valid && honest_failed) {
    BugReport r = base_report(obs);
    r.category = BugCategory::completeness;
    r.oracle = OracleKind::spec_based;
    r.site = failure_site(obs);
    r.evidence = "expected-valid input has no satisfying witness; " + failure_detail(obs);
    finish_id(r);
    return r;
  }

  // 2. Clean run, wrong answer.
  if (honest_run_clean(obs)) {
    if (obs.reference_verdict) {
      auto it = obs.outputs.find("accept");
      if (it == obs.outputs.end())
        throw CircuitError("reference verdict present but circuit has no accept output");
      const FieldElement& accept = it->second;
      const bool accept_bool = !accept.is_zero();
      const bool boolean_range = accept.value() <= 1;
      if (!boolean_range || accept_bool != *obs.reference_verdict) {
        BugReport r = base_report(obs);
        r.category = BugCategory::correctness;
        r.oracle = OracleKind::differential;
        r.site = "accept";
        r.evidence = "accept = " + accept.decimal() + " but the reference matcher says " +
                     (*obs.reference_verdict ? "accept" : "reject");
        finish_id(r);
        return r;
      }
    }
    for (const auto& [name, expected] : obs.reference_outputs) {
      auto it = obs.outputs.find(name);
      if (it == obs.outputs.end())
        throw CircuitError("reference output " + name + " missing from circuit outputs");
      if (!(it->second == expected)) {
        BugReport r = base_report(obs);
        r.category = BugCategory::correctness;
        r.oracle = OracleKind::differential;
        r.site = name;
        r.evidence = "output " + name + " = " + it->second.decimal() +
                     ", reference computes " + expected.decimal();
        finish_id(r);
        return r;
      }
    }
  }

  // 3. This encoding computes rejection instead of proving it, so an
  // expected-invalid input must still satisfy the system (with accept = 0).
  // An unsatisfiable run here is a defect in the produced constraints.
  if (obs.label == InputLabel::expected_invalid && honest_failed) {
    BugReport r = base_report(obs);
    r.category = BugCategory::correctness;
    r.oracle = OracleKind::spec_based;
    r.site = failure_site(obs);
    r.evidence_tag = "unexpected-unsat";
    r.evidence =
        "expected-invalid input should evaluate to accept = 0 but the system is "
        "unsatisfiable; " +
        failure_detail(obs);
    finish_id(r);
    return r;
  }

  // 4. A mutated witness that still satisfies everything while moving an output.
  if (!obs.findings.empty()) {
    const SoundnessFinding& f = obs.findings.front();
    BugReport r = base_report(obs);
    r.category = BugCategory::soundness;
    r.oracle = OracleKind::invariant;
    r.site = f.target_name;
    WitnessDelta delta;
    delta.signal = f.target_name;
    delta.value_dec = f.plan.new_value.decimal();
    delta.patch = f.plan.patch;
    for (const OutputDiff& d : f.diffs)
      delta.diffs.push_back({d.name, d.honest.decimal(), d.mutated.decimal()});
    std::ostringstream ev;
    ev << "setting " << f.target_name << " = " << delta.value_dec;
    if (f.plan.patch == PatchMode::downstream_replay) ev << " (downstream replayed)";
    ev << " keeps every constraint satisfied but moves";
    for (std::size_t i = 0; i < f.diffs.size(); ++i) {
      const OutputDiff& d = f.diffs[i];
      ev << (i == 0 ? " " : ", ") << d.name << ": " << d.honest.decimal() << " -> "
         << d.mutated.decimal();
    }
    if (obs.reference_verdict) {
      // The mutated accept bit contradicting the reference matcher is a
      // reference contradiction, not just internal divergence.
      for (const OutputDiff& d : f.diffs) {
        if (d.name != "accept") continue;
        if (!d.mutated.is_zero() != *obs.reference_verdict)
          r.oracle = OracleKind::differential;
      }
    }
    r.witness_delta = delta;
    r.evidence = ev.str();
    finish_id(r);
    return r;
  }

  return std::nullopt;
}

std::vector<BugReport> dedupe(std::vector<BugReport> reports) {
  std::vector<BugReport> out;
  std::map<std::tuple<std::string, BugCategory, std::string>, std::size_t> index;
  for (BugReport& r : reports) {
    auto key = std::make_tuple(r.circuit_hash, r.category, r.site);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.size());
      out.push_back(std::move(r));
    } else {
      BugReport& kept = out[it->second];
      kept.duplicates += 1 + r.duplicates;
      kept.first_seen_iteration = std::min(kept.first_seen_iteration, r.first_seen_iteration);
    }
  }
  return out;
}

std::string report_to_json(const BugReport& report) {
  ordered_json j;
  j["id"] = report.id;
  j["category"] = category_name(report.category);
  j["oracle"] = oracle_kind_name(report.oracle);
  j["circuit_hash"] = report.circuit_hash;
  ordered_json rep;
  if (report.regex) {
    rep["regex"] = *report.regex;
    rep["alphabet"] = ordered_json::array({report.alphabet_lo, report.alphabet_hi});
  }
  if (report.string_b64) rep["string_b64"] = *report.string_b64;
  if (report.input_length) rep["input_length"] = *report.input_length;
  if (!report.injection.empty()) {
    ordered_json inj;
    inj["kind"] = report.injection;
    inj["site_index"] = report.injection_site_index;
    inj["site"] = report.injection_site;
    if (!report.injection_signal.empty()) inj["signal"] = report.injection_signal;
    inj["expected"] = report.injection_expected;
    rep["injection"] = inj;
  }
  if (!report.fixture.empty()) {
    rep["fixture"] = report.fixture;
    ordered_json params;
    params["a"] = report.fixture_a;
    params["b"] = report.fixture_b;
    rep["fixture_params"] = params;
  }
  if (!report.inputs_dec.empty()) {
    ordered_json in;
    for (const auto& [name, value] : report.inputs_dec) in[name] = value;
    rep["inputs"] = in;
  }
  if (!report.modulus_dec.empty()) rep["modulus"] = report.modulus_dec;
  rep["seed"] = report.seed;
  if (report.witness_delta) {
    ordered_json d;
    d["signal"] = report.witness_delta->signal;
    d["value"] = report.witness_delta->value_dec;
    d["patch"] = patch_mode_name(report.witness_delta->patch);
    ordered_json diffs = ordered_json::array();
    for (const WitnessDeltaDiff& od : report.witness_delta->diffs) {
      ordered_json e;
      e["output"] = od.output;
      e["honest"] = od.honest;
      e["mutated"] = od.mutated;
      diffs.push_back(e);
    }
    d["diffs"] = diffs;
    rep["witness_delta"] = d;
  }
  j["reproducer"] = rep;
  ordered_json ev;
  ev["site"] = report.site;
  ev["detail"] = report.evidence;
  if (!report.evidence_tag.empty()) ev["tag"] = report.evidence_tag;
  j["evidence"] = ev;
  j["first_seen_iteration"] = report.first_seen_iteration;
  j["duplicates"] = report.duplicates;
  return j.dump(2);
}

BugReport report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad report json: ") + e.what(), 0);
  }
  try {
    BugReport r;
    r.id = j.at("id").get<std::string>();
    const std::string cat = j.at("category").get<std::string>();
    auto parsed_cat = category_from_name(cat);
    if (!parsed_cat) throw ParseError("unknown bug category " + cat, 0);
    r.category = *parsed_cat;
    const std::string oracle = j.at("oracle").get<std::string>();
    if (oracle == "spec_based") r.oracle = OracleKind::spec_based;
    else if (oracle == "differential") r.oracle = OracleKind::differential;
    else if (oracle == "invariant") r.oracle = OracleKind::invariant;
    else throw ParseError("unknown oracle kind " + oracle, 0);
    r.circuit_hash = j.at("circuit_hash").get<std::string>();
    const ordered_json& rep = j.at("reproducer");
    if (rep.contains("regex")) r.regex = rep.at("regex").get<std::string>();
    if (rep.contains("alphabet")) {
      const ordered_json& a = rep.at("alphabet");
      if (!a.is_array() || a.size() != 2) throw ParseError("reproducer alphabet must be [lo, hi]", 0);
      r.alphabet_lo = static_cast<std::uint8_t>(a[0].get<unsigned>());
      r.alphabet_hi = static_cast<std::uint8_t>(a[1].get<unsigned>());
    }
    if (rep.contains("string_b64")) r.string_b64 = rep.at("string_b64").get<std::string>();
    if (rep.contains("input_length")) r.input_length = rep.at("input_length").get<std::size_t>();
    if (rep.contains("injection")) {
      const ordered_json& inj = rep.at("injection");
      r.injection = inj.at("kind").get<std::string>();
      r.injection_site_index = inj.at("site_index").get<std::uint64_t>();
      r.injection_site = inj.value("site", std::string());
      r.injection_signal = inj.value("signal", std::string());
      r.injection_expected = inj.value("expected", std::string());
    }
    if (rep.contains("fixture")) {
      r.fixture = rep.at("fixture").get<std::string>();
      if (rep.contains("fixture_params")) {
        r.fixture_a = rep.at("fixture_params").value("a", std::string());
        r.fixture_b = rep.at("fixture_params").value("b", std::string());
      }
    }
    if (rep.contains("inputs"))
      for (const auto& [name, value] : rep.at("inputs").items())
        r.inputs_dec[name] = value.get<std::string>();
    r.modulus_dec = rep.value("modulus", std::string());
    r.seed = rep.at("seed").get<std::uint64_t>();
    if (rep.contains("witness_delta")) {
      const ordered_json& d = rep.at("witness_delta");
      WitnessDelta delta;
      delta.signal = d.at("signal").get<std::string>();
      delta.value_dec = d.at("value").get<std::string>();
      const std::string patch = d.at("patch").get<std::string>();
      if (patch == "none") delta.patch = PatchMode::none;
      else if (patch == "downstream_replay") delta.patch = PatchMode::downstream_replay;
      else throw ParseError("unknown patch mode " + patch, 0);
      if (d.contains("diffs"))
        for (const ordered_json& e : d.at("diffs"))
          delta.diffs.push_back({e.at("output").get<std::string>(),
                                 e.at("honest").get<std::string>(),
                                 e.at("mutated").get<std::string>()});
      r.witness_delta = delta;
    }
    const ordered_json& ev = j.at("evidence");
    r.site = ev.at("site").get<std::string>();
    r.evidence = ev.at("detail").get<std::string>();
    r.evidence_tag = ev.value("tag", std::string());
    r.first_seen_iteration = j.at("first_seen_iteration").get<std::uint64_t>();
    r.duplicates = j.at("duplicates").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report json missing fields: ") + e.what(), 0);
  }
}

}  // namespace circfuzz
