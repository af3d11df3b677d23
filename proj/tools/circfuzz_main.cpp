#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "circfuzz/campaign.hpp"
#include "circfuzz/circuit_json.hpp"
#include "circfuzz/errors.hpp"
#include "circfuzz/fixtures.hpp"
#include "circfuzz/regex.hpp"
#include "circfuzz/replay.hpp"
#include "circfuzz/transpiler.hpp"
#include "circfuzz/util.hpp"

namespace {

using namespace circfuzz;

constexpr int kExitClean = 0;
constexpr int kExitBugs = 1;
constexpr int kExitUsage = 2;

// "a-z", "32-126", or a bare two-character form like "az".
void parse_alphabet_flag(const std::string& s, CampaignConfig& cfg) {
  auto parse_side = [](const std::string& part) -> int {
    if (part.size() == 1 && !std::isdigit(static_cast<unsigned char>(part[0])))
      return static_cast<unsigned char>(part[0]);
    try {
      std::size_t used = 0;
      int v = std::stoi(part, &used);
      if (used == part.size() && v >= 0 && v <= 255) return v;
    } catch (...) {
    }
    if (part.size() == 1) return static_cast<unsigned char>(part[0]);
    return -1;
  };
  std::string lo_part, hi_part;
  std::size_t dash = s.find('-', 1);  // allow '-' as the lo character itself
  if (dash != std::string::npos && dash + 1 < s.size()) {
    lo_part = s.substr(0, dash);
    hi_part = s.substr(dash + 1);
  } else if (s.size() == 2) {
    lo_part = s.substr(0, 1);
    hi_part = s.substr(1, 1);
  } else {
    throw ConfigError("alphabet flag wants LO-HI (characters or byte values)");
  }
  int lo = parse_side(lo_part), hi = parse_side(hi_part);
  if (lo < 0 || hi < 0 || lo > hi)
    throw ConfigError("cannot read alphabet range \"" + s + "\"");
  cfg.alphabet_lo = static_cast<std::uint8_t>(lo);
  cfg.alphabet_hi = static_cast<std::uint8_t>(hi);
}

// "kind" or "kind:site_index".
BugInjection parse_injection_flag(const std::string& s) {
  std::string kind = s;
  std::uint64_t site = 0;
  std::size_t colon = s.find(':');
  if (colon != std::string::npos) {
    kind = s.substr(0, colon);
    try {
      site = std::stoull(s.substr(colon + 1));
    } catch (...) {
      throw ConfigError("injection site index must be an integer: " + s);
    }
  }
  auto parsed = injection_kind_from_name(kind);
  if (!parsed) {
    std::string known;
    for (InjectionKind k : all_injection_kinds()) {
      if (!known.empty()) known += ", ";
      known += injection_kind_name(k);
    }
    throw ConfigError("unknown injection kind \"" + kind + "\" (known: " + known + ")");
  }
  return BugInjection{*parsed, site};
}

void write_or_print(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    if (content.empty() || content.back() != '\n') std::cout << '\n';
  } else {
    write_file(out_path, content);
    std::cerr << "wrote " << out_path << "\n";
  }
}

int finish_campaign(const CampaignResult& result) {
  std::cerr << "iterations: " << result.stats.iterations
            << ", witnesses: " << result.stats.witnesses_generated
            << ", mock proofs: " << result.stats.mock_proofs
            << ", errors: " << result.stats.errors << "\n";
  if (result.reports.empty()) {
    std::cerr << "no bugs found\n";
    return kExitClean;
  }
  std::cerr << result.reports.size() << " report(s):\n";
  for (const BugReport& r : result.reports)
    std::cerr << "  [" << category_name(r.category) << "] " << r.id << " at " << r.site
              << " (" << oracle_kind_name(r.oracle) << ")\n";
  return kExitBugs;
}

Circuit load_witness_circuit(const CampaignConfig& cfg) {
  if (!cfg.fixture.empty()) {
    auto kind = fixture_kind_from_name(cfg.fixture);
    if (!kind) throw ConfigError("unknown fixture \"" + cfg.fixture + "\"");
    FixtureParams params;
    params.a = cfg.fixture_a;
    params.b = cfg.fixture_b;
    return make_fixture(*kind, FieldModulus::create(cfg.modulus_dec), params);
  }
  return parse_circuit(read_file(cfg.circuit_path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circfuzz: differential fuzzing workbench for regex circuits"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed_flag = 0;
  int workers_flag = 0;
  app.add_option("--config", config_path, "campaign config JSON (flags override it)");
  auto* seed_opt = app.add_option("--seed", seed_flag, "campaign seed");
  auto* workers_opt = app.add_option("--workers", workers_flag, "worker thread count");

  // fixture
  auto* fixture_cmd = app.add_subcommand("fixture", "emit a known-answer circuit");
  std::string fixture_name, fixture_out, fixture_modulus, fixture_a = "5", fixture_b = "7";
  bool fixture_list = false;
  fixture_cmd->add_option("name", fixture_name, "fixture name");
  fixture_cmd->add_flag("--list", fixture_list, "list fixture names");
  fixture_cmd->add_option("--modulus", fixture_modulus, "prime modulus (decimal)");
  fixture_cmd->add_option("--param-a", fixture_a, "curve parameter A");
  fixture_cmd->add_option("--param-b", fixture_b, "curve parameter B");
  fixture_cmd->add_option("-o,--out", fixture_out, "output file (default stdout)");

  // transpile
  auto* transpile_cmd = app.add_subcommand("transpile", "compile a regex to a circuit");
  std::string tr_regex, tr_alphabet, tr_modulus, tr_inject, tr_out;
  std::size_t tr_length = 0;
  std::size_t tr_cap = kDefaultDfaStateCap;
  transpile_cmd->add_option("--regex", tr_regex, "pattern")->required();
  transpile_cmd->add_option("--length", tr_length, "input length in bytes")->required();
  transpile_cmd->add_option("--alphabet", tr_alphabet, "byte range LO-HI (default 32-126)");
  transpile_cmd->add_option("--modulus", tr_modulus, "prime modulus (decimal)");
  transpile_cmd->add_option("--inject", tr_inject, "bug injection kind[:site_index]");
  transpile_cmd->add_option("--dfa-cap", tr_cap, "DFA state cap");
  transpile_cmd->add_option("-o,--out", tr_out, "output file (default stdout)");

  // shared campaign flags builder
  auto add_campaign_flags = [](CLI::App* cmd, auto& flags) {
    cmd->add_option("--iterations", flags.iterations, "iteration budget");
    cmd->add_option("--wall-seconds", flags.wall, "wall-clock budget in seconds");
    cmd->add_option("--outdir", flags.outdir, "report bundle directory");
    cmd->add_option("--modulus", flags.modulus, "prime modulus (decimal)");
    cmd->add_option("--probe-budget", flags.probe, "soundness probe iterations per witness");
    cmd->add_flag("--stop-on-report", flags.stop, "stop once a report lands");
  };
  struct {
    std::uint64_t iterations = 0;
    double wall = -1;
    std::string outdir, modulus;
    std::int64_t probe = -1;
    bool stop = false;
  } fr_flags, fw_flags, run_flags;

  // fuzz-regex
  auto* fr_cmd = app.add_subcommand("fuzz-regex", "grammar/corpus regex campaign");
  std::string fr_grammar, fr_corpus, fr_alphabet, fr_inject, fr_reference;
  std::size_t fr_max_len = 0, fr_valid = 0, fr_invalid = 0;
  fr_cmd->add_option("--grammar", fr_grammar, "BNF grammar file");
  fr_cmd->add_option("--corpus", fr_corpus, "seed pattern file");
  fr_cmd->add_option("--alphabet", fr_alphabet, "byte range LO-HI");
  fr_cmd->add_option("--max-len", fr_max_len, "string length cap");
  fr_cmd->add_option("--valid", fr_valid, "accepted strings per pattern");
  fr_cmd->add_option("--invalid", fr_invalid, "rejected strings per pattern");
  fr_cmd->add_option("--inject", fr_inject, "bug injection kind[:site_index]");
  fr_cmd->add_option("--reference", fr_reference, "reference matcher (builtin or a command)");
  add_campaign_flags(fr_cmd, fr_flags);

  // fuzz-witness
  auto* fw_cmd = app.add_subcommand("fuzz-witness", "witness mutation campaign on one circuit");
  std::string fw_fixture, fw_circuit, fw_inputs, fw_a, fw_b;
  std::uint64_t fw_generate = 0;
  fw_cmd->add_option("--fixture", fw_fixture, "fixture name");
  fw_cmd->add_option("--circuit", fw_circuit, "serialized circuit file");
  fw_cmd->add_option("--inputs", fw_inputs, "JSON input assignment(s)");
  fw_cmd->add_option("--generate", fw_generate, "random input assignments to draw");
  fw_cmd->add_option("--param-a", fw_a, "curve parameter A");
  fw_cmd->add_option("--param-b", fw_b, "curve parameter B");
  add_campaign_flags(fw_cmd, fw_flags);

  // run
  auto* run_cmd = app.add_subcommand("run", "run the campaign described by --config");
  add_campaign_flags(run_cmd, run_flags);

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "re-execute a bug reproducer");
  std::string rp_file, rp_reference, rp_circuit;
  replay_cmd->add_option("reproducer", rp_file, "reproducer JSON file")->required();
  replay_cmd->add_option("--reference", rp_reference, "reference matcher");
  replay_cmd->add_option("--circuit", rp_circuit, "circuit file for ad-hoc witness reports");

  // report
  auto* report_cmd = app.add_subcommand("report", "summarize a report bundle");
  std::string rep_dir;
  report_cmd->add_option("outdir", rep_dir, "bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitClean : kExitUsage;  // --help exits 0
  }

  try {
    CampaignConfig cfg;
    if (!config_path.empty()) cfg = load_campaign_config(config_path);
    apply_env_seed(cfg);
    if (seed_opt->count() > 0) cfg.seed = seed_flag;
    if (workers_opt->count() > 0) cfg.workers = workers_flag;

    auto apply_shared = [&](auto& flags) {
      if (flags.iterations > 0) cfg.iterations = flags.iterations;
      if (flags.wall >= 0) cfg.wall_seconds = flags.wall;
      if (!flags.outdir.empty()) cfg.outdir = flags.outdir;
      if (!flags.modulus.empty()) cfg.modulus_dec = flags.modulus;
      if (flags.probe >= 0) cfg.probe_budget = static_cast<std::size_t>(flags.probe);
      if (flags.stop) cfg.stop_on_report = true;
    };

    if (fixture_cmd->parsed()) {
      if (fixture_list) {
        for (FixtureKind k : all_fixture_kinds()) std::cout << fixture_kind_name(k) << "\n";
        return kExitClean;
      }
      if (fixture_name.empty()) throw ConfigError("fixture name required (or --list)");
      auto kind = fixture_kind_from_name(fixture_name);
      if (!kind) throw ConfigError("unknown fixture \"" + fixture_name + "\"");
      ModulusPtr mod =
          FieldModulus::create(fixture_modulus.empty() ? cfg.modulus_dec : fixture_modulus);
      FixtureParams params;
      params.a = fixture_a;
      params.b = fixture_b;
      write_or_print(fixture_out, serialize_circuit(make_fixture(*kind, mod, params)));
      return kExitClean;
    }

    if (transpile_cmd->parsed()) {
      if (!tr_alphabet.empty()) parse_alphabet_flag(tr_alphabet, cfg);
      ModulusPtr mod = FieldModulus::create(tr_modulus.empty() ? cfg.modulus_dec : tr_modulus);
      RegexAst ast = parse_regex(tr_regex, cfg.alphabet());
      Dfa dfa = determinize(build_nfa(ast, cfg.alphabet()), tr_cap);
      TranspileSpec spec;
      spec.dfa = dfa;
      spec.input_length = tr_length;
      spec.max_length = std::max<std::size_t>(tr_length, 64);
      spec.max_states = tr_cap;
      std::map<std::string, std::string> meta{{"regex", tr_regex}};
      Circuit circuit;
      if (!tr_inject.empty()) {
        BugInjection injection = parse_injection_flag(tr_inject);
        InjectionResult injected = inject_bug(spec, injection, mod, std::move(meta));
        std::cerr << "injected " << injection_kind_name(injection.kind) << " at "
                  << injected.site << " (expected " << category_name(injected.expected)
                  << ")\n";
        circuit = std::move(injected.circuit);
      } else {
        circuit = transpile(spec, mod, std::move(meta));
      }
      write_or_print(tr_out, serialize_circuit(circuit));
      return kExitClean;
    }

    if (fr_cmd->parsed()) {
      cfg.mode = "regex";
      if (!fr_grammar.empty()) cfg.grammar_path = fr_grammar;
      if (!fr_corpus.empty()) cfg.corpus_path = fr_corpus;
      if (!fr_alphabet.empty()) parse_alphabet_flag(fr_alphabet, cfg);
      if (fr_max_len > 0) cfg.max_len = fr_max_len;
      if (fr_valid > 0) cfg.valid_per_regex = fr_valid;
      if (fr_invalid > 0) cfg.invalid_per_regex = fr_invalid;
      if (!fr_inject.empty()) cfg.injection = parse_injection_flag(fr_inject);
      if (!fr_reference.empty()) cfg.reference = fr_reference;
      apply_shared(fr_flags);
      return finish_campaign(run_regex_campaign(cfg));
    }

    if (fw_cmd->parsed()) {
      cfg.mode = "witness";
      cfg.iterations = 0;  // assignments bound the run; --iterations restores a cap
      if (!fw_fixture.empty()) cfg.fixture = fw_fixture;
      if (!fw_circuit.empty()) cfg.circuit_path = fw_circuit;
      if (!fw_inputs.empty()) cfg.inputs_path = fw_inputs;
      if (fw_generate > 0) cfg.generate_inputs = fw_generate;
      if (!fw_a.empty()) cfg.fixture_a = fw_a;
      if (!fw_b.empty()) cfg.fixture_b = fw_b;
      apply_shared(fw_flags);
      if (fw_cmd->count("--probe-budget") == 0 && cfg.probe_budget == 0)
        cfg.probe_budget = 1000;
      validate_witness_config(cfg);
      return finish_campaign(run_witness_campaign(cfg, load_witness_circuit(cfg)));
    }

    if (run_cmd->parsed()) {
      if (config_path.empty()) throw ConfigError("run needs --config");
      apply_shared(run_flags);
      if (cfg.mode == "witness") {
        validate_witness_config(cfg);
        return finish_campaign(run_witness_campaign(cfg, load_witness_circuit(cfg)));
      }
      return finish_campaign(run_regex_campaign(cfg));
    }

    if (replay_cmd->parsed()) {
      BugReport report = report_from_json(read_file(rp_file));
      Circuit override_circuit;
      const Circuit* override_ptr = nullptr;
      if (!rp_circuit.empty()) {
        override_circuit = parse_circuit(read_file(rp_circuit));
        override_ptr = &override_circuit;
      }
      ReplayOutcome outcome = replay_report(
          report, rp_reference.empty() ? "builtin" : rp_reference, override_ptr);
      std::cout << outcome.detail << "\n";
      std::cout << (outcome.reproduced ? "REPRODUCED" : "NOT REPRODUCED") << "\n";
      return outcome.reproduced ? kExitBugs : kExitClean;
    }

    if (report_cmd->parsed()) {
      std::cout << read_file(rep_dir + "/index.md");
      return kExitClean;
    }

    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitUsage;
  }
}
