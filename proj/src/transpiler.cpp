#include "circfuzz/transpiler.hpp"

#include <algorithm>
#include <cctype>

#include "circfuzz/errors.hpp"

namespace circfuzz {

std::size_t DfaEdge::byte_count() const {
  std::size_t n = 0;
  for (const ByteRange& r : ranges) n += r.hi - r.lo + 1;
  return n;
}

bool DfaEdge::contains(std::uint8_t b) const {
  for (const ByteRange& r : ranges)
    if (b >= r.lo && b <= r.hi) return true;
  return false;
}

std::vector<DfaEdge> dfa_edges(const Dfa& dfa) {
  const std::size_t asize = dfa.alphabet.size();
  std::vector<DfaEdge> out;
  for (std::uint32_t q = 0; q < dfa.n_states; ++q) {
    std::map<std::uint32_t, std::vector<ByteRange>> by_target;
    for (std::size_t bi = 0; bi < asize; ++bi) {
      std::uint32_t to = dfa.transitions[q * asize + bi];
      std::uint8_t byte = dfa.alphabet.byte_at(bi);
      auto& ranges = by_target[to];
      if (!ranges.empty() && ranges.back().hi + 1 == byte)
        ranges.back().hi = byte;
      else
        ranges.push_back({byte, byte});
    }
    for (auto& [to, ranges] : by_target) out.push_back({q, to, std::move(ranges)});
  }
  return out;
}

std::size_t transpile_constraint_count(std::size_t states, std::size_t alphabet_size,
                                       std::size_t input_length, std::size_t edges) {
  return states + input_length * (2 * alphabet_size + 1) + input_length * edges +
         2 * input_length * states + 1;
}

const char* injection_kind_name(InjectionKind k) {
  switch (k) {
    case InjectionKind::drop_booleanity: return "drop_booleanity";
    case InjectionKind::drop_transition: return "drop_transition";
    case InjectionKind::flip_accept_state: return "flip_accept_state";
    case InjectionKind::class_off_by_one: return "class_off_by_one";
    case InjectionKind::hint_unconstrained: return "hint_unconstrained";
  }
  return "?";
}

std::optional<InjectionKind> injection_kind_from_name(const std::string& s) {
  for (InjectionKind k : all_injection_kinds())
    if (s == injection_kind_name(k)) return k;
  return std::nullopt;
}

std::vector<InjectionKind> all_injection_kinds() {
  return {InjectionKind::drop_booleanity, InjectionKind::drop_transition,
          InjectionKind::flip_accept_state, InjectionKind::class_off_by_one,
          InjectionKind::hint_unconstrained};
}

namespace {

std::string idx2(const char* base, std::size_t i, std::size_t j) {
  return std::string(base) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

struct Wiring {
  std::size_t constraint_idx = 0;
  std::size_t instr_idx = 0;
};

struct BuildDetail {
  Circuit circuit;
  std::vector<DfaEdge> edges;
  std::vector<std::vector<SignalId>> eq_out;  // [i][byte index]
  std::vector<std::vector<SignalId>> s_sig;   // [i][q]
  std::vector<std::vector<Wiring>> state_wiring;  // [i-1][q], wiring of s[i][q]
  std::vector<std::vector<Wiring>> t_wiring;      // [i][e]
  std::vector<std::vector<std::size_t>> bool_constraint;  // [i-1][q]
  std::vector<std::vector<std::size_t>> bool_instr;
  Wiring accept_wiring;
  // reach[i][q]: q reachable from start in exactly i steps;
  // co[i][q]: an accepting state reachable from q in exactly n-i steps.
  std::vector<std::vector<char>> reach, co;
};

BuildDetail build_circuit(const TranspileSpec& spec, ModulusPtr mod,
                          std::map<std::string, std::string> metadata) {
  const Dfa& dfa = spec.dfa;
  const std::size_t n = spec.input_length;
  const std::size_t S = dfa.n_states;
  const std::size_t A = dfa.alphabet.size();
  if (n > spec.max_length)
    throw ResourceError("input length " + std::to_string(n) + " exceeds cap " +
                        std::to_string(spec.max_length));
  if (S == 0) throw CircuitError("dfa has no states");
  if (S > spec.max_states)
    throw ResourceError("dfa has " + std::to_string(S) + " states, cap " +
                        std::to_string(spec.max_states));

  BuildDetail d;
  d.edges = dfa_edges(dfa);
  const std::size_t E = d.edges.size();

  CircuitBuilder b(std::move(mod));

  std::vector<SignalId> chars(n);
  for (std::size_t i = 0; i < n; ++i)
    chars[i] = b.add_input("char[" + std::to_string(i) + "]");

  d.s_sig.assign(n + 1, std::vector<SignalId>(S, 0));
  for (std::size_t q = 0; q < S; ++q) {
    SignalId id = b.add_internal(idx2("s", 0, q));
    b.assign_and_constrain(id, Expr::cst(b.fe(q == dfa.start ? 1 : 0)));
    d.s_sig[0][q] = id;
  }

  d.eq_out.assign(n, std::vector<SignalId>(A, 0));
  d.t_wiring.assign(n, std::vector<Wiring>(E));
  d.state_wiring.assign(n, std::vector<Wiring>(S));
  d.bool_constraint.assign(n, std::vector<std::size_t>(S, 0));
  d.bool_instr.assign(n, std::vector<std::size_t>(S, 0));

  std::vector<std::vector<SignalId>> t_sig(n, std::vector<SignalId>(E, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t bi = 0; bi < A; ++bi) {
      std::uint8_t byte = dfa.alphabet.byte_at(bi);
      d.eq_out[i][bi] = b.iszero(
          Expr::sub(Expr::sig(chars[i]), Expr::cst(b.fe(byte))), idx2("eq", i, byte));
    }

    std::vector<Expr> outs;
    outs.reserve(A);
    for (std::size_t bi = 0; bi < A; ++bi) outs.push_back(Expr::sig(d.eq_out[i][bi]));
    b.constrain(Expr::add(std::move(outs)), Expr::cst(b.fe(1)),
                "char[" + std::to_string(i) + "] range");

    for (std::size_t e = 0; e < E; ++e) {
      const DfaEdge& edge = d.edges[e];
      std::vector<Expr> terms;
      for (const ByteRange& r : edge.ranges)
        for (int byte = r.lo; byte <= r.hi; ++byte)
          terms.push_back(Expr::sig(d.eq_out[i][dfa.alphabet.index_of(
              static_cast<std::uint8_t>(byte))]));
      SignalId tid = b.add_internal(idx2("t", i, e));
      t_sig[i][e] = tid;
      d.t_wiring[i][e] = {b.n_constraints(), b.n_instructions()};
      b.assign_and_constrain(
          tid, Expr::mul(Expr::sig(d.s_sig[i][edge.from]), Expr::add(std::move(terms))));
    }

    for (std::size_t q = 0; q < S; ++q) {
      std::vector<Expr> incoming;
      for (std::size_t e = 0; e < E; ++e)
        if (d.edges[e].to == q) incoming.push_back(Expr::sig(t_sig[i][e]));
      SignalId id = b.add_internal(idx2("s", i + 1, q));
      d.s_sig[i + 1][q] = id;
      d.state_wiring[i][q] = {b.n_constraints(), b.n_instructions()};
      b.assign_and_constrain(id, incoming.empty() ? Expr::cst(b.fe(0))
                                                  : Expr::add(std::move(incoming)));
    }

    for (std::size_t q = 0; q < S; ++q) {
      SignalId id = d.s_sig[i + 1][q];
      d.bool_constraint[i][q] = b.n_constraints();
      d.bool_instr[i][q] = b.n_instructions();
      b.constrain(
          Expr::mul(Expr::sig(id), Expr::sub(Expr::sig(id), Expr::cst(b.fe(1)))),
          Expr::cst(b.fe(0)), idx2("s", i + 1, q) + " boolean");
    }
  }

  SignalId accept = b.add_output("accept");
  std::vector<Expr> acc_terms;
  for (std::size_t q = 0; q < S; ++q)
    if (dfa.accepting[q]) acc_terms.push_back(Expr::sig(d.s_sig[n][q]));
  d.accept_wiring = {b.n_constraints(), b.n_instructions()};
  b.assign_and_constrain(accept,
                         acc_terms.empty() ? Expr::cst(b.fe(0))
                                           : Expr::add(std::move(acc_terms)),
                         "accept wiring");

  metadata["input_length"] = std::to_string(n);
  metadata["dfa_states"] = std::to_string(S);
  metadata["dfa_edges"] = std::to_string(E);
  metadata["alphabet_lo"] = std::to_string(dfa.alphabet.lo);
  metadata["alphabet_hi"] = std::to_string(dfa.alphabet.hi);
  d.circuit = b.take(std::move(metadata));

  d.reach.assign(n + 1, std::vector<char>(S, 0));
  d.reach[0][dfa.start] = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t q = 0; q < S; ++q)
      if (d.reach[i][q])
        for (std::size_t bi = 0; bi < A; ++bi)
          d.reach[i + 1][dfa.transitions[q * A + bi]] = 1;

  d.co.assign(n + 1, std::vector<char>(S, 0));
  for (std::size_t q = 0; q < S; ++q) d.co[n][q] = dfa.accepting[q] ? 1 : 0;
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t q = 0; q < S; ++q) {
      for (std::size_t bi = 0; bi < A && !d.co[i][q]; ++bi)
        d.co[i][q] = d.co[i + 1][dfa.transitions[q * A + bi]];
    }

  return d;
}

void drop_constraint(Circuit& c, std::size_t constraint_idx) {
  c.constraints.erase(c.constraints.begin() + static_cast<std::ptrdiff_t>(constraint_idx));
}

}  // namespace

Circuit transpile(const TranspileSpec& spec, ModulusPtr modulus,
                  std::map<std::string, std::string> metadata) {
  return build_circuit(spec, std::move(modulus), std::move(metadata)).circuit;
}

InjectionResult inject_bug(const TranspileSpec& spec, const BugInjection& injection,
                           ModulusPtr modulus,
                           std::map<std::string, std::string> metadata) {
  BuildDetail d = build_circuit(spec, std::move(modulus), std::move(metadata));
  const Dfa& dfa = spec.dfa;
  const std::size_t n = spec.input_length;
  const std::size_t S = dfa.n_states;

  auto live = [&](std::size_t i, std::uint32_t q) { return d.reach[i][q] && d.co[i][q]; };
  auto edge_live = [&](const DfaEdge& e) {
    for (std::size_t i = 0; i < n; ++i)
      if (d.reach[i][e.from] && d.co[i + 1][e.to]) return true;
    return false;
  };
  auto no_site = [&](const char* why) -> CircuitError {
    return CircuitError(std::string("no viable ") + injection_kind_name(injection.kind) +
                        " site: " + why);
  };

  InjectionResult out;
  switch (injection.kind) {
    case InjectionKind::drop_booleanity: {
      if (n == 0 || S == 0) throw no_site("circuit has no step constraints");
      std::size_t k = injection.site % (n * S);
      std::size_t i = 1 + k / S, q = k % S;
      drop_constraint(d.circuit, d.bool_constraint[i - 1][q]);
      d.circuit.program.erase(d.circuit.program.begin() +
                              static_cast<std::ptrdiff_t>(d.bool_instr[i - 1][q]));
      out.expected = BugCategory::soundness;
      out.site = idx2("s", i, q) + " boolean";
      out.signal = idx2("s", i, q);
      break;
    }
    case InjectionKind::drop_transition: {
      std::vector<std::pair<std::size_t, std::uint32_t>> sites;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::uint32_t q = 0; q < S; ++q)
          if (live(i, q)) sites.emplace_back(i, q);
      if (sites.empty()) throw no_site("no state lies on an accepted path");
      auto [i, q] = sites[injection.site % sites.size()];
      Wiring w = d.state_wiring[i - 1][q];
      drop_constraint(d.circuit, w.constraint_idx);
      d.circuit.program[w.instr_idx].kind = InstrKind::assign;
      out.expected = BugCategory::soundness;
      out.site = idx2("s", i, q) + " wiring";
      out.signal = idx2("s", i, q);
      break;
    }
    case InjectionKind::hint_unconstrained: {
      struct Site {
        Wiring w;
        std::string site, signal;
      };
      std::vector<Site> sites;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t e = 0; e < d.edges.size(); ++e)
          if (d.reach[i][d.edges[e].from] && d.co[i + 1][d.edges[e].to])
            sites.push_back({d.t_wiring[i][e], idx2("t", i, e) + " wiring", idx2("t", i, e)});
      for (std::size_t i = 1; i <= n; ++i)
        for (std::uint32_t q = 0; q < S; ++q)
          if (live(i, q))
            sites.push_back(
                {d.state_wiring[i - 1][q], idx2("s", i, q) + " wiring", idx2("s", i, q)});
      sites.push_back({d.accept_wiring, "accept wiring", "accept"});
      const Site& s = sites[injection.site % sites.size()];
      drop_constraint(d.circuit, s.w.constraint_idx);
      d.circuit.program[s.w.instr_idx].kind = InstrKind::assign;
      out.expected = BugCategory::soundness;
      out.site = s.site;
      out.signal = s.signal;
      break;
    }
    case InjectionKind::flip_accept_state: {
      std::vector<std::uint32_t> sites;
      for (std::uint32_t q = 0; q < S; ++q)
        if (d.reach[n][q]) sites.push_back(q);
      if (sites.empty()) throw no_site("no state reachable at the final step");
      std::uint32_t q = sites[injection.site % sites.size()];
      bool was_accepting = dfa.accepting[q];
      Constraint& c = d.circuit.constraints[d.accept_wiring.constraint_idx];
      const ModulusPtr& mod = d.circuit.modulus;
      c.c.add_term(d.s_sig[n][q],
                   was_accepting ? FieldElement::from_i64(-1, mod)
                                 : FieldElement::from_i64(1, mod));
      out.expected = was_accepting ? BugCategory::completeness : BugCategory::correctness;
      out.site = "accept wiring";
      out.signal = "";
      break;
    }
    case InjectionKind::class_off_by_one: {
      struct Site {
        std::size_t edge;
        std::uint8_t byte;
        bool grow;
      };
      std::vector<std::size_t> dist = distance_to_accept(dfa);
      constexpr std::size_t kInf = static_cast<std::size_t>(-1);
      std::vector<Site> sites;
      for (std::size_t e = 0; e < d.edges.size(); ++e) {
        const DfaEdge& edge = d.edges[e];
        if (!edge_live(edge)) continue;
        const std::size_t A = dfa.alphabet.size();
        auto dead_target = [&](std::uint8_t b) {
          std::uint32_t to = dfa.transitions[edge.from * A + dfa.alphabet.index_of(b)];
          return dist[to] == kInf;
        };
        for (const ByteRange& r : edge.ranges) {
          sites.push_back({e, r.hi, false});
          if (r.lo != r.hi) sites.push_back({e, r.lo, false});
          if (r.hi < dfa.alphabet.hi && !edge.contains(r.hi + 1) && dead_target(r.hi + 1))
            sites.push_back({e, static_cast<std::uint8_t>(r.hi + 1), true});
          if (r.lo > dfa.alphabet.lo && !edge.contains(r.lo - 1) && dead_target(r.lo - 1))
            sites.push_back({e, static_cast<std::uint8_t>(r.lo - 1), true});
        }
      }
      if (sites.empty()) throw no_site("no live character-class boundary");
      const Site& s = sites[injection.site % sites.size()];
      FieldElement delta = FieldElement::from_i64(s.grow ? 1 : -1, d.circuit.modulus);
      std::size_t bi = dfa.alphabet.index_of(s.byte);
      for (std::size_t i = 0; i < n; ++i)
        d.circuit.constraints[d.t_wiring[i][s.edge].constraint_idx].b.add_term(
            d.eq_out[i][bi], delta);
      out.expected = s.grow ? BugCategory::correctness : BugCategory::completeness;
      out.site = "t[*][" + std::to_string(s.edge) + "] wiring";
      out.signal = "t[*][" + std::to_string(s.edge) + "]";
      break;
    }
  }

  d.circuit.metadata["injection"] = injection_kind_name(injection.kind);
  d.circuit.metadata["injection_site"] = out.site;
  d.circuit.metadata["injection_signal"] = out.signal;
  d.circuit.metadata["injection_expected"] = category_name(out.expected);
  out.circuit = std::move(d.circuit);
  return out;
}

bool site_matches(const std::string& evidence, const std::string& expected) {
  if (expected.empty()) return false;
  std::size_t i = 0, j = 0;
  while (i < evidence.size() && j < expected.size()) {
    if (expected[j] == '*') {
      std::size_t k = i;
      while (k < evidence.size() && std::isdigit(static_cast<unsigned char>(evidence[k])))
        ++k;
      if (k == i) return false;
      i = k;
      ++j;
    } else if (evidence[i] == expected[j]) {
      ++i;
      ++j;
    } else {
      return false;
    }
  }
  return i == evidence.size() && j == expected.size();
}

}  // namespace circfuzz
