#include "circfuzz/circuit.hpp"

#include <gtest/gtest.h>

#include "circfuzz/errors.hpp"
#include "circfuzz/eval.hpp"
#include "circfuzz/regex.hpp"
#include "circfuzz/transpiler.hpp"

namespace circfuzz {
namespace {

ModulusPtr small() { return FieldModulus::create("65537"); }

FieldElement fe(std::uint64_t v, const ModulusPtr& m) { return FieldElement::from_u64(v, m); }

// c <== a*b, the safe shape.
Circuit constrained_multiplier(const ModulusPtr& m) {
  CircuitBuilder b(m);
  SignalId a = b.add_input("a"), bb = b.add_input("b"), c = b.add_output("c");
  b.assign_and_constrain(c, Expr::mul(Expr::sig(a), Expr::sig(bb)), "c === a*b");
  return b.take();
}

TEST(Builder, MultiplierRunsHonestly) {
  auto m = small();
  Circuit c = constrained_multiplier(m);
  Witness w = generate_witness(c, {{"a", fe(2, m)}, {"b", fe(5, m)}});
  EXPECT_EQ(read_outputs(c, w).at("c"), fe(10, m));
  MockResult r = mock_prove(c, w);
  EXPECT_TRUE(r.satisfied);
  EXPECT_TRUE(r.violations.empty());
}

TEST(Builder, UnconstrainedAssignmentChecksNothing) {
  auto m = small();
  CircuitBuilder b(m);
  SignalId a = b.add_input("a"), bb = b.add_input("b"), c = b.add_output("c");
  b.assign(c, Expr::mul(Expr::sig(a), Expr::sig(bb)));  // c <-- a*b only
  Circuit circ = b.take();
  EXPECT_TRUE(circ.constraints.empty());

  Witness w = generate_witness(circ, {{"a", fe(2, m)}, {"b", fe(5, m)}});
  // A dishonest prover writes 100; with no constraint nothing objects.
  w.values[*circ.find_signal("c")] = fe(100, m);
  EXPECT_TRUE(mock_prove(circ, w).satisfied);
}

TEST(Builder, ComputationConstraintDivergenceIsCaught) {
  auto m = small();
  CircuitBuilder b(m);
  SignalId a = b.add_input("a"), bb = b.add_input("b"), c = b.add_output("c");
  b.assign(c, Expr::add({Expr::sig(a), Expr::sig(bb)}));  // c <-- a+b
  b.constrain(Expr::sig(c), Expr::mul(Expr::sig(a), Expr::sig(bb)), "c === a*b");
  Circuit circ = b.take();

  Witness w = generate_witness(circ, {{"a", fe(2, m)}, {"b", fe(3, m)}});
  EXPECT_EQ(read_outputs(circ, w).at("c"), fe(5, m));
  MockResult r = mock_prove(circ, w);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].label, "c === a*b");
  // 5 - 6 wrapped around.
  EXPECT_EQ(r.violations[0].lhs, FieldElement::from_i64(-1, m));

  Witness ok = generate_witness(circ, {{"a", fe(2, m)}, {"b", fe(2, m)}});
  EXPECT_TRUE(mock_prove(circ, ok).satisfied);
}

TEST(Builder, RejectsReadOfUnassignedSignal) {
  auto m = small();
  CircuitBuilder b(m);
  SignalId out = b.add_output("out");
  SignalId u = b.add_internal("u");
  EXPECT_THROW(b.assign(out, Expr::sig(u)), CircuitError);
}

TEST(Builder, RejectsDuplicateNames) {
  CircuitBuilder b(small());
  b.add_input("x");
  EXPECT_THROW(b.add_input("x"), CircuitError);
}

TEST(IsZero, HonestValues) {
  auto m = small();
  CircuitBuilder b(m);
  SignalId x = b.add_input("x");
  SignalId out = b.iszero(Expr::sig(x), "z");
  Circuit circ = b.take();

  Witness w0 = generate_witness(circ, {{"x", fe(0, m)}});
  EXPECT_EQ(w0.values[out], fe(1, m));
  EXPECT_TRUE(mock_prove(circ, w0).satisfied);

  Witness w7 = generate_witness(circ, {{"x", fe(7, m)}});
  EXPECT_EQ(w7.values[out], fe(0, m));
  EXPECT_EQ(fe_mul(w7.values[*circ.find_signal("z.inv")], fe(7, m)), fe(1, m));
  EXPECT_TRUE(mock_prove(circ, w7).satisfied);
}

TEST(IsZero, ForgedIndicatorIsCaught) {
  auto m = small();
  CircuitBuilder b(m);
  SignalId x = b.add_input("x");
  SignalId out = b.iszero(Expr::sig(x), "z");
  Circuit circ = b.take();

  Witness w = generate_witness(circ, {{"x", fe(7, m)}});
  w.values[out] = fe(1, m);
  w.values[*circ.find_signal("z.inv")] = fe(0, m);
  // out === 1 - x*inv still holds (1 = 1 - 0); x*out === 0 breaks with 7.
  MockResult r = mock_prove(circ, w);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].lhs, fe(7, m));
}

TEST(WitnessGen, InputErrors) {
  auto m = small();
  Circuit c = constrained_multiplier(m);
  EXPECT_THROW(generate_witness(c, {{"a", fe(1, m)}}), CircuitError);
  EXPECT_THROW(generate_witness(
                   c, {{"a", fe(1, m)}, {"b", fe(1, m)}, {"zz", fe(1, m)}}),
               CircuitError);
}

TEST(WitnessGen, DivisionByZeroIsRecordedNotFatal) {
  auto m = small();
  CircuitBuilder b(m);
  SignalId x = b.add_input("x");
  SignalId q = b.add_internal("q");
  b.assign(q, Expr::div(Expr::cst(fe(1, m)), Expr::sig(x)));
  Circuit circ = b.take();

  Witness w = generate_witness(circ, {{"x", fe(0, m)}});
  EXPECT_EQ(w.values[q], fe(0, m));
  ASSERT_EQ(w.hint_events.size(), 1u);
  EXPECT_TRUE(w.hint_events[0].second);

  Witness w2 = generate_witness(circ, {{"x", fe(2, m)}});
  EXPECT_TRUE(w2.hint_events.empty());
  EXPECT_EQ(w2.values[q], fe(32769, m));
}

TEST(Replay, FullReplayIsAFixedPoint) {
  auto m = small();
  CircuitBuilder b(m);
  SignalId x = b.add_input("x");
  b.iszero(Expr::sig(x), "z");
  Circuit circ = b.take();

  Witness w = generate_witness(circ, {{"x", fe(9, m)}});
  Witness copy = w;
  replay_program(circ, copy, 0);
  EXPECT_EQ(copy.values, w.values);
}

TEST(MockProve, SerialAndParallelAgree) {
  auto m = small();
  RegexAst ast = parse_regex("a(b|c)*d", Alphabet{'a', 'e'});
  Dfa dfa = determinize(build_nfa(ast, Alphabet{'a', 'e'}));
  TranspileSpec spec;
  spec.dfa = dfa;
  spec.input_length = 6;
  spec.max_length = 64;
  Circuit circ = transpile(spec, m, {});

  InputMap inputs;
  const char* s = "abccbd";
  for (std::size_t i = 0; i < 6; ++i)
    inputs["char[" + std::to_string(i) + "]"] = fe(static_cast<unsigned char>(s[i]), m);
  Witness w = generate_witness(circ, inputs);

  for (Witness* witness : {&w}) {
    ConstraintCoverage cov_s(circ.constraints.size()), cov_p(circ.constraints.size());
    MockResult rs = mock_prove_serial(circ, *witness, &cov_s);
    MockResult rp = mock_prove(circ, *witness, &cov_p);
    EXPECT_EQ(rs.satisfied, rp.satisfied);
    ASSERT_EQ(rs.violations.size(), rp.violations.size());
    for (std::size_t k = 0; k < rs.violations.size(); ++k) {
      EXPECT_EQ(rs.violations[k].index, rp.violations[k].index);
      EXPECT_EQ(rs.violations[k].lhs, rp.violations[k].lhs);
    }
    EXPECT_EQ(cov_s, cov_p);
  }

  // Same agreement on a corrupted witness with many violations.
  Witness bad = w;
  for (std::size_t k = 1; k < bad.values.size(); k += 3) bad.values[k] = fe(12345, m);
  ConstraintCoverage cs(circ.constraints.size()), cp(circ.constraints.size());
  MockResult rs = mock_prove_serial(circ, bad, &cs);
  MockResult rp = mock_prove(circ, bad, &cp);
  EXPECT_FALSE(rs.satisfied);
  ASSERT_EQ(rs.violations.size(), rp.violations.size());
  for (std::size_t k = 0; k < rs.violations.size(); ++k) {
    EXPECT_EQ(rs.violations[k].index, rp.violations[k].index);
    EXPECT_EQ(rs.violations[k].label, rp.violations[k].label);
    EXPECT_EQ(rs.violations[k].lhs, rp.violations[k].lhs);
  }
  EXPECT_EQ(cs, cp);
}

TEST(Coverage, TracksBothBehaviors) {
  auto m = small();
  Circuit c = constrained_multiplier(m);
  ConstraintCoverage cov(c.constraints.size());
  EXPECT_EQ(cov.covered(), 0u);
  EXPECT_EQ(cov.total(), 3 * c.constraints.size());

  // a*b = 0: every combination evaluates to zero.
  mock_prove(c, generate_witness(c, {{"a", fe(0, m)}, {"b", fe(0, m)}}), &cov);
  EXPECT_EQ(cov.covered(), 0u);
  // a*b = 6: now each combination has seen both zero and nonzero.
  mock_prove(c, generate_witness(c, {{"a", fe(2, m)}, {"b", fe(3, m)}}), &cov);
  EXPECT_EQ(cov.covered(), cov.total());
}

TEST(Coverage, MergeAccumulatesAndChecksShape) {
  auto m = small();
  Circuit c = constrained_multiplier(m);
  ConstraintCoverage zero_side(c.constraints.size()), six_side(c.constraints.size());
  mock_prove(c, generate_witness(c, {{"a", fe(0, m)}, {"b", fe(0, m)}}), &zero_side);
  mock_prove(c, generate_witness(c, {{"a", fe(2, m)}, {"b", fe(3, m)}}), &six_side);

  ConstraintCoverage merged = zero_side;
  merged.merge(six_side);
  EXPECT_EQ(merged.covered(), merged.total());

  ConstraintCoverage wrong_shape(c.constraints.size() + 1);
  EXPECT_THROW(merged.merge(wrong_shape), CircuitError);
}

}  // namespace
}  // namespace circfuzz
