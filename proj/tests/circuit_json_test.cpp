#include "circfuzz/circuit_json.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include "circfuzz/errors.hpp"
#include "circfuzz/fixtures.hpp"
#include "circfuzz/regex.hpp"
#include "circfuzz/transpiler.hpp"

namespace circfuzz {
namespace {

ModulusPtr small() { return FieldModulus::create("65537"); }

Circuit sample() {
  RegexAst ast = parse_regex("a[b-d]+", Alphabet{'a', 'e'});
  Dfa dfa = determinize(build_nfa(ast, Alphabet{'a', 'e'}));
  TranspileSpec spec;
  spec.dfa = dfa;
  spec.input_length = 3;
  spec.max_length = 64;
  return transpile(spec, small(), {{"regex", "a[b-d]+"}});
}

void expect_equal(const Circuit& x, const Circuit& y) {
  EXPECT_EQ(circuit_hash(x), circuit_hash(y));
  ASSERT_EQ(x.signals.size(), y.signals.size());
  for (std::size_t k = 0; k < x.signals.size(); ++k) {
    EXPECT_EQ(x.signals[k].name, y.signals[k].name);
    EXPECT_EQ(x.signals[k].role, y.signals[k].role);
  }
  ASSERT_EQ(x.constraints.size(), y.constraints.size());
  ASSERT_EQ(x.program.size(), y.program.size());
  EXPECT_EQ(x.metadata, y.metadata);
  EXPECT_EQ(x.modulus->decimal(), y.modulus->decimal());
}

TEST(CircuitJson, RoundTripsFixture) {
  Circuit c = make_fixture(FixtureKind::multiplier_safe, small(), {});
  Circuit back = parse_circuit(serialize_circuit(c));
  expect_equal(c, back);
}

TEST(CircuitJson, RoundTripsTranspiledCircuit) {
  Circuit c = sample();
  Circuit back = parse_circuit(serialize_circuit(c));
  expect_equal(c, back);
}

TEST(CircuitJson, SerializationIsDeterministic) {
  Circuit c = sample();
  EXPECT_EQ(serialize_circuit(c), serialize_circuit(c));
  EXPECT_EQ(serialize_circuit(parse_circuit(serialize_circuit(c))), serialize_circuit(c));
}

TEST(CircuitJson, HashIsContentSensitive) {
  Circuit c = sample();
  std::string h = circuit_hash(c);
  EXPECT_EQ(h.size(), 64u);
  EXPECT_EQ(circuit_hash(c), h);

  Circuit d = c;
  d.constraints.pop_back();
  EXPECT_NE(circuit_hash(d), h);

  Circuit e = c;
  e.metadata["regex"] = "something else";
  EXPECT_NE(circuit_hash(e), h);
}

TEST(CircuitJson, TruncatedDocumentFails) {
  std::string text = serialize_circuit(sample());
  EXPECT_THROW(parse_circuit(text.substr(0, text.size() / 2)), ParseError);
  EXPECT_THROW(parse_circuit(""), ParseError);
  EXPECT_THROW(parse_circuit("[]"), ParseError);
}

TEST(CircuitJson, RejectsDanglingSignalReferences) {
  std::string text = serialize_circuit(make_fixture(FixtureKind::multiplier_safe, small(), {}));
  // Point a constraint term at a signal index past the declared list.
  auto doc = nlohmann::json::parse(text);
  doc["constraints"][0]["a"][0][1] = 999;
  EXPECT_THROW(parse_circuit(doc.dump()), ParseError);
}

TEST(CircuitJson, RejectsHashMismatch) {
  std::string text = serialize_circuit(sample());
  auto doc = nlohmann::json::parse(text);
  doc["hash"] = std::string(64, 'f');
  EXPECT_THROW(parse_circuit(doc.dump()), ParseError);
}

}  // namespace
}  // namespace circfuzz
