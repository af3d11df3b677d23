#include "circfuzz/fixtures.hpp"

#include "circfuzz/errors.hpp"

namespace circfuzz {

const char* fixture_kind_name(FixtureKind k) {
  switch (k) {
    case FixtureKind::multiplier_safe: return "multiplier_safe";
    case FixtureKind::multiplier_soundness: return "multiplier_soundness";
    case FixtureKind::multiplier_completeness: return "multiplier_completeness";
    case FixtureKind::multiplier_correctness: return "multiplier_correctness";
    case FixtureKind::montgomery_add: return "montgomery_add";
  }
  return "?";
}

std::optional<FixtureKind> fixture_kind_from_name(const std::string& s) {
  for (FixtureKind k : all_fixture_kinds())
    if (s == fixture_kind_name(k)) return k;
  return std::nullopt;
}

std::vector<FixtureKind> all_fixture_kinds() {
  return {FixtureKind::multiplier_safe, FixtureKind::multiplier_soundness,
          FixtureKind::multiplier_completeness, FixtureKind::multiplier_correctness,
          FixtureKind::montgomery_add};
}

namespace {

Circuit make_multiplier(FixtureKind kind, const ModulusPtr& m) {
  CircuitBuilder b(m);
  SignalId a = b.add_input("a");
  SignalId bb = b.add_input("b");
  SignalId c = b.add_output("c");
  Expr prod = Expr::mul(Expr::sig(a), Expr::sig(bb));
  Expr sum = Expr::add({Expr::sig(a), Expr::sig(bb)});
  switch (kind) {
    case FixtureKind::multiplier_safe:
      b.assign_and_constrain(c, prod, "c === a*b");
      break;
    case FixtureKind::multiplier_soundness:
      b.assign(c, prod);
      break;
    case FixtureKind::multiplier_completeness:
      b.assign(c, sum);
      b.constrain(Expr::sig(c), prod, "c === a*b");
      break;
    case FixtureKind::multiplier_correctness:
      b.assign(c, sum);
      b.constrain(Expr::sig(c), sum, "c === a+b");
      break;
    default:
      throw ConfigError("not a multiplier kind");
  }
  return b.take({{"fixture", fixture_kind_name(kind)}});
}

Circuit make_montgomery(const ModulusPtr& m, const FixtureParams& params) {
  FieldElement A = FieldElement::from_decimal(params.a, m);
  FieldElement B = FieldElement::from_decimal(params.b, m);
  if (B.is_zero()) throw ConfigError("montgomery_add: parameter B must be nonzero");

  CircuitBuilder b(m);
  SignalId in1x = b.add_input("in1[0]");
  SignalId in1y = b.add_input("in1[1]");
  SignalId in2x = b.add_input("in2[0]");
  SignalId in2y = b.add_input("in2[1]");
  SignalId outx = b.add_output("out[0]");
  SignalId outy = b.add_output("out[1]");
  SignalId lambda = b.add_internal("lambda");
  SignalId lam2 = b.add_internal("lambda2");

  Expr dx = Expr::sub(Expr::sig(in2x), Expr::sig(in1x));
  Expr dy = Expr::sub(Expr::sig(in2y), Expr::sig(in1y));

  // Slope hint: the constraint below is vacuous whenever in1[0] == in2[0].
  b.assign(lambda, Expr::div(dy, dx));
  b.constrain(Expr::mul(Expr::sig(lambda), dx), dy,
              "lambda*(in2[0]-in1[0]) === in2[1]-in1[1]");
  b.assign_and_constrain(lam2, Expr::mul(Expr::sig(lambda), Expr::sig(lambda)),
                         "lambda2 === lambda*lambda");
  b.assign_and_constrain(
      outx,
      Expr::sub(Expr::mul(Expr::cst(B), Expr::sig(lam2)),
                Expr::add({Expr::cst(A), Expr::sig(in1x), Expr::sig(in2x)})),
      "out[0] === B*lambda^2 - A - in1[0] - in2[0]");
  b.assign_and_constrain(
      outy,
      Expr::sub(Expr::mul(Expr::sig(lambda), Expr::sub(Expr::sig(in1x), Expr::sig(outx))),
                Expr::sig(in1y)),
      "out[1] === lambda*(in1[0]-out[0]) - in1[1]");

  return b.take({{"fixture", "montgomery_add"},
                 {"param_a", A.decimal()},
                 {"param_b", B.decimal()}});
}

}  // namespace

Circuit make_fixture(FixtureKind kind, const ModulusPtr& modulus, const FixtureParams& params) {
  if (kind == FixtureKind::montgomery_add) return make_montgomery(modulus, params);
  return make_multiplier(kind, modulus);
}

std::optional<std::map<std::string, FieldElement>> fixture_reference_outputs(
    FixtureKind kind, const InputMap& inputs, const ModulusPtr& modulus) {
  if (kind == FixtureKind::montgomery_add) return std::nullopt;
  (void)modulus;
  return std::map<std::string, FieldElement>{{"c", fe_mul(inputs.at("a"), inputs.at("b"))}};
}

}  // namespace circfuzz
