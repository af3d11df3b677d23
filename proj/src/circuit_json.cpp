#include "circfuzz/circuit_json.hpp"

#include <json.hpp>

#include "circfuzz/errors.hpp"
#include "circfuzz/util.hpp"

namespace circfuzz {

using Json = nlohmann::ordered_json;

namespace {

Json lincomb_to_json(const LinComb& lc) {
  Json arr = Json::array();
  for (const auto& [sig, coeff] : lc.terms) arr.push_back({coeff.decimal(), sig});
  return arr;
}

Json expr_to_json(const Expr& e) {
  Json arr = Json::array();
  switch (e.op) {
    case Expr::Op::sig:
      arr.push_back("sig");
      arr.push_back(e.signal);
      return arr;
    case Expr::Op::cst:
      arr.push_back("const");
      arr.push_back(e.constant.decimal());
      return arr;
    case Expr::Op::add: arr.push_back("+"); break;
    case Expr::Op::sub: arr.push_back("-"); break;
    case Expr::Op::mul: arr.push_back("*"); break;
    case Expr::Op::div: arr.push_back("/"); break;
  }
  for (const auto& k : e.kids) arr.push_back(expr_to_json(k));
  return arr;
}

Json circuit_to_json(const Circuit& c) {
  Json doc;
  doc["modulus"] = c.modulus->decimal();
  Json signals = Json::array();
  for (SignalId i = 0; i < c.signals.size(); ++i) {
    Json s;
    s["index"] = i;
    s["name"] = c.signals[i].name;
    s["role"] = role_name(c.signals[i].role);
    signals.push_back(std::move(s));
  }
  doc["signals"] = std::move(signals);
  Json constraints = Json::array();
  for (const auto& con : c.constraints) {
    Json j;
    j["a"] = lincomb_to_json(con.a);
    j["b"] = lincomb_to_json(con.b);
    j["c"] = lincomb_to_json(con.c);
    j["label"] = con.label;
    constraints.push_back(std::move(j));
  }
  doc["constraints"] = std::move(constraints);
  Json program = Json::array();
  for (const auto& ins : c.program) {
    Json j;
    j["kind"] = instr_kind_name(ins.kind);
    if (ins.kind != InstrKind::constrain) j["target"] = ins.target;
    j["expr"] = expr_to_json(ins.expr);
    program.push_back(std::move(j));
  }
  doc["program"] = std::move(program);
  doc["metadata"] = Json::object();
  for (const auto& [k, v] : c.metadata) doc["metadata"][k] = v;
  return doc;
}

LinComb lincomb_from_json(const Json& j, const ModulusPtr& m, std::size_t n_signals) {
  if (!j.is_array()) throw ParseError("linear combination is not an array");
  LinComb lc;
  for (const auto& term : j) {
    if (!term.is_array() || term.size() != 2 || !term[0].is_string() ||
        !term[1].is_number_unsigned())
      throw ParseError("linear combination term must be [coeff, signal]");
    SignalId sig = term[1].get<SignalId>();
    if (sig >= n_signals) throw ParseError("constraint references unknown signal");
    lc.add_term(sig, FieldElement::from_decimal(term[0].get<std::string>(), m));
  }
  return lc;
}

Expr expr_from_json(const Json& j, const ModulusPtr& m, std::size_t n_signals) {
  if (!j.is_array() || j.empty() || !j[0].is_string())
    throw ParseError("expression must be a tagged array");
  const std::string tag = j[0].get<std::string>();
  if (tag == "sig") {
    if (j.size() != 2 || !j[1].is_number_unsigned()) throw ParseError("bad sig expression");
    SignalId s = j[1].get<SignalId>();
    if (s >= n_signals) throw ParseError("expression references unknown signal");
    return Expr::sig(s);
  }
  if (tag == "const") {
    if (j.size() != 2 || !j[1].is_string()) throw ParseError("bad const expression");
    return Expr::cst(FieldElement::from_decimal(j[1].get<std::string>(), m));
  }
  std::vector<Expr> kids;
  for (std::size_t i = 1; i < j.size(); ++i) kids.push_back(expr_from_json(j[i], m, n_signals));
  if (tag == "+") {
    if (kids.size() < 2) throw ParseError("'+' needs at least two operands");
    return Expr::add(std::move(kids));
  }
  if (tag == "-" || tag == "*" || tag == "/") {
    if (kids.size() != 2) throw ParseError("'" + tag + "' needs exactly two operands");
    if (tag == "-") return Expr::sub(std::move(kids[0]), std::move(kids[1]));
    if (tag == "*") return Expr::mul(std::move(kids[0]), std::move(kids[1]));
    return Expr::div(std::move(kids[0]), std::move(kids[1]));
  }
  throw ParseError("unknown expression tag: " + tag);
}

}  // namespace

std::string circuit_hash(const Circuit& circuit) {
  return sha256_hex(circuit_to_json(circuit).dump());
}

std::string serialize_circuit(const Circuit& circuit) {
  Json doc = circuit_to_json(circuit);
  doc["hash"] = sha256_hex(doc.dump());
  return doc.dump(1);
}

Circuit parse_circuit(const std::string& json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("circuit JSON: ") + e.what(), e.byte);
  }
  try {
    if (!doc.is_object()) throw ParseError("circuit JSON is not an object");
    Circuit c;
    c.modulus = FieldModulus::create(doc.at("modulus").get<std::string>());

    const Json& signals = doc.at("signals");
    if (!signals.is_array() || signals.empty()) throw ParseError("signals missing");
    for (std::size_t i = 0; i < signals.size(); ++i) {
      const Json& s = signals[i];
      if (s.at("index").get<std::size_t>() != i)
        throw ParseError("signal indexes must be dense and ordered");
      auto role = role_from_name(s.at("role").get<std::string>());
      if (!role) throw ParseError("unknown signal role");
      c.signals.push_back({s.at("name").get<std::string>(), *role});
    }
    if (c.signals[kOneSignal].role != SignalRole::const_one)
      throw ParseError("signal 0 must be the constant-one signal");

    for (const Json& j : doc.at("constraints")) {
      Constraint con;
      con.a = lincomb_from_json(j.at("a"), c.modulus, c.signals.size());
      con.b = lincomb_from_json(j.at("b"), c.modulus, c.signals.size());
      con.c = lincomb_from_json(j.at("c"), c.modulus, c.signals.size());
      con.label = j.at("label").get<std::string>();
      c.constraints.push_back(std::move(con));
    }

    for (const Json& j : doc.at("program")) {
      Instruction ins;
      auto kind = instr_kind_from_name(j.at("kind").get<std::string>());
      if (!kind) throw ParseError("unknown instruction kind");
      ins.kind = *kind;
      if (ins.kind != InstrKind::constrain) {
        ins.target = j.at("target").get<SignalId>();
        if (ins.target >= c.signals.size()) throw ParseError("instruction targets unknown signal");
      }
      ins.expr = expr_from_json(j.at("expr"), c.modulus, c.signals.size());
      c.program.push_back(std::move(ins));
    }

    for (const auto& [k, v] : doc.at("metadata").items()) {
      if (!v.is_string()) throw ParseError("metadata values must be strings");
      c.metadata[k] = v.get<std::string>();
    }

    const std::string recorded = doc.at("hash").get<std::string>();
    if (recorded != circuit_hash(c)) throw ParseError("circuit hash mismatch");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("circuit JSON schema: ") + e.what());
  }
}

}  // namespace circfuzz
