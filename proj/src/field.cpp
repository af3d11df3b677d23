#include "circfuzz/field.hpp"

namespace circfuzz {

namespace {
void require_same_modulus(const FieldElement& a, const FieldElement& b) {
  if (!a.valid() || !b.valid()) throw CircuitError("uninitialized field element");
  if (a.modulus().get() == b.modulus().get()) return;
  if (*a.modulus() == *b.modulus()) return;
  throw ConfigError("field elements mix moduli " + a.modulus()->decimal() + " and " +
                    b.modulus()->decimal());
}

mpz_class reduce(mpz_class v, const mpz_class& p) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t());
  return r;
}
}  // namespace

std::shared_ptr<const FieldModulus> FieldModulus::create(const std::string& decimal) {
  mpz_class p;
  if (p.set_str(decimal, 10) != 0) throw ConfigError("modulus is not a decimal integer: " + decimal);
  return create(p);
}

std::shared_ptr<const FieldModulus> FieldModulus::create(const mpz_class& value) {
  mpz_class bound = 1;
  bound <<= 16;
  if (value < bound) throw ConfigError("modulus below 2^16: " + value.get_str(10));
  // 64 rounds; gmp runs Baillie-PSW first, then Miller-Rabin repetitions.
  if (mpz_probab_prime_p(value.get_mpz_t(), 64) == 0)
    throw ConfigError("modulus is not prime: " + value.get_str(10));
  return std::shared_ptr<const FieldModulus>(new FieldModulus(value));
}

FieldElement::FieldElement(mpz_class v, ModulusPtr m) : v_(std::move(v)), mod_(std::move(m)) {
  if (!mod_) throw CircuitError("field element without modulus");
  v_ = reduce(v_, mod_->value());
}

FieldElement FieldElement::from_decimal(const std::string& decimal, const ModulusPtr& m) {
  mpz_class v;
  if (v.set_str(decimal, 10) != 0)
    throw ParseError("not a decimal field element: " + decimal);
  return FieldElement(v, m);
}

FieldElement FieldElement::from_u64(std::uint64_t v, const ModulusPtr& m) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return FieldElement(z, m);
}

FieldElement FieldElement::from_i64(std::int64_t v, const ModulusPtr& m) {
  if (v >= 0) return from_u64(static_cast<std::uint64_t>(v), m);
  FieldElement mag = from_u64(static_cast<std::uint64_t>(-(v + 1)) + 1, m);
  return fe_neg(mag);
}

bool FieldElement::operator==(const FieldElement& o) const {
  require_same_modulus(*this, o);
  return v_ == o.v_;
}

FieldElement fe_add(const FieldElement& a, const FieldElement& b) {
  require_same_modulus(a, b);
  return FieldElement(a.value() + b.value(), a.modulus());
}

FieldElement fe_sub(const FieldElement& a, const FieldElement& b) {
  require_same_modulus(a, b);
  return FieldElement(a.value() - b.value(), a.modulus());
}

FieldElement fe_mul(const FieldElement& a, const FieldElement& b) {
  require_same_modulus(a, b);
  return FieldElement(a.value() * b.value(), a.modulus());
}

FieldElement fe_neg(const FieldElement& a) {
  if (!a.valid()) throw CircuitError("uninitialized field element");
  return FieldElement(-a.value(), a.modulus());
}

FieldElement fe_inverse(const FieldElement& a) {
  if (!a.valid()) throw CircuitError("uninitialized field element");
  if (a.is_zero()) throw CircuitError("inverse of zero");
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.value().get_mpz_t(), a.modulus()->value().get_mpz_t()) == 0)
    throw CircuitError("no inverse modulo " + a.modulus()->decimal());
  return FieldElement(r, a.modulus());
}

std::pair<FieldElement, bool> fe_div(const FieldElement& a, const FieldElement& b) {
  require_same_modulus(a, b);
  if (b.is_zero()) return {FieldElement(0, a.modulus()), true};
  return {fe_mul(a, fe_inverse(b)), false};
}

}  // namespace circfuzz
