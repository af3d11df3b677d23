#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <utility>

#include "circfuzz/errors.hpp"

namespace circfuzz {

// Prime modulus shared by every field element of a campaign.  Construction
// verifies primality (Miller-Rabin, 64 rounds) and the minimum size bound;
// the object is immutable afterwards and shared read-only.
class FieldModulus {
 public:
  // Throws ConfigError if the value is not prime or is below 2^16.
  static std::shared_ptr<const FieldModulus> create(const std::string& decimal);
  static std::shared_ptr<const FieldModulus> create(const mpz_class& value);

  const mpz_class& value() const { return p_; }
  std::string decimal() const { return p_.get_str(10); }

  bool operator==(const FieldModulus& other) const { return p_ == other.p_; }

 private:
  explicit FieldModulus(mpz_class p) : p_(std::move(p)) {}
  mpz_class p_;
};

using ModulusPtr = std::shared_ptr<const FieldModulus>;

// Canonical residue in [0, p).  Every operation reduces; mixing elements of
// distinct moduli is a hard error.
class FieldElement {
 public:
  FieldElement() = default;  // invalid sentinel; usable only after assignment
  FieldElement(mpz_class v, ModulusPtr m);
  static FieldElement from_decimal(const std::string& decimal, const ModulusPtr& m);
  static FieldElement from_u64(std::uint64_t v, const ModulusPtr& m);
  static FieldElement from_i64(std::int64_t v, const ModulusPtr& m);

  const mpz_class& value() const { return v_; }
  const ModulusPtr& modulus() const { return mod_; }
  std::string decimal() const { return v_.get_str(10); }
  bool is_zero() const { return v_ == 0; }
  bool valid() const { return mod_ != nullptr; }

  bool operator==(const FieldElement& o) const;
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

 private:
  mpz_class v_;
  ModulusPtr mod_;
};

FieldElement fe_add(const FieldElement& a, const FieldElement& b);
FieldElement fe_sub(const FieldElement& a, const FieldElement& b);
FieldElement fe_mul(const FieldElement& a, const FieldElement& b);
FieldElement fe_neg(const FieldElement& a);

// Throws CircuitError on zero input.
FieldElement fe_inverse(const FieldElement& a);

// Total division: b == 0 yields (0, true) instead of an error so that hint
// computations never abort mid-witness.
std::pair<FieldElement, bool> fe_div(const FieldElement& a, const FieldElement& b);

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) { return fe_add(a, b); }
inline FieldElement operator-(const FieldElement& a, const FieldElement& b) { return fe_sub(a, b); }
inline FieldElement operator*(const FieldElement& a, const FieldElement& b) { return fe_mul(a, b); }

}  // namespace circfuzz
