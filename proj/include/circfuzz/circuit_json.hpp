#pragma once

#include <string>

#include "circfuzz/circuit.hpp"

namespace circfuzz {

// Content hash (SHA-256 hex) of the canonical serialization minus the hash
// field itself.  Stable across processes for identical circuits.
std::string circuit_hash(const Circuit& circuit);

// Canonical JSON: pinned key order, field elements as decimal strings,
// embedded content hash.  Byte-identical for identical circuits.
std::string serialize_circuit(const Circuit& circuit);

// Lossless inverse of serialize_circuit.  Throws ParseError (with a byte
// offset for malformed JSON) on syntax errors, schema violations, or a hash
// mismatch.
Circuit parse_circuit(const std::string& json_text);

}  // namespace circfuzz
