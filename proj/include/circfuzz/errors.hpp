#pragma once

#include <stdexcept>
#include <string>

namespace circfuzz {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration (CLI flags, config file, campaign knobs).
struct ConfigError : Error {
  using Error::Error;
};

// Malformed input text: regex patterns, BNF grammars, JSON documents.
// `offset` is a byte offset into the offending text when known.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (offset " + std::to_string(offset) + ")"), offset(offset) {}
  explicit ParseError(const std::string& what) : Error(what), offset(0) {}
  std::size_t offset;
};

// Regex construct recognized but outside the supported fragment.
struct UnsupportedFeatureError : ParseError {
  using ParseError::ParseError;
};

// A structural cap was exceeded (DFA state cap, length cap).
struct ResourceError : Error {
  using Error::Error;
};

// Inconsistent circuit, witness, or mutation plan.
struct CircuitError : Error {
  using Error::Error;
};

// Filesystem / subprocess trouble.
struct IoError : Error {
  using Error::Error;
};

}  // namespace circfuzz
