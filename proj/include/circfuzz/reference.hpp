#pragma once

#include <map>
#include <memory>
#include <string>

#include "circfuzz/regex.hpp"
#include "circfuzz/util.hpp"

namespace circfuzz {

// Second opinion on "does this string match this pattern".  The builtin
// matcher reuses the parser + NFA simulation; an external matcher is any
// process speaking the line protocol below, so a different engine entirely
// (e.g. a Python process around its re module) can referee.
class ReferenceMatcher {
 public:
  virtual ~ReferenceMatcher() = default;
  virtual bool matches(const std::string& pattern, const Bytes& input) = 0;
  virtual std::string name() const = 0;
};

// Parse + Thompson simulation, one cached NFA per pattern.
class BuiltinReference : public ReferenceMatcher {
 public:
  explicit BuiltinReference(Alphabet alphabet) : alphabet_(alphabet) {}
  bool matches(const std::string& pattern, const Bytes& input) override;
  std::string name() const override { return "builtin"; }

 private:
  Alphabet alphabet_;
  std::map<std::string, Nfa> cache_;
};

// Long-lived child process.  Per query:
//   request:  base64(pattern) <TAB> base64(string) <NEWLINE>
//   response: "1" | "0" <NEWLINE>
// One second per query; a timeout, a dead child, or an off-protocol reply
// raises IoError and the child is killed.
class ExternalReference : public ReferenceMatcher {
 public:
  explicit ExternalReference(std::string command);
  ~ExternalReference() override;
  ExternalReference(const ExternalReference&) = delete;
  ExternalReference& operator=(const ExternalReference&) = delete;

  bool matches(const std::string& pattern, const Bytes& input) override;
  std::string name() const override { return "external: " + command_; }

 private:
  void spawn();
  void shutdown();
  std::string read_line(int timeout_ms);

  std::string command_;
  int to_child_ = -1;
  int from_child_ = -1;
  long pid_ = -1;
  std::string buffer_;
};

// "builtin" selects the builtin matcher; anything else is run as a command.
std::unique_ptr<ReferenceMatcher> make_reference(const std::string& spec,
                                                 const Alphabet& alphabet);

}  // namespace circfuzz
