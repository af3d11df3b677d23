#pragma once

#include <filesystem>
#include <string>

#include "circfuzz/regex.hpp"
#include "circfuzz/rng.hpp"

namespace circfuzz::testutil {

// Independent regex decision procedure: recursive span matching with
// memoization, no NFA/DFA machinery shared with the library under test.
bool naive_match(const RegexAst& ast, const Bytes& input, const Alphabet& alphabet);

// Random AST over the alphabet, depth-bounded; exercises every node kind.
RegexAst random_ast(Rng& rng, const Alphabet& alphabet, std::size_t depth);

// mkdtemp wrapper that removes the tree on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

}  // namespace circfuzz::testutil
