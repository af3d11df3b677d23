#include "circfuzz/category.hpp"

namespace circfuzz {

const char* category_name(BugCategory c) {
  switch (c) {
    case BugCategory::completeness: return "completeness";
    case BugCategory::correctness: return "correctness";
    case BugCategory::soundness: return "soundness";
  }
  return "?";
}

std::optional<BugCategory> category_from_name(const std::string& s) {
  if (s == "completeness") return BugCategory::completeness;
  if (s == "correctness") return BugCategory::correctness;
  if (s == "soundness") return BugCategory::soundness;
  return std::nullopt;
}

}  // namespace circfuzz
