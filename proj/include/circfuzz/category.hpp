#pragma once

#include <optional>
#include <string>

namespace circfuzz {

// Bug taxonomy shared by the injector, the probe, and the classifier.
enum class BugCategory { completeness, correctness, soundness };

const char* category_name(BugCategory c);
std::optional<BugCategory> category_from_name(const std::string& s);

}  // namespace circfuzz
