#pragma once

#include <string>
#include <vector>

namespace mimcav {

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks across the library (seconds, fixed seed).
std::vector<SelfCheck> run_selftest();

}  // namespace mimcav
