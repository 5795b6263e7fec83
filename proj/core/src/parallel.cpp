#include "hallfiber/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hallfiber {

int resolve_workers(std::optional<int> requested) {
  if (requested && *requested >= 1) return *requested;
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
      // Malformed values fall through to the hardware default.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace hallfiber
