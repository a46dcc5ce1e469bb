#include "longswap/parallel.hpp"

#include <cstdlib>
#include <string>

namespace longswap {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LONGSWAP_THREADS")) {
    try {
      const int parsed = std::stoi(env);
      if (parsed > 0) return parsed;
    } catch (...) {
      // Fall through to hardware detection on unparsable values.
    }
  }
  const unsigned hardware = std::thread::hardware_concurrency();
  return hardware > 0 ? static_cast<int>(hardware) : 1;
}

}  // namespace longswap
