#include "ricci/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ricci {

std::size_t default_thread_count() {
  if (const char* env = std::getenv("RICCI_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // unparsable: fall through to auto
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace ricci
