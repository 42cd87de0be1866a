#include "eciou/parallel.hpp"

#include <cstdlib>
#include <string>

namespace eciou {

unsigned thread_count_from_env() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("ECIOU_THREADS");
  if (env == nullptr) return hw;
  try {
    const long v = std::stol(env);
    if (v <= 0) return hw;
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    return hw;
  }
}

}  // namespace eciou
