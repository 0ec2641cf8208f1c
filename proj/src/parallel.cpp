#include "exball/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace exball::parallel {

namespace {
std::atomic<unsigned> configured{0};
}

void set_thread_count(unsigned n) { configured.store(n, std::memory_order_relaxed); }

unsigned thread_count() {
  const unsigned n = configured.load(std::memory_order_relaxed);
  return n != 0 ? n : std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace exball::parallel
