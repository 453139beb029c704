#include "critline/parallel.hpp"

namespace critline {

namespace {
std::atomic<unsigned> configured_threads{0};
}

void set_thread_count(unsigned threads) { configured_threads.store(threads); }

unsigned thread_count() {
  const unsigned n = configured_threads.load();
  if (n > 0) return n;
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace critline
