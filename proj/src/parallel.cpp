#include "permix/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace permix {

namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("PERMIX_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::atomic<unsigned>& configured() {
  static std::atomic<unsigned> threads{default_threads()};
  return threads;
}

}  // namespace

unsigned thread_count() { return configured().load(); }

void set_thread_count(unsigned threads) { configured().store(std::max(1U, threads)); }

void parallel_blocks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1 || count < 64) {
    body(0, count);
    return;
  }
  const std::size_t step = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t begin = 0; begin < count; begin += step) {
    pool.emplace_back(body, begin, std::min(count, begin + step));
  }
  for (auto& t : pool) t.join();
}

}  // namespace permix
