#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lrsdcut {

namespace {

std::atomic<unsigned> g_override{0};

unsigned env_threads() {
  const char* env = std::getenv("LRSDCUT_THREADS");
  if (env == nullptr) return 0;
  try {
    long v = std::stol(env);
    return v > 0 ? static_cast<unsigned>(v) : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

unsigned thread_cap() {
  unsigned t = g_override.load();
  if (t == 0) t = env_threads();
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return t;
}

void set_thread_cap(unsigned threads) { g_override.store(threads); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_cap(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lrsdcut
