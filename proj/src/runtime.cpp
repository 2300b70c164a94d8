#include "augmod/runtime.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace augmod {

namespace {

int default_threads() {
  if (const char* env = std::getenv("AUGMOD_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::atomic<int> g_threads{0};  // 0 = not yet resolved

}  // namespace

void set_max_threads(int n) { g_threads.store(n >= 1 ? n : 1); }

int max_threads() {
  int n = g_threads.load();
  if (n == 0) {
    n = default_threads();
    g_threads.store(n);
  }
  return n;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body) {
  const int threads = max_threads();
  if (threads <= 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }

  // a worker exception must surface on the calling thread, not terminate()
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto guarded = [&](std::int64_t i) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      body(i);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };

#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) guarded(i);
#else
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) guarded(i);
    });
  }
  for (auto& t : pool) t.join();
#endif
  if (failure) std::rethrow_exception(failure);
}

}  // namespace augmod
