#include "vgpnn/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vgpnn {
namespace {

std::atomic<int> g_override{0};

int default_workers() {
  static const int n = [] {
    if (const char* env = std::getenv("VGPNN_THREADS")) {
      try {
        int v = std::stoi(env);
        if (v > 0) return v;
      } catch (...) {
      }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }();
  return n;
}

}  // namespace

int worker_count() {
  int o = g_override.load();
  return o > 0 ? o : default_workers();
}

void set_worker_count(int n) { g_override.store(n > 0 ? n : 0); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  // Over-decompose a little so uneven rows balance out.
  std::size_t chunks = std::min(n, workers * 4);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      std::size_t begin = n * c / chunks;
      std::size_t end = n * (c + 1) / chunks;
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t i = 0; i + 1 < workers; ++i) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace vgpnn
