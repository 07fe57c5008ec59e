#include "perhf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "perhf/error.hpp"

namespace perhf {

namespace {
std::atomic<int> g_threads{1};
}

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::invalid_parameter: return "invalid-parameter";
  case ErrorKind::singular_argument: return "singular-argument";
  case ErrorKind::truncation_error: return "truncation-error";
  case ErrorKind::numerical_integration_failure: return "numerical-integration-failure";
  case ErrorKind::numerical_failure: return "numerical-failure";
  case ErrorKind::capacity_error: return "capacity-error";
  case ErrorKind::probe_not_applicable: return "probe-not-applicable";
  case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

void set_num_threads(int n) {
  if (n < 1)
    throw Error(ErrorKind::invalid_parameter, "thread count must be >= 1");
  g_threads = n;
}

int num_threads() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn) {
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(g_threads.load()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace perhf
