#pragma once
/// Deterministic thread-pool helper.
///
/// `parallel_for` statically partitions [0, count) across `jobs` worker
/// threads.  Each index writes into its own pre-allocated slot, and any
/// reduction happens afterwards in index order on the calling thread, so
/// results are byte-identical for every value of `jobs`.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace qaa {

/// Run fn(i) for i in [0, count) on up to `jobs` threads.
/// jobs <= 1 runs inline on the calling thread.
inline void parallel_for(int jobs, std::size_t count,
                         const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (jobs <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Default worker count for CLI tools.
inline int default_jobs() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace qaa
