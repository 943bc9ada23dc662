#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wnh {

// Runs fn(state, trial) for trial = 0..trials-1 on `workers` threads. Each
// worker owns one State created by make_state(); trials are claimed from a
// shared counter, so which worker sees which trial is unspecified. Callers
// must merge the returned states with an order-independent reduction.
// The first exception thrown by any trial is rethrown after all workers stop.
template <typename State, typename MakeState, typename TrialFn>
std::vector<State> run_trials(std::int64_t trials, int workers, MakeState make_state, TrialFn fn) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::int64_t>(trials, 1))));
  std::vector<State> states;
  states.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) states.push_back(make_state());

  std::atomic<std::int64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto body = [&](State& state) {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::int64_t trial = next.fetch_add(1);
      if (trial >= trials) break;
      try {
        fn(state, trial);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };

  if (workers == 1) {
    body(states.front());
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back([&, w] { body(states[static_cast<std::size_t>(w)]); });
  }
  if (error) std::rethrow_exception(error);
  return states;
}

}  // namespace wnh
