#ifndef SDREAL_LAZY_HPP
#define SDREAL_LAZY_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace sdreal {

/// Counter shared by every node of one tree family (a builder invocation, a
/// composition, ...). Counts node expansions, never decreases.
struct ExpansionStats {
  std::atomic<std::uint64_t> nodes_expanded{0};
};

/// Process-wide number of tree node expansions, across all families.
std::uint64_t total_expansions();

namespace detail {

std::atomic<std::uint64_t>& global_expansion_counter();

// Releasing a long chain of cells through nested shared_ptr destructors would
// recurse once per cell. Released payloads are parked here and destroyed by
// the outermost destructor in a loop instead.
template <class T>
class DeferredRelease {
 public:
  using Payload = std::pair<std::unique_ptr<T>, std::function<T()>>;

  static void push(Payload p) {
    auto& self = instance();
    self.pending_.push_back(std::move(p));
    if (self.draining_) return;
    self.draining_ = true;
    while (!self.pending_.empty()) {
      Payload next = std::move(self.pending_.back());
      self.pending_.pop_back();
      next.first.reset();
      next.second = nullptr;
    }
    self.draining_ = false;
  }

 private:
  static DeferredRelease& instance() {
    thread_local DeferredRelease r;
    return r;
  }
  std::vector<Payload> pending_;
  bool draining_ = false;
};

}  // namespace detail

/// A value computed on first demand and cached. The first thread to demand
/// the value runs the thunk; concurrent demands wait for it. The thunk is
/// released once the value is published. Thunks must be pure.
template <class T>
class LazyCell {
 public:
  using Thunk = std::function<T()>;

  LazyCell(Thunk thunk, std::shared_ptr<ExpansionStats> stats)
      : thunk_(std::move(thunk)), stats_(std::move(stats)) {}

  LazyCell(const LazyCell&) = delete;
  LazyCell& operator=(const LazyCell&) = delete;

  ~LazyCell() {
    detail::DeferredRelease<T>::push({std::unique_ptr<T>(value_), std::move(thunk_)});
  }

  const T& force() const {
    for (;;) {
      int s = state_.load(std::memory_order_acquire);
      if (s == kReady) return *value_;
      if (s == kEmpty && state_.compare_exchange_strong(s, kBusy, std::memory_order_acquire)) break;
      if (s == kBusy) state_.wait(kBusy, std::memory_order_acquire);
    }
    try {
      value_ = new T(thunk_());
    } catch (...) {
      state_.store(kEmpty, std::memory_order_release);
      state_.notify_all();
      throw;
    }
    Thunk done = std::move(thunk_);
    thunk_ = nullptr;
    if (stats_) {
      stats_->nodes_expanded.fetch_add(1, std::memory_order_relaxed);
      detail::global_expansion_counter().fetch_add(1, std::memory_order_relaxed);
    }
    state_.store(kReady, std::memory_order_release);
    state_.notify_all();
    detail::DeferredRelease<T>::push({nullptr, std::move(done)});
    return *value_;
  }

  bool expanded() const { return state_.load(std::memory_order_acquire) == kReady; }

  const std::shared_ptr<ExpansionStats>& stats() const { return stats_; }

 private:
  static constexpr int kEmpty = 0;
  static constexpr int kBusy = 1;
  static constexpr int kReady = 2;

  mutable Thunk thunk_;
  std::shared_ptr<ExpansionStats> stats_;
  mutable T* value_ = nullptr;
  mutable std::atomic<int> state_{kEmpty};
};

}  // namespace sdreal

#endif  // SDREAL_LAZY_HPP
