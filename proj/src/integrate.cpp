#include "sdreal/integrate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>

namespace sdreal {

namespace {

constexpr int kSpawnDepth = 10;

// num / 2^exp held in a machine word while exp stays small; level values
// are bounded by 2 in magnitude, so num fits whenever exp <= kWordExp.
class Dyadic {
 public:
  Dyadic() = default;
  explicit Dyadic(Rational q) : word_(false), big_(std::move(q)) {}

  // x / 2 + d
  static Dyadic half_plus(Dyadic x, int d) {
    if (x.word_ && x.exp_ < kWordExp) {
      x.exp_ += 1;
      x.num_ += static_cast<Wide>(d) << x.exp_;
      x.reduce();
      return x;
    }
    Rational q = x.value();
    q /= 2;
    q += d;
    return Dyadic(std::move(q));
  }

  // (a + b) / 2
  static Dyadic average(const Dyadic& a, const Dyadic& b) {
    if (a.word_ && b.word_) {
      int e = std::max(a.exp_, b.exp_);
      if (e < kWordExp) {
        Dyadic out;
        out.num_ = (a.num_ << (e - a.exp_)) + (b.num_ << (e - b.exp_));
        out.exp_ = e + 1;
        out.reduce();
        return out;
      }
    }
    Rational q = a.value() + b.value();
    q /= 2;
    return Dyadic(std::move(q));
  }

  Rational value() const {
    if (!word_) return big_;
    auto mag = static_cast<unsigned __int128>(num_ < 0 ? -num_ : num_);
    Integer n(static_cast<unsigned long>(mag >> 64));
    n <<= 64;
    n += static_cast<unsigned long>(mag);
    if (num_ < 0) n = -n;
    Rational q(n);
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exp_));
    return q;
  }

 private:
  using Wide = __int128;
  static constexpr int kWordExp = 120;

  void reduce() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && (num_ & 1) == 0) {
      num_ >>= 1;
      --exp_;
    }
  }

  bool word_ = true;
  Wide num_ = 0;
  int exp_ = 0;
  Rational big_;
};

class Integrator {
 public:
  Integrator(std::uint64_t budget, std::uint64_t expansion_budget)
      : budget_(budget), expansion_budget_(expansion_budget), expansions_at_start_(expansions()) {}

  // Level-k approximation of the integral of t.
  Dyadic level(const CTree& t, std::size_t k, int spawn) {
    if (k == 0) return Dyadic();
    return fold(t, k, spawn);
  }

  std::uint64_t visited() const { return visited_.load(std::memory_order_relaxed); }

  void rethrow() {
    if (error_seen_.load(std::memory_order_acquire)) {
      std::lock_guard lock(mu_);
      std::rethrow_exception(error_);
    }
  }

  template <class F>
  void guarded(F&& f) {
    if (error_seen_.load(std::memory_order_acquire)) return;
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
      error_seen_.store(true, std::memory_order_release);
    }
  }

 private:
  Dyadic fold(const CTree& t, std::size_t k, int spawn) {
    if (visited_.fetch_add(1, std::memory_order_relaxed) >= budget_) {
      throw ResourceLimit("integral: node budget of " + std::to_string(budget_) + " exhausted");
    }
    if (!t.expanded() && expansions() - expansions_at_start_ >= expansion_budget_) {
      throw ResourceLimit("integral: expansion budget of " + std::to_string(expansion_budget_) + " exhausted");
    }
    const Node& node = t.expand();
    if (node.is_write()) return Dyadic::half_plus(level(node.next(), k - 1, spawn), numeric(node.digit));
    Dyadic lo, hi;
    if (spawn > 0) {
      const CTree* left = &node.branch(SignedDigit::N);
#pragma omp task shared(lo) firstprivate(left, k, spawn)
      guarded([&] { lo = fold(*left, k, spawn - 1); });
      guarded([&] { hi = fold(node.branch(SignedDigit::P), k, spawn - 1); });
#pragma omp taskwait
      rethrow();
    } else {
      lo = fold(node.branch(SignedDigit::N), k, 0);
      hi = fold(node.branch(SignedDigit::P), k, 0);
    }
    return Dyadic::average(lo, hi);
  }

  static std::uint64_t expansions() { return detail::global_expansion_counter().load(std::memory_order_relaxed); }

  std::uint64_t budget_;
  std::uint64_t expansion_budget_;
  std::uint64_t expansions_at_start_;
  std::atomic<std::uint64_t> visited_{0};
  std::mutex mu_;
  std::exception_ptr error_;
  std::atomic<bool> error_seen_{false};
};

IntegralResult finish(Rational value, std::size_t k, std::uint64_t visited) {
  return IntegralResult{std::move(value), pow2(1 - static_cast<long>(k)), visited};
}

void check_arity(const CTree& t) {
  if (t.arity() != 1) throw std::invalid_argument("integral: tree must have exactly one input");
}

}  // namespace

IntegralResult integral(const CTree& t, std::size_t k, std::uint64_t budget, std::uint64_t expansion_budget) {
  check_arity(t);
  Integrator integrator(budget, expansion_budget);
  Dyadic value;
#pragma omp parallel default(none) shared(integrator, value, t, k)
#pragma omp single
  {
    integrator.guarded([&] { value = integrator.level(t, k, kSpawnDepth); });
  }
  integrator.rethrow();
  return finish(value.value(), k, integrator.visited());
}

IntegralResult integral_serial(const CTree& t, std::size_t k, std::uint64_t budget,
                               std::uint64_t expansion_budget) {
  check_arity(t);
  Integrator integrator(budget, expansion_budget);
  Dyadic value = integrator.level(t, k, 0);
  return finish(value.value(), k, integrator.visited());
}

}  // namespace sdreal
