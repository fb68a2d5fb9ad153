#ifndef SDREAL_TEST_SUPPORT_HPP
#define SDREAL_TEST_SUPPORT_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "sdreal/ctree.hpp"
#include "sdreal/digitsys.hpp"
#include "sdreal/exprdsl.hpp"
#include "sdreal/oracle.hpp"
#include "sdreal/rational.hpp"
#include "sdreal/sdstream.hpp"

namespace sdtest {

using sdreal::CTree;
using sdreal::FuncExpr;
using sdreal::Rational;
using sdreal::SignedDigit;

// Evaluation points in [-1,1], endpoints included.
inline std::vector<Rational> grid() {
  return {Rational(-1), Rational(-3, 4), Rational(-1, 2), Rational(-1, 3), Rational(0),
          Rational(1, 5), Rational(1, 2), Rational(7, 10), Rational(1)};
}

inline bool within(const Rational& a, const Rational& b, long n) { return abs(a - b) <= sdreal::pow2(-n); }

inline std::vector<SignedDigit> digits(const char* text) { return sdreal::parse_digits(text); }

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

  SignedDigit digit() { return static_cast<SignedDigit>(uniform(-1, 1)); }

  std::vector<SignedDigit> digits(std::size_t n) {
    std::vector<SignedDigit> out(n);
    for (auto& d : out) d = digit();
    return out;
  }

  // Stream with a random prefix followed by a random period.
  sdreal::DigitStream stream(std::size_t prefix_len = 12) {
    auto period = digits(static_cast<std::size_t>(uniform(1, 5)));
    return sdreal::DigitStream::periodic(digits(prefix_len), std::move(period));
  }

  // Rational in [lo, hi] with denominator at most `max_den`.
  Rational rational(const Rational& lo, const Rational& hi, int max_den = 12) {
    for (;;) {
      int den = uniform(1, max_den);
      Rational lo_scaled = lo * den, hi_scaled = hi * den;
      mpz_class a, b;
      mpz_cdiv_q(a.get_mpz_t(), lo_scaled.get_num_mpz_t(), lo_scaled.get_den_mpz_t());
      mpz_fdiv_q(b.get_mpz_t(), hi_scaled.get_num_mpz_t(), hi_scaled.get_den_mpz_t());
      if (a > b) continue;
      long num = uniform(static_cast<int>(a.get_si()), static_cast<int>(b.get_si()));
      Rational q(num, den);
      q.canonicalize();
      return q;
    }
  }

  Rational unit() { return rational(-1, 1, 16); }

  FuncExpr lin() {
    Rational u = rational(-1, 1);
    Rational room = 1 - abs(u);
    return FuncExpr::lin(u, rational(-room, room));
  }

  FuncExpr quad() {
    for (;;) {
      Rational u = rational(-2, 2), v = rational(-1, 1), w = rational(-1, 1);
      auto [lo, hi] = sdreal::quadratic_range(u, v, w);
      if (lo >= -1 && hi <= 1) return FuncExpr::quad(u, v, w);
    }
  }

  FuncExpr logistic() {
    Rational a(uniform(0, 16), 8);
    a.canonicalize();
    return FuncExpr::logistic(a);
  }

  // Random expression of nesting depth <= `depth` whose expanded degree
  // stays within `max_degree`.
  FuncExpr expr(int depth, std::size_t max_degree = 64) {
    if (depth == 0 || max_degree < 2 || uniform(0, 2) == 0) return atom(max_degree);
    if (coin()) {
      FuncExpr outer = expr(depth - 1, max_degree / 2);
      std::size_t rest = max_degree / sdreal::degree_bound(outer);
      return FuncExpr::comp(outer, expr(depth - 1, rest));
    }
    FuncExpr base = expr(depth - 1, max_degree / 2);
    std::size_t b = sdreal::degree_bound(base);
    std::size_t n_max = 1;
    std::size_t deg = b;
    while (n_max < 6 && deg * b <= max_degree) {
      deg *= b;
      ++n_max;
    }
    if (b == 1) n_max = 6;
    return FuncExpr::pow(base, static_cast<std::size_t>(uniform(1, static_cast<int>(n_max))));
  }

 private:
  FuncExpr atom(std::size_t max_degree) {
    int pick = uniform(0, max_degree >= 2 ? 2 : 0);
    if (pick == 0) return lin();
    if (pick == 1) return quad();
    return logistic();
  }

  std::mt19937_64 rng_;
};

}  // namespace sdtest

#endif  // SDREAL_TEST_SUPPORT_HPP
