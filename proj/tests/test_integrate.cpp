#include <doctest.h>

#include "sdreal/ctree.hpp"
#include "sdreal/digitsys.hpp"
#include "sdreal/exprdsl.hpp"
#include "sdreal/integrate.hpp"
#include "sdreal/oracle.hpp"
#include "test_support.hpp"

using namespace sdreal;
using sdtest::within;

namespace {

// Integral of a(1 - x^2) - 1 over [-1,1] from its antiderivative.
Rational logistic_integral(const Rational& a) {
  auto antiderivative = [&](const Rational& x) -> Rational { return a * (x - x * x * x / 3) - x; };
  return antiderivative(1) - antiderivative(-1);
}

bool is_power_of_two(const Integer& z) { return z > 0 && mpz_popcount(z.get_mpz_t()) == 1; }

}  // namespace

TEST_CASE("level 0 is 0 with bound 2") {
  IntegralResult r = integral(logistic_tree(2), 0);
  CHECK(r.value == 0);
  CHECK(r.error_bound == 2);
  CHECK(r.nodes_visited == 0);
}

TEST_CASE("the constant Z tree integrates to exactly 0 at every level") {
  CTree z = CTree::constant(1, SignedDigit::Z);
  for (std::size_t k = 0; k <= 40; ++k) CHECK(integral(z, k).value == 0);
}

TEST_CASE("the constant N tree at level k is -2(1 - 2^-k)") {
  CTree n = CTree::constant(1, SignedDigit::N);
  for (std::size_t k = 0; k <= 30; ++k) CHECK(integral(n, k).value == -2 * (1 - pow2(-static_cast<long>(k))));
}

TEST_CASE("antiderivative oracle for the logistic family is 4a/3 - 2") {
  for (int i = 0; i <= 16; ++i) {
    Rational a(i, 8);
    a.canonicalize();
    CHECK(logistic_integral(a) == 4 * a / 3 - 2);
    CHECK(integral_exact(FuncExpr::logistic(a)) == logistic_integral(a));
  }
  CHECK(logistic_integral(Rational(3, 2)) == 0);
}

TEST_CASE("logistic(3/2) at level 10 is within 2^-9 of 0") {
  IntegralResult r = integral(logistic_tree(Rational(3, 2)), 10);
  CHECK(r.error_bound == pow2(-9));
  CHECK(abs(r.value) <= r.error_bound);
  CHECK(r.value == Rational(-115, 2097152));
}

TEST_CASE("lin(1/4, 1/5) integrates to within 2^(1-k) of 2/5") {
  CTree t = lin_tree({Rational(1, 4)}, Rational(1, 5));
  CHECK(integral_exact(FuncExpr::lin(Rational(1, 4), Rational(1, 5))) == Rational(2, 5));
  for (std::size_t k = 1; k <= 20; ++k) {
    IntegralResult r = integral(t, k);
    CHECK(abs(r.value - Rational(2, 5)) <= r.error_bound);
  }
}

TEST_CASE("property: atoms on a coefficient grid meet the error bound") {
  std::vector<FuncExpr> atoms;
  for (int u = -4; u <= 4; u += 2)
    for (int v = -4; v <= 4; v += 2)
      if (std::abs(u) + std::abs(v) <= 4) atoms.push_back(FuncExpr::lin(Rational(u, 4), Rational(v, 4)));
  for (int a = 0; a <= 8; ++a) atoms.push_back(FuncExpr::logistic(Rational(a, 4)));
  for (const FuncExpr& e : atoms) {
    CTree t = to_tree(e);
    Rational exact = integral_exact(e);
    for (std::size_t k = 1; k <= 12; ++k) {
      IntegralResult r = integral(t, k);
      CHECK_MESSAGE(abs(r.value - exact) <= r.error_bound, to_text(e), " k=", k);
    }
  }
}

TEST_CASE("property: random expressions meet the error bound") {
  sdtest::Gen gen(41);
  for (int trial = 0; trial < 30; ++trial) {
    FuncExpr e = gen.expr(2, 8);
    CTree t = to_tree(e);
    Rational exact = integral_exact(e);
    for (std::size_t k = 1; k <= 8; ++k) {
      IntegralResult r = integral(t, k);
      CHECK_MESSAGE(abs(r.value - exact) <= r.error_bound, to_text(e), " k=", k);
    }
  }
}

TEST_CASE("property: successive levels refine within 2^(1-k) + 2^-k") {
  sdtest::Gen gen(42);
  for (int trial = 0; trial < 20; ++trial) {
    FuncExpr e = gen.expr(1, 4);
    CTree t = to_tree(e);
    Rational prev = integral(t, 0).value;
    for (std::size_t k = 1; k <= 10; ++k) {
      Rational cur = integral(t, k).value;
      CHECK(abs(cur - prev) <= pow2(2 - static_cast<long>(k)) + pow2(1 - static_cast<long>(k)));
      prev = cur;
    }
  }
}

TEST_CASE("values are dyadic") {
  sdtest::Gen gen(43);
  for (int trial = 0; trial < 20; ++trial) {
    CTree t = to_tree(gen.expr(1, 4));
    CHECK(is_power_of_two(integral(t, 9).value.get_den()));
  }
}

TEST_CASE("the parallel fold matches the serial reference exactly") {
  sdtest::Gen gen(44);
  for (int trial = 0; trial < 15; ++trial) {
    FuncExpr e = gen.expr(2, 8);
    std::size_t k = static_cast<std::size_t>(gen.uniform(1, 9));
    IntegralResult par = integral(to_tree(e), k);
    IntegralResult ser = integral_serial(to_tree(e), k);
    CHECK(par.value == ser.value);
    CHECK(par.nodes_visited == ser.nodes_visited);
    CHECK(par.error_bound == ser.error_bound);
  }
}

TEST_CASE("middle branches of reads are never visited") {
  auto stats = std::make_shared<ExpansionStats>();
  CTree poison = CTree::lazy(1, []() -> Node { throw std::logic_error("middle branch visited"); }, stats);
  CTree root = CTree::lazy(
      1,
      [poison] {
        return Node::read(1, {CTree::constant(1, SignedDigit::N), poison, CTree::constant(1, SignedDigit::P)});
      },
      stats);
  for (std::size_t k = 1; k <= 12; ++k) {
    CHECK(integral(root, k).value == 0);
    CHECK(integral_serial(root, k).value == 0);
  }
  CHECK_FALSE(poison.expanded());
}

TEST_CASE("repeating an integral reuses the memoized nodes") {
  CTree t = logistic_tree(Rational(3, 4));
  IntegralResult first = integral(t, 10);
  std::uint64_t expanded = t.expansion_count();
  IntegralResult again = integral(t, 10);
  CHECK(again.value == first.value);
  CHECK(t.expansion_count() == expanded);
  integral(t, 11);
  CHECK(t.expansion_count() > expanded);
}

TEST_CASE("exceeding the node budget raises ResourceLimit") {
  CTree t = logistic_tree(2);
  CHECK_THROWS_AS(integral(t, 16, 100), ResourceLimit);
  CHECK_THROWS_AS(integral_serial(t, 16, 100), ResourceLimit);
  CHECK_NOTHROW(integral(t, 4, 1000));
}

TEST_CASE("exceeding the expansion budget raises ResourceLimit") {
  CHECK_THROWS_AS(integral(logistic_tree(Rational(5, 4)), 14, kDefaultIntegralBudget, 50), ResourceLimit);
  CHECK_THROWS_AS(integral_serial(logistic_tree(Rational(5, 4)), 14, kDefaultIntegralBudget, 50), ResourceLimit);
  // Cached nodes cost nothing against the expansion budget.
  CTree t = logistic_tree(Rational(5, 4));
  integral(t, 8);
  CHECK_NOTHROW(integral(t, 8, kDefaultIntegralBudget, 1));
}

TEST_CASE("integration requires a one-input tree") {
  CHECK_THROWS_AS(integral(lin_tree({Rational(1, 4), Rational(1, 4)}, 0), 3), std::invalid_argument);
}
