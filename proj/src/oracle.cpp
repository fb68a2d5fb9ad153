#include "sdreal/oracle.hpp"

#include <algorithm>

namespace sdreal {

bool expr::Comp::operator==(const Comp& o) const { return *outer == *o.outer && *inner == *o.inner; }
bool expr::Pow::operator==(const Pow& o) const { return n == o.n && *base == *o.base; }

std::pair<Rational, Rational> quadratic_range(const Rational& u, const Rational& v, const Rational& w) {
  Rational at_plus = u + v + w;
  Rational at_minus = u - v + w;
  Rational lo = std::min(at_plus, at_minus);
  Rational hi = std::max(at_plus, at_minus);
  if (u != 0) {
    Rational x = -v / (2 * u);
    if (abs(x) <= 1) {
      Rational y = (u * x + v) * x + w;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  }
  return {lo, hi};
}

namespace {

void require_maps_unit_interval(const Rational& lo, const Rational& hi, const std::string& what) {
  if (lo < -1 || hi > 1)
    throw DomainError(what + " does not map I to I (range [" + to_string(lo) + ", " + to_string(hi) + "])");
}

}  // namespace

FuncExpr FuncExpr::lin(Rational u, Rational v) {
  u.canonicalize();
  v.canonicalize();
  require_maps_unit_interval(v - abs(u), v + abs(u), "lin(" + to_string(u) + ", " + to_string(v) + ")");
  return FuncExpr(expr::Lin{std::move(u), std::move(v)});
}

FuncExpr FuncExpr::quad(Rational u, Rational v, Rational w) {
  u.canonicalize();
  v.canonicalize();
  w.canonicalize();
  auto [lo, hi] = quadratic_range(u, v, w);
  require_maps_unit_interval(lo, hi,
                             "quad(" + to_string(u) + ", " + to_string(v) + ", " + to_string(w) + ")");
  return FuncExpr(expr::Quad{std::move(u), std::move(v), std::move(w)});
}

FuncExpr FuncExpr::logistic(Rational a) {
  a.canonicalize();
  if (a < 0 || a > 2) throw DomainError("logistic(" + to_string(a) + ") does not map I to I (need 0 <= a <= 2)");
  return FuncExpr(expr::Logistic{std::move(a)});
}

FuncExpr FuncExpr::comp(FuncExpr outer, FuncExpr inner) {
  return FuncExpr(expr::Comp{std::make_shared<const FuncExpr>(std::move(outer)),
                             std::make_shared<const FuncExpr>(std::move(inner))});
}

FuncExpr FuncExpr::pow(FuncExpr base, std::size_t n) {
  if (n == 0) throw std::invalid_argument("pow: exponent must be positive");
  return FuncExpr(expr::Pow{std::make_shared<const FuncExpr>(std::move(base)), n});
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string to_text(const FuncExpr& e) {
  return std::visit(
      Overloaded{
          [](const expr::Lin& n) { return "lin(" + to_string(n.u) + ", " + to_string(n.v) + ")"; },
          [](const expr::Quad& n) {
            return "quad(" + to_string(n.u) + ", " + to_string(n.v) + ", " + to_string(n.w) + ")";
          },
          [](const expr::Logistic& n) { return "logistic(" + to_string(n.a) + ")"; },
          [](const expr::Comp& n) {
            std::string inner = to_text(*n.inner);
            if (std::holds_alternative<expr::Comp>(n.inner->node())) inner = "(" + inner + ")";
            return to_text(*n.outer) + " o " + inner;
          },
          [](const expr::Pow& n) { return "pow(" + to_text(*n.base) + ", " + std::to_string(n.n) + ")"; },
      },
      e.node());
}

// ---------------------------------------------------------------------------
// Polynomials

namespace {

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  Polynomial out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// p(q(x)) by Horner.
Polynomial substitute(const Polynomial& p, const Polynomial& q) {
  Polynomial acc{p.back()};
  for (std::size_t i = p.size() - 1; i-- > 0;) {
    acc = multiply(acc, q);
    acc[0] += p[i];
  }
  return acc;
}

Polynomial atom_poly(const FuncExpr& e) {
  return std::visit(Overloaded{
                        [](const expr::Lin& n) { return Polynomial{n.v, n.u}; },
                        [](const expr::Quad& n) { return Polynomial{n.w, n.v, n.u}; },
                        [](const expr::Logistic& n) { return Polynomial{n.a - 1, 0, -n.a}; },
                        [](const auto&) -> Polynomial { return {}; },
                    },
                    e.node());
}

}  // namespace

std::size_t degree_bound(const FuncExpr& e) {
  constexpr std::size_t kHuge = std::size_t{1} << 62;
  return std::visit(Overloaded{
                        [](const expr::Lin&) -> std::size_t { return 1; },
                        [](const expr::Quad&) -> std::size_t { return 2; },
                        [](const expr::Logistic&) -> std::size_t { return 2; },
                        [&](const expr::Comp& n) -> std::size_t {
                          std::size_t a = degree_bound(*n.outer), b = degree_bound(*n.inner);
                          return a != 0 && b > kHuge / a ? kHuge : a * b;
                        },
                        [&](const expr::Pow& n) -> std::size_t {
                          std::size_t base = degree_bound(*n.base), d = 1;
                          for (std::size_t i = 0; i < n.n && d < kHuge; ++i) d = base != 0 && d > kHuge / base ? kHuge : d * base;
                          return d;
                        },
                    },
                    e.node());
}

Polynomial expand(const FuncExpr& e, std::size_t max_degree) {
  if (degree_bound(e) > max_degree)
    throw OracleCapExceeded("oracle: expansion of " + to_text(e) + " exceeds degree " + std::to_string(max_degree));
  return std::visit(Overloaded{
                        [&](const expr::Comp& n) { return substitute(expand(*n.outer, max_degree), expand(*n.inner, max_degree)); },
                        [&](const expr::Pow& n) {
                          Polynomial base = expand(*n.base, max_degree);
                          Polynomial acc = base;
                          for (std::size_t i = 1; i < n.n; ++i) acc = substitute(acc, base);
                          return acc;
                        },
                        [&](const auto&) { return atom_poly(e); },
                    },
                    e.node());
}

Rational eval_poly(const Polynomial& p, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

namespace {

Rational eval_unchecked(const FuncExpr& e, const Rational& x) {
  return std::visit(Overloaded{
                        [&](const expr::Lin& n) -> Rational { return n.u * x + n.v; },
                        [&](const expr::Quad& n) -> Rational { return (n.u * x + n.v) * x + n.w; },
                        [&](const expr::Logistic& n) -> Rational { return n.a * (1 - x * x) - 1; },
                        [&](const expr::Comp& n) { return eval_unchecked(*n.outer, eval_unchecked(*n.inner, x)); },
                        [&](const expr::Pow& n) {
                          Rational y = x;
                          for (std::size_t i = 0; i < n.n; ++i) y = eval_unchecked(*n.base, y);
                          return y;
                        },
                    },
                    e.node());
}

}  // namespace

Rational eval_exact(const FuncExpr& e, const Rational& x) {
  if (!in_unit_interval(x)) throw DomainError("eval: point " + to_string(x) + " lies outside [-1,1]");
  return eval_unchecked(e, x);
}

Rational integral_exact(const FuncExpr& e) {
  Polynomial p = expand(e);
  // int_{-1}^{1} x^k = 2/(k+1) for even k, 0 for odd k
  Rational sum = 0;
  for (std::size_t k = 0; k < p.size(); k += 2) sum += p[k] * Rational(2, static_cast<unsigned long>(k + 1));
  return sum;
}

Rational modulus_exact(const FuncExpr& e, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("modulus: eps must be positive");
  Polynomial p = expand(e);
  Rational lipschitz = 0;
  for (std::size_t k = 1; k < p.size(); ++k) lipschitz += abs(p[k]) * static_cast<unsigned long>(k);
  if (lipschitz == 0) return eps;
  return eps / lipschitz;
}

}  // namespace sdreal
