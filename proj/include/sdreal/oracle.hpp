#ifndef SDREAL_ORACLE_HPP
#define SDREAL_ORACLE_HPP

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sdreal/rational.hpp"

namespace sdreal {

class FuncExpr;

namespace expr {
struct Lin {
  Rational u, v;
  bool operator==(const Lin&) const = default;
};
struct Quad {
  Rational u, v, w;
  bool operator==(const Quad&) const = default;
};
struct Logistic {
  Rational a;
  bool operator==(const Logistic&) const = default;
};
struct Comp {
  std::shared_ptr<const FuncExpr> outer, inner;
  bool operator==(const Comp& o) const;
};
struct Pow {
  std::shared_ptr<const FuncExpr> base;
  std::size_t n;
  bool operator==(const Pow& o) const;
};
}  // namespace expr

/// A function I -> I built from the supported families. Every constructor
/// checks that its atom maps I into I; compositions and powers of such
/// functions do so automatically.
class FuncExpr {
 public:
  using Variant = std::variant<expr::Lin, expr::Quad, expr::Logistic, expr::Comp, expr::Pow>;

  static FuncExpr lin(Rational u, Rational v);
  static FuncExpr quad(Rational u, Rational v, Rational w);
  static FuncExpr logistic(Rational a);
  /// outer o inner
  static FuncExpr comp(FuncExpr outer, FuncExpr inner);
  static FuncExpr pow(FuncExpr base, std::size_t n);

  const Variant& node() const { return *node_; }

  bool operator==(const FuncExpr& o) const { return *node_ == *o.node_; }

 private:
  explicit FuncExpr(Variant v) : node_(std::make_shared<const Variant>(std::move(v))) {}
  std::shared_ptr<const Variant> node_;
};

/// Text form accepted by the expression parser.
std::string to_text(const FuncExpr& e);

/// Raised when a polynomial expansion would exceed the degree cap.
class OracleCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kOracleMaxDegree = 64;

/// Coefficients, constant term first.
using Polynomial = std::vector<Rational>;

std::size_t degree_bound(const FuncExpr& e);
Polynomial expand(const FuncExpr& e, std::size_t max_degree = kOracleMaxDegree);
Rational eval_poly(const Polynomial& p, const Rational& x);

/// Exact f(x). Throws DomainError for |x| > 1.
Rational eval_exact(const FuncExpr& e, const Rational& x);

/// Exact integral over [-1,1].
Rational integral_exact(const FuncExpr& e);

/// eps / L for a Lipschitz bound L = sum k |c_k| of the expansion; eps when
/// the function is constant.
Rational modulus_exact(const FuncExpr& e, const Rational& eps);

/// Exact min/max of u x^2 + v x + w over [-1,1].
std::pair<Rational, Rational> quadratic_range(const Rational& u, const Rational& v, const Rational& w);

}  // namespace sdreal

#endif  // SDREAL_ORACLE_HPP
