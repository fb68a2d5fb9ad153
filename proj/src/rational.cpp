#include "sdreal/rational.hpp"

#include <cctype>
#include <functional>

namespace sdreal {

Rational pow2(long e) {
  Integer p = 1;
  if (e >= 0) {
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    return Rational(p);
  }
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  return Rational(Integer(1), p);
}

std::string to_string(const Rational& q) { return q.get_str(10); }

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    Integer d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    result = Rational(Integer(std::string(num), 10), d);
    result.canonicalize();
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac)))
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    std::string digits = std::string(whole) + std::string(frac);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    result = Rational(Integer(digits, 10), scale);
    result.canonicalize();
  } else {
    if (!all_digits(body))
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    result = Rational(Integer(std::string(body), 10));
  }
  return negative ? Rational(-result) : result;
}

std::string to_decimal(const Rational& q, int digits) {
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Rational scaled = abs(q) * scale;
  // round half away from zero
  Integer twice = 2 * scaled.get_num() + scaled.get_den();
  Integer rounded;
  mpz_fdiv_q(rounded.get_mpz_t(), twice.get_mpz_t(), Integer(2 * scaled.get_den()).get_mpz_t());
  std::string s = rounded.get_str(10);
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits))
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (q < 0 && rounded != 0) s.insert(0, "-");
  return s;
}

std::size_t hash_value(const Rational& q) {
  auto limb_hash = [](const mpz_class& z) {
    std::size_t h = std::hash<long>{}(static_cast<long>(mpz_size(z.get_mpz_t())) * mpz_sgn(z.get_mpz_t()));
    for (std::size_t i = 0; i < mpz_size(z.get_mpz_t()); ++i)
      h = h * 1099511628211ULL ^ mpz_getlimbn(z.get_mpz_t(), static_cast<mp_size_t>(i));
    return h;
  };
  return limb_hash(q.get_num()) * 31 + limb_hash(q.get_den());
}

}  // namespace sdreal
