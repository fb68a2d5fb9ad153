#include "sdreal/digitsys.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sdreal {

// ---------------------------------------------------------------------------
// Linear affine

Rational l1_norm(const std::vector<Rational>& u) {
  Rational sum = 0;
  for (const auto& x : u) sum += abs(x);
  return sum;
}

Step<LinState> lin_step(const LinState& s) {
  const Rational norm = l1_norm(s.u);
  if (norm <= Rational(1, 4)) {
    SignedDigit e = s.v < Rational(-1, 4) ? SignedDigit::N : s.v > Rational(1, 4) ? SignedDigit::P : SignedDigit::Z;
    LinState next{s.u, 2 * s.v - numeric(e)};
    for (auto& x : next.u) x *= 2;
    return WriteStep<LinState>{e, std::move(next)};
  }
  // Smallest coordinate carrying at least its share of the norm; halving it
  // shrinks |u|_1 by a factor of at least 1 - 1/(2n).
  const Rational share = norm / static_cast<long>(s.u.size());
  std::size_t i = 0;
  while (abs(s.u[i]) < share) ++i;
  ReadStep<LinState> read{static_cast<int>(i + 1), {}};
  for (SignedDigit d : kDigits) {
    LinState b = s;
    b.u[i] /= 2;
    b.v += s.u[i] * numeric(d) / 2;
    read.branches[slot(d)] = std::move(b);
  }
  return read;
}

std::size_t lin_measure(const LinState& s) {
  if (s.u.empty()) return 0;
  const Rational factor = 1 - Rational(1, 2 * static_cast<long>(s.u.size()));
  Rational norm = l1_norm(s.u);
  std::size_t m = 0;
  while (norm > Rational(1, 4)) {
    norm *= factor;
    ++m;
  }
  return m;
}

DigitalSystem<LinState> lin_system(int arity) { return {arity, lin_step, lin_measure}; }

CTree lin_tree(std::vector<Rational> u, Rational v, bool share_states) {
  for (auto& c : u) c.canonicalize();
  v.canonicalize();
  if (l1_norm(u) + abs(v) > 1)
    throw DomainError("lin: |u| + |v| = " + to_string(l1_norm(u) + abs(v)) + " exceeds 1");
  int arity = static_cast<int>(u.size());
  return build_tree(lin_system(arity), LinState{std::move(u), std::move(v)}, share_states);
}

// ---------------------------------------------------------------------------
// Quadratic

std::pair<Rational, Rational> quad_range(const QuadState& s) {
  // f(1), f(-1), and f(-v/2u) = w - v^2/(4u) when -1 <= -v/2u <= 1.
  Rational lo = s.u + s.w;
  Rational hi = lo;
  lo -= abs(s.v);
  hi += abs(s.v);
  if (s.u != 0 && abs(s.v) <= 2 * abs(s.u)) {
    Rational y = s.v * s.v;
    y /= s.u;
    mpq_div_2exp(y.get_mpq_t(), y.get_mpq_t(), 2);
    y = s.w - y;
    if (y < lo) lo = std::move(y);
    else if (y > hi) hi = std::move(y);
  }
  return {std::move(lo), std::move(hi)};
}

namespace {

// (e-1)/2 <= low && high <= (e+1)/2
bool fits_digit(const Rational& low, const Rational& high, SignedDigit e) {
  const long e1 = numeric(e);
  return mpq_cmp_si(low.get_mpq_t(), e1 - 1, 2) >= 0 && mpq_cmp_si(high.get_mpq_t(), e1 + 1, 2) <= 0;
}

void halve(Rational& q, unsigned bits) { mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), bits); }

}  // namespace

bool quad_test(const QuadState& s, SignedDigit e) {
  auto [low, high] = quad_range(s);
  return fits_digit(low, high, e);
}

QuadState quad_write(const QuadState& s, SignedDigit e) {
  QuadState out = s;
  mpq_mul_2exp(out.u.get_mpq_t(), out.u.get_mpq_t(), 1);
  mpq_mul_2exp(out.v.get_mpq_t(), out.v.get_mpq_t(), 1);
  mpq_mul_2exp(out.w.get_mpq_t(), out.w.get_mpq_t(), 1);
  out.w -= numeric(e);
  return out;
}

QuadState quad_read(const QuadState& s, SignedDigit d) {
  // (u/4, (u d + v)/2, u d^2/4 + v d/2 + w)
  QuadState out{s.u, s.v, s.w};
  halve(out.u, 2);
  if (d == SignedDigit::Z) {
    halve(out.v, 1);
    return out;
  }
  Rational half_v = s.v;
  halve(half_v, 1);
  if (d == SignedDigit::P) {
    out.v += s.u;
    out.w += out.u;
    out.w += half_v;
  } else {
    out.v -= s.u;
    out.w += out.u;
    out.w -= half_v;
  }
  halve(out.v, 1);
  return out;
}

Step<QuadState> quad_step(const QuadState& s) {
  auto [low, high] = quad_range(s);
  for (SignedDigit e : kDigits)
    if (fits_digit(low, high, e)) return WriteStep<QuadState>{e, quad_write(s, e)};
  return ReadStep<QuadState>{1, {quad_read(s, SignedDigit::N), quad_read(s, SignedDigit::Z),
                                 quad_read(s, SignedDigit::P)}};
}

std::size_t quad_measure(const QuadState& s) {
  // Approximate: halvings of the image width until it fits a digit interval.
  auto [low, high] = quad_range(s);
  Rational width = high - low;
  std::size_t m = 0;
  while (width > Rational(1, 2)) {
    width /= 2;
    ++m;
  }
  return m;
}

DigitalSystem<QuadState> quad_system() { return {1, quad_step, quad_measure}; }

namespace detail {

namespace {

using Wide = __int128;
constexpr std::int64_t kSmallLimit = std::int64_t{1} << 40;

bool is_zero(const Wide& z) { return z == 0; }
bool is_zero(const Integer& z) { return z == 0; }

unsigned trailing_zeros(const Wide& z) {
  auto lo = static_cast<std::uint64_t>(z);
  if (lo != 0) return static_cast<unsigned>(__builtin_ctzll(lo));
  return 64 + static_cast<unsigned>(__builtin_ctzll(static_cast<std::uint64_t>(z >> 64)));
}
unsigned trailing_zeros(const Integer& z) { return static_cast<unsigned>(mpz_scan1(z.get_mpz_t(), 0)); }

void shift_down(Wide& z, unsigned n) { z >>= n; }
void shift_down(Integer& z, unsigned n) { mpz_fdiv_q_2exp(z.get_mpz_t(), z.get_mpz_t(), n); }

Wide abs_of(const Wide& z) { return z < 0 ? -z : z; }
Integer abs_of(const Integer& z) { return abs(z); }

bool fits_small(const Wide& z) { return z > -kSmallLimit && z < kSmallLimit; }
bool fits_small(const Integer& z) { return z > -kSmallLimit && z < kSmallLimit; }

template <class Z>
using Coeffs = std::array<Z, 4>;

// Strips common twos and picks the storage, so equal quadratics compare equal.
template <class Z>
ScaledQuad normalize(Coeffs<Z> c) {
  unsigned shift = trailing_zeros(c[3]);
  for (int i = 0; i < 3; ++i)
    if (!is_zero(c[i])) shift = std::min(shift, trailing_zeros(c[i]));
  if (shift > 0)
    for (Z& z : c) shift_down(z, shift);
  if (fits_small(c[0]) && fits_small(c[1]) && fits_small(c[2]) && fits_small(c[3])) {
    ScaledQuad::Small out;
    for (int i = 0; i < 4; ++i) {
      if constexpr (std::is_same_v<Z, Integer>)
        out[i] = c[i].get_si();
      else
        out[i] = static_cast<std::int64_t>(c[i]);
    }
    return {out};
  }
  ScaledQuad::Big out;
  for (int i = 0; i < 4; ++i) {
    if constexpr (std::is_same_v<Z, Integer>) {
      out[i] = std::move(c[i]);
    } else {
      // Only reached from the word path, where values stay below 2^44.
      out[i] = Integer(static_cast<long>(c[i]));
    }
  }
  return {std::move(out)};
}

template <class Z>
Step<ScaledQuad> step_impl(const Coeffs<Z>& c) {
  const Z& u = c[0];
  const Z& v = c[1];
  const Z& w = c[2];
  const Z& den = c[3];
  // Extremum candidates scaled by D: f(1), f(-1), and W - V^2/(4U) when the
  // vertex lies in [-1,1]. Each is compared as 2c against (e -+ 1) D.
  const Z abs_v = abs_of(v);
  const Z at_ends = u + w;
  const Z twice_lo = 2 * (at_ends - abs_v);
  const Z twice_hi = 2 * (at_ends + abs_v);
  const bool vertex = !is_zero(u) && abs_v <= 2 * abs_of(u);
  // Vertex test: 4UW - V^2 against 2 U m D, flipped when U < 0.
  Z disc = 0;
  if (vertex) disc = 4 * u * w - v * v;

  for (SignedDigit e : kDigits) {
    const long e1 = numeric(e);
    const Z lo_den = (e1 - 1) * den;
    const Z hi_den = (e1 + 1) * den;
    if (twice_lo < lo_den || hi_den < twice_lo || twice_hi < lo_den || hi_den < twice_hi) continue;
    if (vertex) {
      const Z lo_v = 2 * u * lo_den;
      const Z hi_v = 2 * u * hi_den;
      const bool ok = u > 0 ? (lo_v <= disc && disc <= hi_v) : (hi_v <= disc && disc <= lo_v);
      if (!ok) continue;
    }
    return WriteStep<ScaledQuad>{e, normalize<Z>({2 * u, 2 * v, 2 * w - e1 * den, den})};
  }
  // (u/4, (u d + v)/2, u d^2/4 + v d/2 + w) over 4D.
  ReadStep<ScaledQuad> read{1, {}};
  const Z den4 = 4 * den;
  const Z v2 = 2 * v;
  const Z w4 = 4 * w;
  for (SignedDigit d : kDigits) {
    const long d1 = numeric(d);
    Z nw = d1 == 0 ? Z(w4) : Z(u + d1 * v2 + w4);
    read.branches[slot(d)] = normalize<Z>({u, 2 * (d1 * u + v), std::move(nw), den4});
  }
  return read;
}

Coeffs<Integer> as_big(const ScaledQuad& s) {
  if (auto* big = std::get_if<ScaledQuad::Big>(&s.coeffs)) return *big;
  const auto& small = std::get<ScaledQuad::Small>(s.coeffs);
  Coeffs<Integer> out;
  for (int i = 0; i < 4; ++i) out[i] = Integer(static_cast<long>(small[i]));
  return out;
}

}  // namespace

ScaledQuad scale_quad(const QuadState& s) {
  Integer den;
  mpz_lcm(den.get_mpz_t(), s.u.get_den_mpz_t(), s.v.get_den_mpz_t());
  mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), s.w.get_den_mpz_t());
  auto scaled = [&](const Rational& q) { return Integer(q.get_num() * (den / q.get_den())); };
  return normalize<Integer>({scaled(s.u), scaled(s.v), scaled(s.w), den});
}

QuadState unscale_quad(const ScaledQuad& s) {
  Coeffs<Integer> c = as_big(s);
  QuadState out{Rational(c[0], c[3]), Rational(c[1], c[3]), Rational(c[2], c[3])};
  out.u.canonicalize();
  out.v.canonicalize();
  out.w.canonicalize();
  return out;
}

Step<ScaledQuad> scaled_quad_step(const ScaledQuad& s) {
  if (auto* small = std::get_if<ScaledQuad::Small>(&s.coeffs))
    return step_impl<Wide>({(*small)[0], (*small)[1], (*small)[2], (*small)[3]});
  return step_impl<Integer>(std::get<ScaledQuad::Big>(s.coeffs));
}

}  // namespace detail

CTree quad_tree(Rational u, Rational v, Rational w, bool share_states) {
  QuadState s{std::move(u), std::move(v), std::move(w)};
  s.u.canonicalize();
  s.v.canonicalize();
  s.w.canonicalize();
  auto [low, high] = quad_range(s);
  if (low < -1 || high > 1)
    throw DomainError("quad(" + to_string(s.u) + ", " + to_string(s.v) + ", " + to_string(s.w) +
                      ") does not map I to I: range [" + to_string(low) + ", " + to_string(high) + "]");
  DigitalSystem<detail::ScaledQuad> sys{1, detail::scaled_quad_step,
                                        [](const detail::ScaledQuad& q) { return quad_measure(detail::unscale_quad(q)); }};
  return build_tree(std::move(sys), detail::scale_quad(s), share_states);
}

CTree logistic_tree(const Rational& a) {
  if (a < 0 || a > 2) throw DomainError("logistic: parameter " + to_string(a) + " outside [0,2]");
  return quad_tree(-a, 0, a - 1);
}

CTree iterate_tree(const CTree& t, std::size_t n) {
  if (n == 0) throw std::invalid_argument("iterate: exponent must be positive");
  CTree acc = t;
  for (std::size_t k = 1; k < n; ++k) acc = compose(acc, {t});
  return acc;
}

// ---------------------------------------------------------------------------
// From a modulus of uniform continuity

Step<ModState> modulus_step(const ModulusEvaluator& ev, const ModState& s) {
  // The current function g = 2^scale f - shift fits a digit interval once
  // f varies by at most 2^-(scale+2) over the input interval.
  const Rational eps = pow2(-(s.scale + 2));
  if (s.radius <= ev.modulus(eps)) {
    Rational q = ev.approx(s.center, s.radius) * pow2(s.scale) - s.shift;
    SignedDigit e = select_digit(q);
    return WriteStep<ModState>{e, ModState{s.center, s.radius, s.scale + 1, 2 * s.shift + numeric(e)}};
  }
  ReadStep<ModState> read{1, {}};
  const Rational half = s.radius / 2;
  for (SignedDigit d : kDigits)
    read.branches[slot(d)] = ModState{s.center + half * numeric(d), half, s.scale, s.shift};
  return read;
}

CTree tree_from_modulus(ModulusEvaluator ev) {
  auto shared = std::make_shared<const ModulusEvaluator>(std::move(ev));
  DigitalSystem<ModState> sys{1, [shared](const ModState& s) { return modulus_step(*shared, s); }, {}};
  return build_tree(std::move(sys), ModState{0, 1, 0, Integer(0)}, false);
}

}  // namespace sdreal

std::size_t std::hash<sdreal::detail::ScaledQuad>::operator()(const sdreal::detail::ScaledQuad& s) const noexcept {
  constexpr std::size_t kPrime = 1099511628211ULL;
  std::size_t h = 14695981039346656037ULL;
  if (auto* small = std::get_if<sdreal::detail::ScaledQuad::Small>(&s.coeffs)) {
    for (std::int64_t x : *small) {
      std::uint64_t z = static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      h = (h ^ (z ^ (z >> 31))) * kPrime;
    }
    return h;
  }
  for (const sdreal::Integer& z : std::get<sdreal::detail::ScaledQuad::Big>(s.coeffs)) {
    h = (h ^ static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 2)) * kPrime;
    for (std::size_t i = 0; i < mpz_size(z.get_mpz_t()); ++i)
      h = (h ^ mpz_getlimbn(z.get_mpz_t(), static_cast<mp_size_t>(i))) * kPrime;
  }
  return h;
}
