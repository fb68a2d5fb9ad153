#include "sdreal/sdstream.hpp"

#include <stdexcept>

namespace sdreal {

std::uint64_t total_expansions() {
  return detail::global_expansion_counter().load(std::memory_order_relaxed);
}

std::atomic<std::uint64_t>& detail::global_expansion_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

char to_char(SignedDigit d) {
  switch (d) {
    case SignedDigit::N: return 'N';
    case SignedDigit::Z: return 'Z';
    case SignedDigit::P: return 'P';
  }
  return '?';
}

SignedDigit digit_from_char(char c) {
  switch (c) {
    case 'N': return SignedDigit::N;
    case 'Z': return SignedDigit::Z;
    case 'P': return SignedDigit::P;
    default: throw std::invalid_argument(std::string("not a signed digit: '") + c + "'");
  }
}

bool in_digit_interval(const Rational& x, SignedDigit d) {
  return abs(x - Rational(numeric(d), 2)) <= Rational(1, 2);
}

DigitStream DigitStream::lazy(std::function<std::pair<SignedDigit, DigitStream>()> step) {
  auto cell = std::make_shared<const Cell>(
      [step = std::move(step)]() -> StreamCons {
        auto [d, rest] = step();
        return StreamCons{d, rest.cell_};
      },
      nullptr);
  return DigitStream(std::move(cell));
}

namespace {

DigitStream periodic_from(std::shared_ptr<const std::vector<SignedDigit>> prefix,
                          std::shared_ptr<const std::vector<SignedDigit>> period, std::size_t pos) {
  return DigitStream::lazy([prefix, period, pos] {
    SignedDigit d = pos < prefix->size() ? (*prefix)[pos]
                                         : (*period)[(pos - prefix->size()) % period->size()];
    // Re-enter the period instead of growing pos without bound.
    std::size_t next = pos + 1;
    if (next >= prefix->size() + period->size()) next = prefix->size() + (next - prefix->size()) % period->size();
    return std::pair{d, periodic_from(prefix, period, next)};
  });
}

}  // namespace

DigitStream DigitStream::periodic(std::vector<SignedDigit> prefix, std::vector<SignedDigit> period) {
  if (period.empty()) throw std::invalid_argument("periodic stream needs a non-empty period");
  return periodic_from(std::make_shared<const std::vector<SignedDigit>>(std::move(prefix)),
                       std::make_shared<const std::vector<SignedDigit>>(std::move(period)), 0);
}

DigitStream DigitStream::constant(SignedDigit d) { return periodic({}, {d}); }

SignedDigit DigitStream::head() const { return cell_->force().head; }

DigitStream DigitStream::tail() const { return DigitStream(cell_->force().tail); }

std::vector<SignedDigit> DigitStream::take(std::size_t n) const {
  std::vector<SignedDigit> out;
  out.reserve(n);
  const Cell* c = cell_.get();
  for (std::size_t i = 0; i < n; ++i) {
    const StreamCons& cons = c->force();
    out.push_back(cons.head);
    c = cons.tail.get();
  }
  return out;
}

std::size_t DigitStream::expanded_prefix(std::size_t limit) const {
  const Cell* c = cell_.get();
  std::size_t n = 0;
  while (n < limit && c->expanded()) {
    c = c->force().tail.get();
    ++n;
  }
  return n;
}

std::string render_digits(const std::vector<SignedDigit>& digits) {
  std::string s;
  s.reserve(digits.size());
  for (SignedDigit d : digits) s.push_back(to_char(d));
  return s;
}

std::vector<SignedDigit> parse_digits(std::string_view text) {
  std::vector<SignedDigit> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(digit_from_char(c));
  return out;
}

Rational sigma_approx(const DigitStream& s, std::size_t n) {
  // sum_{i<n} a_i 2^(n-1-i), then divide by 2^n once.
  Integer acc = 0;
  for (SignedDigit d : s.take(n)) {
    acc *= 2;
    acc += numeric(d);
  }
  Rational r(acc);
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(n));
  return r;
}

SignedDigit select_digit(const Rational& q) {
  if (q > Rational(1, 4)) return SignedDigit::P;
  if (abs(q) <= Rational(1, 4)) return SignedDigit::Z;
  return SignedDigit::N;
}

CauchySequence const_seq(const Rational& q) {
  if (!in_unit_interval(q)) throw DomainError("constant " + to_string(q) + " lies outside [-1,1]");
  return [q](std::size_t) { return q; };
}

namespace {

// After k steps the current sequence is n -> 2^k f(n+k) - offset, where
// offset accumulates the emitted digits (offset' = 2 offset + d). This is the
// same sequence the one-step rule produces, without nesting k closures.
DigitStream cauchy_from(std::shared_ptr<const CauchySequence> f, std::size_t k, Integer offset) {
  return DigitStream::lazy([f, k, offset = std::move(offset)] {
    Rational q = (*f)(k + 2);
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
    q -= offset;
    SignedDigit d = select_digit(q);
    Integer next = 2 * offset + numeric(d);
    return std::pair{d, cauchy_from(f, k + 1, std::move(next))};
  });
}

}  // namespace

DigitStream cauchy_to_stream(CauchySequence f) {
  return cauchy_from(std::make_shared<const CauchySequence>(std::move(f)), 0, Integer(0));
}

}  // namespace sdreal
