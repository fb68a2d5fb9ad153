#ifndef SDREAL_SDSTREAM_HPP
#define SDREAL_SDSTREAM_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sdreal/lazy.hpp"
#include "sdreal/rational.hpp"

namespace sdreal {

/// Binary signed digit: -1, 0 or +1.
enum class SignedDigit : std::int8_t { N = -1, Z = 0, P = 1 };

inline constexpr std::array<SignedDigit, 3> kDigits = {SignedDigit::N, SignedDigit::Z,
                                                      SignedDigit::P};

inline constexpr int numeric(SignedDigit d) { return static_cast<int>(d); }

/// Position of `d` in the fixed (N, Z, P) order.
inline constexpr std::size_t slot(SignedDigit d) { return static_cast<std::size_t>(numeric(d) + 1); }

char to_char(SignedDigit d);
SignedDigit digit_from_char(char c);

/// x lies in I_d = [d/2 - 1/2, d/2 + 1/2].
bool in_digit_interval(const Rational& x, SignedDigit d);

class DigitStream;

struct StreamCons {
  SignedDigit head;
  std::shared_ptr<const LazyCell<StreamCons>> tail;
};

/// Infinite, persistent stream of signed digits denoting
/// sum_i a_i 2^-(i+1) in [-1,1]. Each position is produced at most once and
/// then cached, so copies and repeated traversals see the same digits.
class DigitStream {
 public:
  using Cell = LazyCell<StreamCons>;

  /// Stream whose first cell is produced by `step`; the step returns the
  /// head digit together with the rest of the stream.
  static DigitStream lazy(std::function<std::pair<SignedDigit, DigitStream>()> step);

  /// `prefix` followed by `period` repeated forever (period must be non-empty).
  static DigitStream periodic(std::vector<SignedDigit> prefix, std::vector<SignedDigit> period);

  static DigitStream constant(SignedDigit d);

  SignedDigit head() const;
  DigitStream tail() const;

  /// First `n` digits.
  std::vector<SignedDigit> take(std::size_t n) const;

  /// Number of leading positions already materialised.
  std::size_t expanded_prefix(std::size_t limit) const;

  explicit DigitStream(std::shared_ptr<const Cell> cell) : cell_(std::move(cell)) {}

 private:
  std::shared_ptr<const Cell> cell_;
};

/// "NZP..." rendering of a digit sequence.
std::string render_digits(const std::vector<SignedDigit>& digits);
std::vector<SignedDigit> parse_digits(std::string_view text);

/// Fast Cauchy sequence: approx(n) is within 2^-n of the intended real.
using CauchySequence = std::function<Rational(std::size_t)>;

/// Partial valuation sum_{i<n} a_i 2^-(i+1); within 2^-n of the stream's value.
Rational sigma_approx(const DigitStream& s, std::size_t n);

/// P if q > 1/4, Z if |q| <= 1/4, N otherwise.
SignedDigit select_digit(const Rational& q);

/// n -> q. Throws DomainError for |q| > 1.
CauchySequence const_seq(const Rational& q);

/// Converts a fast Cauchy sequence for a point of [-1,1] into a digit stream.
/// Each step queries the current sequence at index 2, emits
/// select_digit of that value and continues with n -> 2 f(n+1) - d.
DigitStream cauchy_to_stream(CauchySequence f);

}  // namespace sdreal

#endif  // SDREAL_SDSTREAM_HPP
