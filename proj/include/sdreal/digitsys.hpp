#ifndef SDREAL_DIGITSYS_HPP
#define SDREAL_DIGITSYS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "sdreal/ctree.hpp"
#include "sdreal/rational.hpp"
#include "sdreal/sdstream.hpp"

namespace sdreal {

template <class State>
struct WriteStep {
  SignedDigit digit;
  State next;
};

template <class State>
struct ReadStep {
  int index;  // 1-based input
  std::array<State, 3> branches;  // N, Z, P
};

template <class State>
using Step = std::variant<WriteStep<State>, ReadStep<State>>;

/// A state machine whose states denote functions I^n -> I. A write step
/// emits d with f[I^n] inside I_d and moves to the state of 2f - d; a read
/// step moves, for each digit, to the state of f with input i averaged
/// towards that digit. Reads must eventually enable a write.
template <class State>
struct DigitalSystem {
  int arity = 1;
  std::function<Step<State>(const State&)> step;
  /// Optional wellfoundedness witness: reads should strictly decrease it.
  std::function<std::size_t(const State&)> measure;
};

template <class State>
concept ShareableState = requires(const State& s) {
  { std::hash<State>{}(s) } -> std::convertible_to<std::size_t>;
  { s == s } -> std::convertible_to<bool>;
};

namespace detail {

template <class State>
class TreeBuilder : public CellArena {
 public:
  TreeBuilder(DigitalSystem<State> sys, bool share)
      : sys_(std::move(sys)), share_(share), stats_(std::make_shared<ExpansionStats>()) {}

  // Handle to the cell for `s`, not owning; copies of it own this builder.
  CTree tree_for(State s) {
    if constexpr (ShareableState<State>) {
      if (share_) {
        std::lock_guard lock(mu_);
        auto [it, fresh] = table_.try_emplace(s, nullptr);
        if (!fresh) return link(sys_.arity, it->second);
        CTree t = make(std::move(s));
        it->second = cell_of(t);
        return t;
      }
    }
    return make(std::move(s));
  }

 private:
  CTree make(State s) {
    return link(
        sys_.arity,
        [self = this, s = std::move(s)]() -> Node {
          auto step = self->sys_.step(s);
          if (auto* w = std::get_if<WriteStep<State>>(&step))
            return Node::write(w->digit, self->tree_for(std::move(w->next)));
          auto& r = std::get<ReadStep<State>>(step);
          return Node::read(r.index, {self->tree_for(std::move(r.branches[0])), self->tree_for(std::move(r.branches[1])),
                                      self->tree_for(std::move(r.branches[2]))});
        },
        stats_);
  }

  DigitalSystem<State> sys_;
  bool share_;
  std::shared_ptr<ExpansionStats> stats_;
  std::mutex mu_;
  std::conditional_t<ShareableState<State>, absl::flat_hash_map<State, const CTree::Cell*, std::hash<State>>,
                     std::monostate>
      table_;
};

}  // namespace detail

/// Tree whose node at each state is the system's step there. With
/// `share_states` (and a hashable state type) equal states reached along
/// different paths share one cached node.
template <class State>
CTree build_tree(DigitalSystem<State> sys, const State& start, bool share_states = true) {
  auto builder = std::make_shared<detail::TreeBuilder<State>>(std::move(sys), share_states);
  return builder->own(builder->tree_for(start));
}

// ---------------------------------------------------------------------------
// Linear affine maps x -> u.x + v

struct LinState {
  std::vector<Rational> u;
  Rational v;
  bool operator==(const LinState&) const = default;
};

/// |u|_1
Rational l1_norm(const std::vector<Rational>& u);

Step<LinState> lin_step(const LinState& s);
std::size_t lin_measure(const LinState& s);
DigitalSystem<LinState> lin_system(int arity);

/// Tree for x -> u.x + v. Throws DomainError unless |u|_1 + |v| <= 1.
CTree lin_tree(std::vector<Rational> u, Rational v, bool share_states = true);

// ---------------------------------------------------------------------------
// Quadratics x -> u x^2 + v x + w

struct QuadState {
  Rational u, v, w;
  bool operator==(const QuadState&) const = default;
};

/// Minimum and maximum of the quadratic over [-1,1].
std::pair<Rational, Rational> quad_range(const QuadState& s);
bool quad_test(const QuadState& s, SignedDigit e);
QuadState quad_write(const QuadState& s, SignedDigit e);
QuadState quad_read(const QuadState& s, SignedDigit d);
Step<QuadState> quad_step(const QuadState& s);
std::size_t quad_measure(const QuadState& s);
DigitalSystem<QuadState> quad_system();

namespace detail {

/// The quadratic (U x^2 + V x + W) / D with integer coefficients and D > 0,
/// stored as {U, V, W, D}. Common factors of two are stripped from all four,
/// which makes the representation unique for a fixed odd part of D.
/// Coefficients below 2^40 in magnitude are held in machine words.
struct ScaledQuad {
  using Small = std::array<std::int64_t, 4>;
  using Big = std::array<Integer, 4>;
  std::variant<Small, Big> coeffs;
  bool operator==(const ScaledQuad&) const = default;
};

ScaledQuad scale_quad(const QuadState& s);
QuadState unscale_quad(const ScaledQuad& s);

/// Same decisions and successor states as quad_step, in integer arithmetic.
Step<ScaledQuad> scaled_quad_step(const ScaledQuad& s);

}  // namespace detail

/// Tree for x -> u x^2 + v x + w. Throws DomainError unless it maps I into I.
CTree quad_tree(Rational u, Rational v, Rational w, bool share_states = true);

/// a(1 - x^2) - 1 for 0 <= a <= 2.
CTree logistic_tree(const Rational& a);

/// n-fold self composition, nested to the left: t^(k+1) = t^k o t.
CTree iterate_tree(const CTree& t, std::size_t n);

// ---------------------------------------------------------------------------
// Trees from a modulus of uniform continuity

/// Uniform continuity data for some f: I -> I.
/// `modulus(eps)` is a delta > 0 such that points within delta have images
/// within eps; `approx(c, r)` returns q with f[[c-r, c+r]] inside
/// [q-eps, q+eps] whenever r <= modulus(eps).
struct ModulusEvaluator {
  std::function<Rational(const Rational& center, const Rational& radius)> approx;
  std::function<Rational(const Rational& eps)> modulus;
};

/// Current function 2^scale f(center + radius x) - shift.
struct ModState {
  Rational center;
  Rational radius;
  long scale = 0;
  Integer shift;
};

Step<ModState> modulus_step(const ModulusEvaluator& ev, const ModState& s);

/// Tree realizing the function behind `ev` (one input only).
CTree tree_from_modulus(ModulusEvaluator ev);

}  // namespace sdreal

template <>
struct std::hash<sdreal::LinState> {
  std::size_t operator()(const sdreal::LinState& s) const noexcept {
    std::size_t h = sdreal::hash_value(s.v);
    for (const auto& x : s.u) h = h * 131 + sdreal::hash_value(x);
    return h;
  }
};

template <>
struct std::hash<sdreal::detail::ScaledQuad> {
  std::size_t operator()(const sdreal::detail::ScaledQuad& s) const noexcept;
};

template <>
struct std::hash<sdreal::QuadState> {
  std::size_t operator()(const sdreal::QuadState& s) const noexcept {
    return (sdreal::hash_value(s.u) * 131 + sdreal::hash_value(s.v)) * 131 + sdreal::hash_value(s.w);
  }
};

#endif  // SDREAL_DIGITSYS_HPP
