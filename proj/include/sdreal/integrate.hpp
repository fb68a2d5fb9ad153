#ifndef SDREAL_INTEGRATE_HPP
#define SDREAL_INTEGRATE_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "sdreal/ctree.hpp"
#include "sdreal/rational.hpp"

namespace sdreal {

struct IntegralResult {
  Rational value;
  Rational error_bound;  // 2^(1-k)
  std::uint64_t nodes_visited = 0;
};

/// Thrown when a fold exceeds its node or expansion budget.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultIntegralBudget = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kUnlimitedExpansions = std::numeric_limits<std::uint64_t>::max();

/// Integral of the tree's function over [-1,1] to within 2^(1-k).
///
/// Level 0 is 0. Level k folds the read layer below the root: a write of d
/// gives (level k-1 of the child)/2 + d, a read averages its N and P branches.
/// The Z branch is never visited since I splits at 0 into the images of
/// x -> (x-1)/2 and x -> (x+1)/2.
///
/// `budget` caps visited nodes. `expansion_budget` caps nodes newly
/// materialised during the call, counted process-wide; memory grows with
/// those, not with visits to nodes already cached.
///
/// The N and P branches near the root are folded as OpenMP tasks.
IntegralResult integral(const CTree& t, std::size_t k, std::uint64_t budget = kDefaultIntegralBudget,
                        std::uint64_t expansion_budget = kUnlimitedExpansions);

/// Single-threaded reference for `integral`; results are identical.
IntegralResult integral_serial(const CTree& t, std::size_t k, std::uint64_t budget = kDefaultIntegralBudget,
                               std::uint64_t expansion_budget = kUnlimitedExpansions);

}  // namespace sdreal

#endif  // SDREAL_INTEGRATE_HPP
