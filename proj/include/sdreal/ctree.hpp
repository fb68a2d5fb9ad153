#ifndef SDREAL_CTREE_HPP
#define SDREAL_CTREE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "sdreal/lazy.hpp"
#include "sdreal/rational.hpp"
#include "sdreal/sdstream.hpp"

namespace sdreal {

struct Node;
class CellArena;

/// Continuity tree of some arity n: a non-wellfounded tree whose write nodes
/// emit an output digit and whose read nodes consume a digit of input i and
/// branch on it. Nodes are expanded on first demand and cached; copies of a
/// CTree share the same cache.
///
/// Cells allocated in a CellArena (builder trees, which may be cyclic) link to
/// each other without ownership; a handle copied out of such a node takes
/// shared ownership of the whole arena.
class CTree {
 public:
  using Cell = LazyCell<Node>;

  /// Empty placeholder (unused children of write nodes). Not expandable.
  CTree() = default;

  /// Tree whose root node is produced by `expand` on first demand. The node
  /// is counted against `stats` when it is materialised.
  static CTree lazy(int arity, std::function<Node()> expand, std::shared_ptr<ExpansionStats> stats);

  /// Tree that writes `d` forever (any arity, no reads).
  static CTree constant(int arity, SignedDigit d);

  /// Tree that outputs `s` digit by digit and never reads.
  static CTree from_stream(int arity, DigitStream s);

  int arity() const { return arity_; }

  /// Root node, expanding it if needed.
  const Node& expand() const;

  bool expanded() const { return cell_->expanded(); }

  /// Nodes materialised so far in this tree's family.
  std::uint64_t expansion_count() const;

  const std::shared_ptr<ExpansionStats>& stats() const { return cell_->stats(); }

  CTree(const CTree& other);
  CTree& operator=(const CTree& other);
  CTree(CTree&&) noexcept = default;
  CTree& operator=(CTree&&) noexcept = default;
  ~CTree() = default;

  explicit operator bool() const { return static_cast<bool>(cell_); }

  /// Identity of the underlying cell; equal ids mean the same shared node.
  const void* id() const { return cell_.get(); }

 private:
  friend class CellArena;

  CTree(int arity, std::shared_ptr<const Cell> cell, CellArena* arena = nullptr)
      : cell_(std::move(cell)), arity_(arity), arena_(arena) {}

  // Takes ownership of the arena if this is a link between arena cells.
  void adopt();

  std::shared_ptr<const Cell> cell_;
  int arity_ = 0;
  CellArena* arena_ = nullptr;
};

/// Either Write(digit, next) or Read(index, branches[N,Z,P]). Indices are
/// 1-based input positions.
struct Node {
  enum class Kind : std::uint8_t { Write, Read };

  static Node write(SignedDigit d, CTree next);
  static Node read(int index, std::array<CTree, 3> branches);

  bool is_write() const { return kind == Kind::Write; }
  bool is_read() const { return kind == Kind::Read; }

  const CTree& next() const { return children[0]; }
  const CTree& branch(SignedDigit d) const { return children[slot(d)]; }

  Kind kind;
  SignedDigit digit = SignedDigit::Z;
  int index = 0;
  std::array<CTree, 3> children;

 private:
  Node(Kind k, SignedDigit d, int i, std::array<CTree, 3> c)
      : kind(k), digit(d), index(i), children(std::move(c)) {}
};

/// Owner of a family of cells. Cells live as long as the arena, and the arena
/// lives as long as any owning handle to one of its cells.
class CellArena : public std::enable_shared_from_this<CellArena> {
 public:
  virtual ~CellArena() = default;

  /// Owning handle for a link into this arena.
  CTree own(CTree link) {
    link.adopt();
    return link;
  }

 protected:
  CellArena() = default;

  /// New arena cell; the handle does not own it and is meant to be stored
  /// in another cell of this arena.
  CTree link(int arity, std::function<Node()> expand, std::shared_ptr<ExpansionStats> stats);

  /// Non-owning handle to an existing cell of this arena.
  CTree link(int arity, const CTree::Cell* cell);

  static const CTree::Cell* cell_of(const CTree& t) { return t.cell_.get(); }

 private:
  std::mutex mu_;
  std::deque<CTree::Cell> cells_;
};

/// Runs `t` over the inputs: a write node emits its digit, a read node pops a
/// digit from its input and takes the matching branch.
DigitStream apply(const CTree& t, std::span<const DigitStream> inputs);
DigitStream apply(const CTree& t, const DigitStream& input);

/// A 0-ary tree read as the digit stream it writes.
DigitStream as_stream(const CTree& t);

/// sigma_approx(apply(t, [cauchy_to_stream(const_seq(q))]), n).
Rational eval_at(const CTree& t, const Rational& q, std::size_t n);

/// Tree for f o av^i_d: input i is pre-composed with x -> (x + d)/2.
CTree feed_digit(const CTree& t, int index, SignedDigit d);
CTree feed_digit(const CTree& t, int index, SignedDigit d, std::shared_ptr<ExpansionStats> stats);

/// Tree for f o (g_1, ..., g_n). All gs share one arity m, the result's.
/// Input g_i is only descended when f reads input i.
CTree compose(const CTree& f, std::vector<CTree> gs);

/// Largest number of read nodes on any path before the k-th write node.
std::size_t modulus(const CTree& t, std::size_t k);

/// True iff on every path each of the first `writes` write nodes is reached
/// within `max_reads` consecutive reads. Never diverges.
bool check_productive(const CTree& t, std::size_t writes, std::size_t max_reads);

/// Indented text rendering of the first `depth` levels, two spaces per level.
std::string render_ascii(const CTree& t, std::size_t depth);

/// Graphviz rendering of the first `depth` levels.
std::string render_dot(const CTree& t, std::size_t depth);

inline constexpr std::size_t kMaxRenderDepth = 32;

}  // namespace sdreal

#endif  // SDREAL_CTREE_HPP
