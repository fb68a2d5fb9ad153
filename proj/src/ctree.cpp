#include "sdreal/ctree.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <absl/container/flat_hash_map.h>

namespace sdreal {

CTree CTree::lazy(int arity, std::function<Node()> expand, std::shared_ptr<ExpansionStats> stats) {
  return CTree(arity, std::make_shared<const Cell>(std::move(expand), std::move(stats)));
}

namespace {

CTree constant_with(int arity, SignedDigit d, std::shared_ptr<ExpansionStats> stats) {
  return CTree::lazy(
      arity, [arity, d, stats] { return Node::write(d, constant_with(arity, d, stats)); }, stats);
}

CTree stream_with(int arity, DigitStream s, std::shared_ptr<ExpansionStats> stats) {
  return CTree::lazy(
      arity,
      [arity, s = std::move(s), stats] { return Node::write(s.head(), stream_with(arity, s.tail(), stats)); },
      stats);
}

}  // namespace

CTree CTree::constant(int arity, SignedDigit d) {
  return constant_with(arity, d, std::make_shared<ExpansionStats>());
}

CTree CTree::from_stream(int arity, DigitStream s) {
  return stream_with(arity, std::move(s), std::make_shared<ExpansionStats>());
}

CTree::CTree(const CTree& other) : cell_(other.cell_), arity_(other.arity_), arena_(other.arena_) { adopt(); }

CTree& CTree::operator=(const CTree& other) {
  if (this != &other) {
    cell_ = other.cell_;
    arity_ = other.arity_;
    arena_ = other.arena_;
    adopt();
  }
  return *this;
}

void CTree::adopt() {
  if (arena_ == nullptr || !cell_ || cell_.use_count() != 0) return;
  if (auto owner = arena_->weak_from_this().lock()) cell_ = std::shared_ptr<const Cell>(std::move(owner), cell_.get());
}

CTree CellArena::link(int arity, std::function<Node()> expand, std::shared_ptr<ExpansionStats> stats) {
  const CTree::Cell* cell;
  {
    std::lock_guard lock(mu_);
    cell = &cells_.emplace_back(std::move(expand), std::move(stats));
  }
  return link(arity, cell);
}

CTree CellArena::link(int arity, const CTree::Cell* cell) {
  return CTree(arity, std::shared_ptr<const CTree::Cell>(std::shared_ptr<const CTree::Cell>(), cell), this);
}

const Node& CTree::expand() const {
  if (!cell_) throw std::logic_error("expanding an empty tree");
  return cell_->force();
}

std::uint64_t CTree::expansion_count() const {
  const auto& s = cell_->stats();
  return s ? s->nodes_expanded.load(std::memory_order_relaxed) : 0;
}

Node Node::write(SignedDigit d, CTree next) {
  return Node(Kind::Write, d, 0, {std::move(next), CTree(), CTree()});
}

Node Node::read(int index, std::array<CTree, 3> branches) {
  return Node(Kind::Read, SignedDigit::Z, index, std::move(branches));
}

// ---------------------------------------------------------------------------
// Application

namespace {

DigitStream apply_from(CTree t, std::vector<DigitStream> inputs) {
  return DigitStream::lazy([t = std::move(t), inputs = std::move(inputs)]() mutable {
    CTree cur = t;
    std::vector<DigitStream> in = inputs;
    for (;;) {
      const Node& node = cur.expand();
      if (node.is_write()) {
        CTree next = node.next();
        return std::pair{node.digit, apply_from(std::move(next), std::move(in))};
      }
      auto& src = in[static_cast<std::size_t>(node.index - 1)];
      SignedDigit d = src.head();
      CTree next = node.branch(d);
      src = src.tail();
      cur = std::move(next);
    }
  });
}

}  // namespace

DigitStream apply(const CTree& t, std::span<const DigitStream> inputs) {
  if (inputs.size() != static_cast<std::size_t>(t.arity()))
    throw std::invalid_argument("apply: tree of arity " + std::to_string(t.arity()) + " given " +
                                std::to_string(inputs.size()) + " inputs");
  return apply_from(t, std::vector<DigitStream>(inputs.begin(), inputs.end()));
}

DigitStream apply(const CTree& t, const DigitStream& input) {
  return apply(t, std::span<const DigitStream>(&input, 1));
}

DigitStream as_stream(const CTree& t) {
  if (t.arity() != 0) throw std::invalid_argument("as_stream: tree has inputs");
  return DigitStream::lazy([t] {
    const Node& node = t.expand();
    if (!node.is_write()) throw std::logic_error("0-ary tree contains a read node");
    return std::pair{node.digit, as_stream(node.next())};
  });
}

Rational eval_at(const CTree& t, const Rational& q, std::size_t n) {
  if (t.arity() != 1) throw std::invalid_argument("eval_at: tree must have exactly one input");
  if (!in_unit_interval(q)) throw DomainError("eval_at: point " + to_string(q) + " lies outside [-1,1]");
  return sigma_approx(apply(t, cauchy_to_stream(const_seq(q))), n);
}

// ---------------------------------------------------------------------------
// Feeding and composition

CTree feed_digit(const CTree& t, int index, SignedDigit d) {
  return feed_digit(t, index, d, std::make_shared<ExpansionStats>());
}

CTree feed_digit(const CTree& t, int index, SignedDigit d, std::shared_ptr<ExpansionStats> stats) {
  if (index < 1 || index > t.arity())
    throw std::out_of_range("feed_digit: input " + std::to_string(index) + " out of range for arity " +
                            std::to_string(t.arity()));
  return CTree::lazy(
      t.arity(),
      [t, index, d, stats]() -> Node {
        const Node& node = t.expand();
        if (node.is_write()) return Node::write(node.digit, feed_digit(node.next(), index, d, stats));
        if (node.index == index) return node.branch(d).expand();
        std::array<CTree, 3> br;
        for (SignedDigit e : kDigits) br[slot(e)] = feed_digit(node.branch(e), index, d, stats);
        return Node::read(node.index, std::move(br));
      },
      stats);
}

namespace {

// Composite cells memoized on their (outer node, inner nodes) pair. Signed
// digits are redundant, so different read paths reach the same pair and the
// composite shares nodes the way builder trees share states.
class ComposeArena : public CellArena {
 public:
  ComposeArena(int arity, std::shared_ptr<ExpansionStats> stats) : arity_(arity), stats_(std::move(stats)) {}

  CTree state(CTree f, std::vector<CTree> gs) {
    std::vector<const void*> key;
    key.reserve(gs.size() + 1);
    key.push_back(f.id());
    for (const auto& g : gs) key.push_back(g.id());
    std::lock_guard lock(mu_);
    auto [it, fresh] = table_.try_emplace(std::move(key), nullptr);
    if (!fresh) return link(arity_, it->second->cell);
    // The entry holds the key's cells, so their addresses are never reused.
    Entry* e = &entries_.emplace_back(Entry{std::move(f), std::move(gs), nullptr});
    CTree t = link(arity_, [self = this, e]() -> Node { return self->step(*e); }, stats_);
    e->cell = cell_of(t);
    it->second = e;
    return t;
  }

 private:
  struct Entry {
    CTree f;
    std::vector<CTree> gs;
    const CTree::Cell* cell;
  };

  Node step(const Entry& e) {
    CTree fc = e.f;
    std::vector<CTree> gc = e.gs;
    for (;;) {
      const Node& fn = fc.expand();
      if (fn.is_write()) {
        CTree next = fn.next();
        return Node::write(fn.digit, state(std::move(next), std::move(gc)));
      }
      const auto i = static_cast<std::size_t>(fn.index - 1);
      const Node& gn = gc[i].expand();
      if (gn.is_write()) {
        // g_i produced a digit: f consumes it without emitting anything.
        CTree next_f = fn.branch(gn.digit);
        CTree next_g = gn.next();
        gc[i] = std::move(next_g);
        fc = std::move(next_f);
        continue;
      }
      // g_i needs input j first: the composite reads j, and every other
      // g_k learns that digit through feed_digit.
      std::array<CTree, 3> br;
      for (SignedDigit d : kDigits) {
        std::vector<CTree> next_gs(gc.size());
        for (std::size_t k = 0; k < gc.size(); ++k)
          next_gs[k] = k == i ? gn.branch(d) : feed_digit(gc[k], gn.index, d, stats_);
        br[slot(d)] = state(fc, std::move(next_gs));
      }
      return Node::read(gn.index, std::move(br));
    }
  }

  int arity_;
  std::shared_ptr<ExpansionStats> stats_;
  std::mutex mu_;
  std::deque<Entry> entries_;
  absl::flat_hash_map<std::vector<const void*>, Entry*> table_;
};

}  // namespace

CTree compose(const CTree& f, std::vector<CTree> gs) {
  if (gs.size() != static_cast<std::size_t>(f.arity()))
    throw std::invalid_argument("compose: outer tree has arity " + std::to_string(f.arity()) + " but " +
                                std::to_string(gs.size()) + " inner trees were given");
  int arity = gs.empty() ? 0 : gs.front().arity();
  for (const auto& g : gs)
    if (g.arity() != arity) throw std::invalid_argument("compose: inner trees disagree on arity");
  auto arena = std::make_shared<ComposeArena>(arity, std::make_shared<ExpansionStats>());
  return arena->own(arena->state(f, std::move(gs)));
}

// ---------------------------------------------------------------------------
// Modulus and productivity

namespace {

struct KeyHash {
  std::size_t operator()(const std::pair<const void*, std::size_t>& k) const {
    return std::hash<const void*>{}(k.first) * 1000003u ^ std::hash<std::size_t>{}(k.second);
  }
};

class ModulusSearch {
 public:
  std::size_t run(const CTree& t, std::size_t k) {
    if (k == 0) return 0;
    auto key = std::pair{t.id(), k};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Node& node = t.expand();
    std::size_t result;
    if (node.is_write()) {
      result = run(node.next(), k - 1);
    } else {
      result = 0;
      for (SignedDigit d : kDigits) result = std::max(result, run(node.branch(d), k));
      ++result;
    }
    memo_.emplace(key, result);
    return result;
  }

 private:
  std::unordered_map<std::pair<const void*, std::size_t>, std::size_t, KeyHash> memo_;
};

class ProductivityCheck {
 public:
  explicit ProductivityCheck(std::size_t max_reads) : max_reads_(max_reads) {}

  bool run(const CTree& t, std::size_t writes, std::size_t reads) {
    if (writes == 0) return true;
    auto key = std::tuple{t.id(), writes, reads};
    if (proven_.contains(key)) return true;
    const Node& node = t.expand();
    bool ok;
    if (node.is_write()) {
      ok = run(node.next(), writes - 1, 0);
    } else if (reads >= max_reads_) {
      ok = false;
    } else {
      ok = std::all_of(kDigits.begin(), kDigits.end(),
                       [&](SignedDigit d) { return run(node.branch(d), writes, reads + 1); });
    }
    if (ok) proven_.insert(key);
    return ok;
  }

 private:
  std::size_t max_reads_;
  std::set<std::tuple<const void*, std::size_t, std::size_t>> proven_;
};

}  // namespace

std::size_t modulus(const CTree& t, std::size_t k) { return ModulusSearch{}.run(t, k); }

bool check_productive(const CTree& t, std::size_t writes, std::size_t max_reads) {
  return ProductivityCheck(max_reads).run(t, writes, 0);
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

constexpr std::size_t kRenderNodeLimit = 100000;

std::string read_label(const Node& node) { return "x" + std::to_string(node.index); }

void ascii_node(std::ostringstream& out, const CTree& t, std::size_t level, std::size_t depth,
                const char* edge, std::size_t& emitted) {
  if (level >= depth) return;
  if (emitted++ >= kRenderNodeLimit) {
    if (emitted == kRenderNodeLimit + 1) out << "...\n";
    return;
  }
  const Node& node = t.expand();
  out << std::string(2 * level, ' ') << edge;
  if (node.is_write()) {
    out << to_char(node.digit) << '\n';
    ascii_node(out, node.next(), level + 1, depth, "", emitted);
  } else {
    out << read_label(node) << '\n';
    static constexpr const char* edges[] = {"N: ", "Z: ", "P: "};
    for (SignedDigit d : kDigits) ascii_node(out, node.branch(d), level + 1, depth, edges[slot(d)], emitted);
  }
}

std::size_t dot_node(std::ostringstream& out, const CTree& t, std::size_t level, std::size_t depth,
                     std::size_t& next_id) {
  std::size_t id = next_id++;
  const Node& node = t.expand();
  std::string label;
  if (node.is_write())
    label = std::string(1, to_char(node.digit));
  else if (t.arity() != 1)
    label = read_label(node);
  out << "  n" << id << " [label=\"" << label << "\"];\n";
  if (level + 1 >= depth || next_id > kRenderNodeLimit) return id;
  if (node.is_write()) {
    std::size_t child = dot_node(out, node.next(), level + 1, depth, next_id);
    out << "  n" << id << " -> n" << child << ";\n";
  } else {
    for (SignedDigit d : kDigits) {
      std::size_t child = dot_node(out, node.branch(d), level + 1, depth, next_id);
      out << "  n" << id << " -> n" << child << ";\n";
    }
  }
  return id;
}

void check_depth(std::size_t depth) {
  if (depth > kMaxRenderDepth)
    throw std::invalid_argument("render depth " + std::to_string(depth) + " exceeds " +
                                std::to_string(kMaxRenderDepth));
}

}  // namespace

std::string render_ascii(const CTree& t, std::size_t depth) {
  check_depth(depth);
  std::ostringstream out;
  std::size_t emitted = 0;
  ascii_node(out, t, 0, depth, "", emitted);
  return out.str();
}

std::string render_dot(const CTree& t, std::size_t depth) {
  check_depth(depth);
  std::ostringstream out;
  out << "digraph ctree {\n  ordering=out;\n  node [shape=circle];\n";
  if (depth > 0) {
    std::size_t next_id = 0;
    dot_node(out, t, 0, depth, next_id);
  }
  out << "}\n";
  return out.str();
}

}  // namespace sdreal
