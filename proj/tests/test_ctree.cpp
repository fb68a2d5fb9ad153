#include <doctest.h>

#include <set>
#include <thread>

#include "sdreal/ctree.hpp"
#include "sdreal/digitsys.hpp"
#include "sdreal/exprdsl.hpp"
#include "sdreal/oracle.hpp"
#include "test_support.hpp"

using namespace sdreal;
using sdtest::digits;
using sdtest::within;

namespace {

CTree logistic23() { return quad_tree(Rational(-2, 3), 0, Rational(-1, 3)); }
CTree identity() { return lin_tree({Rational(1)}, 0); }

CTree read_forever(const std::shared_ptr<ExpansionStats>& stats) {
  return CTree::lazy(
      1, [stats] { return Node::read(1, {read_forever(stats), read_forever(stats), read_forever(stats)}); }, stats);
}

std::string run(const CTree& t, const char* input, std::size_t n) {
  DigitStream in = DigitStream::periodic(digits(input), digits("Z"));
  return render_digits(sdreal::apply(t, in).take(n));
}

}  // namespace

TEST_CASE("the quadratic tree for (2/3)(1-x^2)-1 starts with a write of N") {
  CTree t = logistic23();
  const Node& root = t.expand();
  CHECK(root.is_write());
  CHECK(root.digit == SignedDigit::N);
  CHECK(root.next().expand().is_read());
}

TEST_CASE("running that tree on 0 yields NZPZPZ and on 1/2 yields NZZZ") {
  CHECK(run(logistic23(), "", 6) == "NZPZPZ");
  CHECK(run(logistic23(), "P", 4) == "NZZZ");
  // The outputs denote -1/3 and -1/2.
  CHECK(within(sigma_approx(sdreal::apply(logistic23(), DigitStream::constant(SignedDigit::Z)), 40), Rational(-1, 3), 40));
}

TEST_CASE("a constant tree ignores its input") {
  sdtest::Gen gen(7);
  CTree z = CTree::constant(1, SignedDigit::Z);
  for (int i = 0; i < 5; ++i) CHECK(render_digits(sdreal::apply(z, gen.stream()).take(12)) == "ZZZZZZZZZZZZ");
}

TEST_CASE("eval_at examples") {
  CHECK(eval_at(lin_tree({Rational(1, 4)}, Rational(1, 5)), Rational(1, 3), 10) == Rational(145, 512));
  CHECK(eval_at(CTree::constant(1, SignedDigit::Z), Rational(3, 7), 30) == 0);
  CHECK(within(eval_at(logistic_tree(2), Rational(7, 10), 20), Rational(1, 50), 20));
  CHECK_THROWS_AS(eval_at(identity(), Rational(5, 4), 4), DomainError);
  CHECK_THROWS_AS(eval_at(CTree::constant(2, SignedDigit::Z), Rational(0), 4), std::invalid_argument);
}

TEST_CASE("145/512 is within 2^-10 of the exact value 17/60") {
  Rational exact = eval_exact(FuncExpr::lin(Rational(1, 4), Rational(1, 5)), Rational(1, 3));
  CHECK(exact == Rational(17, 60));
  CHECK(abs(Rational(145, 512) - exact) == Rational(1, 7680));
}

TEST_CASE("apply checks the number of inputs") {
  CHECK_THROWS_AS(sdreal::apply(identity(), std::vector<DigitStream>{}), std::invalid_argument);
}

TEST_CASE("arity 0 trees read as streams agree with apply") {
  CTree t = CTree::from_stream(0, DigitStream::periodic(digits("PN"), digits("ZZP")));
  CHECK(render_digits(as_stream(t).take(20)) == render_digits(sdreal::apply(t, std::vector<DigitStream>{}).take(20)));
  CHECK(render_digits(as_stream(t).take(8)) == "PNZZPZZP");
  CHECK_THROWS_AS(as_stream(identity()), std::invalid_argument);
}

TEST_CASE("feed_digit on a constant tree keeps the output") {
  CTree c = CTree::constant(1, SignedDigit::P);
  CHECK(render_digits(sdreal::apply(feed_digit(c, 1, SignedDigit::N), DigitStream::constant(SignedDigit::Z)).take(10)) ==
        "PPPPPPPPPP");
}

TEST_CASE("feed_digit at a root read returns that branch") {
  CTree t = lin_tree({Rational(1, 2)}, 0);
  const Node& root = t.expand();
  REQUIRE(root.is_read());
  for (SignedDigit d : kDigits) {
    CTree fed_tree = feed_digit(t, 1, d);
    const Node& fed = fed_tree.expand();
    const Node& br = root.branch(d).expand();
    CHECK(fed.kind == br.kind);
    CHECK(fed.digit == br.digit);
    CHECK(fed.index == br.index);
    for (std::size_t c = 0; c < 3; ++c) CHECK(fed.children[c].id() == br.children[c].id());
  }
}

TEST_CASE("feeding P into the identity gives (x+1)/2") {
  CHECK(within(eval_at(feed_digit(identity(), 1, SignedDigit::P), 0, 10), Rational(1, 2), 10));
  CHECK_THROWS_AS(feed_digit(identity(), 2, SignedDigit::P), std::out_of_range);
  CHECK_THROWS_AS(feed_digit(identity(), 0, SignedDigit::P), std::out_of_range);
}

TEST_CASE("property: feed_digit agrees with the oracle at (q+d)/2") {
  sdtest::Gen gen(21);
  for (int trial = 0; trial < 30; ++trial) {
    FuncExpr e = gen.expr(2, 16);
    CTree t = to_tree(e);
    SignedDigit d = gen.digit();
    CTree fed = feed_digit(t, 1, d);
    for (const Rational& q : sdtest::grid()) {
      Rational expected = eval_exact(e, (q + numeric(d)) / 2);
      CHECK_MESSAGE(within(eval_at(fed, q, 24), expected, 24), to_text(e), " d=", numeric(d), " q=", q.get_str());
    }
  }
}

TEST_CASE("feed_digit commutes with reads of other inputs") {
  // f(x, y) = x/4 + y/4, fed 1/2 on input 2, is x/4 + (y+1)/8.
  CTree f = lin_tree({Rational(1, 4), Rational(1, 4)}, 0);
  CTree fed = feed_digit(f, 2, SignedDigit::P);
  sdtest::Gen gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    Rational x = gen.unit(), y = gen.unit();
    std::vector<DigitStream> in{cauchy_to_stream(const_seq(x)), cauchy_to_stream(const_seq(y))};
    Rational got = sigma_approx(sdreal::apply(fed, in), 20);
    CHECK(within(got, x / 4 + (y + 1) / 8, 20));
  }
}

TEST_CASE("compose with the identity on either side") {
  CTree f = logistic_tree(Rational(3, 2));
  for (Rational q : {Rational(0), Rational(1, 2), Rational(-1, 2), Rational(1, 3)}) {
    Rational expected = eval_exact(FuncExpr::logistic(Rational(3, 2)), q);
    CHECK(within(eval_at(compose(f, {identity()}), q, 16), expected, 16));
    CHECK(within(eval_at(compose(identity(), {f}), q, 16), expected, 16));
  }
}

TEST_CASE("logistic(2) composed with itself at 7/10 is 2(1 - 0.02^2) - 1 = 0.9992") {
  CTree f = logistic_tree(2);
  Rational expected = eval_exact(FuncExpr::comp(FuncExpr::logistic(2), FuncExpr::logistic(2)), Rational(7, 10));
  CHECK(expected == 2 * (1 - Rational(1, 50) * Rational(1, 50)) - 1);
  CHECK(expected == Rational(1249, 1250));
  CHECK(within(eval_at(compose(f, {f}), Rational(7, 10), 20), expected, 20));
}

TEST_CASE("compose checks arities") {
  CHECK_THROWS_AS(compose(identity(), {}), std::invalid_argument);
  CTree f2 = lin_tree({Rational(1, 2), Rational(1, 2)}, 0);
  CHECK_THROWS_AS(compose(f2, {identity(), lin_tree({Rational(1, 2), Rational(1, 2)}, 0)}), std::invalid_argument);
}

TEST_CASE("property: compose agrees with the oracle and is associative in value") {
  sdtest::Gen gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    FuncExpr f = gen.expr(1, 4), g = gen.expr(1, 4), h = gen.expr(1, 4);
    CTree tf = to_tree(f), tg = to_tree(g), th = to_tree(h);
    CTree left = compose(compose(tf, {tg}), {th});
    CTree right = compose(tf, {compose(tg, {th})});
    for (const Rational& q : sdtest::grid()) {
      Rational fg = eval_exact(f, eval_exact(g, q));
      CHECK(within(eval_at(compose(tf, {tg}), q, 24), fg, 24));
      Rational fgh = eval_exact(f, eval_exact(g, eval_exact(h, q)));
      CHECK(within(eval_at(left, q, 24), fgh, 24));
      CHECK(within(eval_at(right, q, 24), fgh, 24));
    }
  }
}

TEST_CASE("n-ary compose: (g1 + g2)/4 with g1 logistic, g2 linear") {
  CTree f = lin_tree({Rational(1, 4), Rational(1, 4)}, 0);
  FuncExpr g1 = FuncExpr::logistic(Rational(3, 2)), g2 = FuncExpr::lin(Rational(-1, 2), Rational(1, 3));
  CTree h = compose(f, {to_tree(g1), to_tree(g2)});
  CHECK(h.arity() == 1);
  for (const Rational& q : sdtest::grid()) {
    Rational expected = (eval_exact(g1, q) + eval_exact(g2, q)) / 4;
    CHECK(within(eval_at(h, q, 24), expected, 24));
  }
}

TEST_CASE("compose into a binary function of two inputs") {
  // f(x) = x^2 - 1/2 after g(x, y) = x/2 + y/2.
  CTree g = lin_tree({Rational(1, 2), Rational(1, 2)}, 0);
  CTree f = quad_tree(1, 0, Rational(-1, 2));
  CTree h = compose(f, {g});
  CHECK(h.arity() == 2);
  sdtest::Gen gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    Rational x = gen.unit(), y = gen.unit();
    std::vector<DigitStream> in{cauchy_to_stream(const_seq(x)), cauchy_to_stream(const_seq(y))};
    Rational s = (x + y) / 2;
    CHECK(within(sigma_approx(sdreal::apply(h, in), 20), s * s - Rational(1, 2), 20));
  }
}

TEST_CASE("modulus examples") {
  CHECK(modulus(CTree::constant(1, SignedDigit::N), 7) == 0);
  CHECK(modulus(lin_tree({Rational(1, 2)}, 0), 1) == 1);
  CHECK(modulus(lin_tree({Rational(1, 4)}, Rational(1, 5)), 1) == 0);
  CHECK(modulus(identity(), 0) == 0);
}

TEST_CASE("modulus of the identity grows one read per digit") {
  CTree id = identity();
  std::size_t prev = 0;
  for (std::size_t k = 1; k <= 10; ++k) {
    std::size_t m = modulus(id, k);
    CHECK(m >= prev);
    CHECK(m >= k - 1);
    prev = m;
  }
}

TEST_CASE("property: inputs agreeing on modulus(t,k) digits give outputs agreeing on k digits") {
  sdtest::Gen gen(41);
  for (int trial = 0; trial < 10; ++trial) {
    FuncExpr e = gen.expr(1, 4);
    CTree t = to_tree(e);
    std::size_t k = static_cast<std::size_t>(gen.uniform(1, 8));
    std::size_t m = modulus(t, k);
    auto prefix = gen.digits(m);
    auto base = sdreal::apply(t, DigitStream::periodic(prefix, gen.digits(3))).take(k);
    for (int alt = 0; alt < 5; ++alt) {
      auto other = sdreal::apply(t, DigitStream::periodic(prefix, gen.digits(4))).take(k);
      CHECK_MESSAGE(other == base, to_text(e), " k=", k, " m=", m);
    }
  }
}

TEST_CASE("check_productive examples") {
  CHECK(check_productive(CTree::constant(1, SignedDigit::Z), 10, 0));
  CHECK_FALSE(check_productive(read_forever(std::make_shared<ExpansionStats>()), 1, 100));
  CHECK(check_productive(logistic23(), 8, 8));
  CHECK_FALSE(check_productive(lin_tree({Rational(1)}, 0), 3, 1));
  CHECK(check_productive(lin_tree({Rational(1)}, 0), 3, 2));
}

TEST_CASE("render: a constant Z tree is a chain") {
  CTree z = CTree::constant(1, SignedDigit::Z);
  CHECK(render_ascii(z, 3) == "Z\n  Z\n    Z\n");
  CHECK(render_ascii(z, 0).empty());
  CHECK(render_ascii(logistic23(), 0).empty());
  CHECK_THROWS_AS(render_ascii(z, kMaxRenderDepth + 1), std::invalid_argument);
}

TEST_CASE("render: the quadratic tree has a write N above a three-way read") {
  std::string text = render_ascii(logistic23(), 3);
  CHECK(text == "N\n  x1\n    N: x1\n    Z: Z\n    P: x1\n");
  std::string dot = render_dot(logistic23(), 3);
  CHECK(dot.rfind("digraph ctree {", 0) == 0);
  CHECK(dot.find("n0 [label=\"N\"];") != std::string::npos);
  CHECK(dot.find("n1 [label=\"\"];") != std::string::npos);
  CHECK(dot.find("n0 -> n1;") != std::string::npos);
  auto e2 = dot.find("n1 -> n2;"), e3 = dot.find("n1 -> n3;"), e4 = dot.find("n1 -> n4;");
  REQUIRE(e4 != std::string::npos);
  CHECK(e2 < e3);
  CHECK(e3 < e4);
  CHECK(dot.find("n3 [label=\"Z\"];") != std::string::npos);
  CHECK(dot.back() == '\n');
}

TEST_CASE("the initial segment of the (2/3)(1-x^2)-1 tree matches its reference table node for node") {
  // Node names read right to left give the path from the root, a/b/c
  // selecting the N/Z/P child. Empty labels are read nodes.
  const std::vector<std::pair<std::string, std::string>> table = {
      {"a", "N"},        {"aa", ""},       {"aaa", ""},       {"aaaa", "N"},     {"aaaaa", ""},
      {"aaaaaa", ""},    {"baaaaa", ""},   {"caaaaa", "P"},   {"baaa", "Z"},     {"abaaa", ""},
      {"aabaaa", "N"},   {"babaaa", "Z"},  {"cabaaa", "Z"},   {"caaa", "Z"},     {"acaaa", "P"},
      {"aacaaa", ""},    {"aaacaaa", "N"}, {"baacaaa", "Z"},  {"caacaaa", "Z"},  {"baa", "Z"},
      {"abaa", "P"},     {"aabaa", ""},    {"aaabaa", ""},    {"aaaabaa", "N"},  {"baaabaa", "Z"},
      {"caaabaa", "Z"},  {"baabaa", "Z"},  {"abaabaa", "P"},  {"aabaabaa", ""},  {"aaabaabaa", ""},
      {"baabaabaa", "Z"}, {"caabaabaa", ""}, {"caabaa", ""},  {"acaabaa", "Z"},  {"bcaabaa", "Z"},
      {"ccaabaa", "N"},  {"caa", ""},       {"acaa", "Z"},    {"aacaa", "P"},    {"aaacaa", ""},
      {"aaaacaa", "Z"},  {"baaacaa", "Z"},  {"caaacaa", "N"}, {"bcaa", "Z"},     {"abcaa", ""},
      {"aabcaa", "Z"},   {"babcaa", "Z"},   {"cabcaa", "N"},  {"ccaa", "N"},     {"accaa", ""},
      {"aaccaa", "P"},   {"baccaa", ""},    {"caccaa", ""}};
  CTree root = logistic23();
  for (const auto& [name, label] : table) {
    CTree t = root;
    for (auto it = name.rbegin() + 1; it != name.rend(); ++it) {
      const Node& node = t.expand();
      int child = *it - 'a';
      if (node.is_write()) REQUIRE(child == 0);
      t = node.is_write() ? node.next() : node.branch(kDigits[static_cast<std::size_t>(child)]);
    }
    const Node& node = t.expand();
    std::string got = node.is_write() ? std::string(1, to_char(node.digit)) : std::string();
    CHECK_MESSAGE(got == label, "node ", name);
  }
}

TEST_CASE("render: read nodes of binary trees are labelled with their input") {
  std::string dot = render_dot(lin_tree({Rational(1, 2), Rational(1, 2)}, 0), 1);
  CHECK(dot.find("label=\"x1\"") != std::string::npos);
}

TEST_CASE("expansion counts: fresh trees have none, evaluation adds, repetition does not") {
  CTree t = logistic_tree(Rational(7, 4));
  CHECK(t.expansion_count() == 0);
  CHECK_FALSE(t.expanded());
  Rational first = eval_at(t, Rational(1, 3), 30);
  std::uint64_t after = t.expansion_count();
  CHECK(after >= 30);
  CHECK(eval_at(t, Rational(1, 3), 30) == first);
  CHECK(t.expansion_count() == after);
  CHECK(t.expanded());
}

TEST_CASE("expansion counts are shared by copies and unaffected by traversal of expanded parts") {
  CTree t = logistic23();
  CTree copy = t;
  eval_at(t, 0, 12);
  std::uint64_t c = copy.expansion_count();
  CHECK(c == t.expansion_count());
  eval_at(copy, 0, 12);
  render_ascii(copy, 2);
  CHECK(t.expansion_count() == c);
}

TEST_CASE("a subtree handle keeps its nodes alive after the root is dropped") {
  CTree child;
  {
    CTree root = logistic23();
    child = root.expand().next();
  }
  CHECK(child.expand().is_read());
  CHECK(render_digits(sdreal::apply(child, DigitStream::constant(SignedDigit::Z)).take(5)) == "ZPZPZ");
}

TEST_CASE("empty trees cannot be expanded") {
  CTree empty;
  CHECK_FALSE(static_cast<bool>(empty));
  CHECK_THROWS_AS(empty.expand(), std::logic_error);
}

TEST_CASE("concurrent evaluation of a shared tree is consistent") {
  CTree t = iterate_tree(logistic_tree(2), 5);
  std::vector<Rational> results(4);
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) threads.emplace_back([&, i] { results[i] = eval_at(t, Rational(7, 10), 40); });
  for (auto& th : threads) th.join();
  for (int i = 1; i < 4; ++i) CHECK(results[i] == results[0]);

  CTree fresh = iterate_tree(logistic_tree(2), 5);
  CHECK(eval_at(fresh, Rational(7, 10), 40) == results[0]);
  // Every node is expanded once, however many threads demanded it.
  CHECK(t.expansion_count() == fresh.expansion_count());
}

TEST_CASE("node ids identify shared subtrees") {
  CTree t = lin_tree({Rational(0)}, Rational(1, 2));
  const Node& root = t.expand();
  REQUIRE(root.is_write());
  const Node& second = root.next().expand();
  // (0, 0) writes Z and returns to itself.
  CHECK(second.next().id() == root.next().id());
  std::set<const void*> ids{t.id(), root.next().id()};
  CHECK(ids.size() == 2);
}
