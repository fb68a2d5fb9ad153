#include "sdreal/cli.hpp"

#include <charconv>
#include <chrono>
#include <iomanip>
#include <iostream>
#include <new>
#include <sstream>

#include <CLI11.hpp>

#include "sdreal/ctree.hpp"
#include "sdreal/digitsys.hpp"
#include "sdreal/exprdsl.hpp"
#include "sdreal/integrate.hpp"

namespace sdreal::cli {

namespace {

constexpr int kMaxCount = 10000;

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string bound_text(long exponent) { return "2^" + std::to_string(exponent); }

// Expanded nodes stay memoized at up to about 1 KB each.
constexpr std::uint64_t kCliExpansionBudget = std::uint64_t{1} << 22;

struct Options {
  std::string expr;
  std::string at = "0";
  int prec = 10;
  int count = 10;
  int depth = 4;
  int repeat = 2;
  int decimal = -1;
  bool dot = false;
  int iterations = 100;
  std::uint64_t max_nodes = kCliExpansionBudget;
};

Rational point(const std::string& text) {
  Rational q = parse_rational(text);
  if (!in_unit_interval(q)) throw DomainError("point " + to_string(q) + " lies outside [-1,1]");
  return q;
}

void print_value(std::ostream& out, const Rational& value, int prec, int decimal) {
  if (decimal >= 0)
    out << to_decimal(value, decimal) << " (+-" << bound_text(-prec) << ")\n";
  else
    out << to_string(value) << "\n";
}

int cmd_eval(const Options& o, std::ostream& out) {
  CTree t = to_tree(parse(o.expr));
  print_value(out, eval_at(t, point(o.at), static_cast<std::size_t>(o.prec)), o.prec, o.decimal);
  return kExitOk;
}

int cmd_digits(const Options& o, std::ostream& out) {
  CTree t = to_tree(parse(o.expr));
  DigitStream s = apply(t, cauchy_to_stream(const_seq(point(o.at))));
  out << render_digits(s.take(static_cast<std::size_t>(o.count))) << "\n";
  return kExitOk;
}

int cmd_integrate(const Options& o, std::ostream& out) {
  CTree t = to_tree(parse(o.expr));
  IntegralResult r = integral(t, static_cast<std::size_t>(o.prec), kDefaultIntegralBudget, o.max_nodes);
  print_value(out, r.value, o.prec - 1, o.decimal);
  out << "error bound: " << bound_text(1 - o.prec) << "\n";
  out << "nodes visited: " << r.nodes_visited << "\n";
  return kExitOk;
}

int cmd_tree(const Options& o, std::ostream& out) {
  CTree t = to_tree(parse(o.expr));
  out << (o.dot ? render_dot(t, static_cast<std::size_t>(o.depth)) : render_ascii(t, static_cast<std::size_t>(o.depth)));
  return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
  CTree t = to_tree(parse(o.expr));
  Rational x = point(o.at);
  for (int r = 1; r <= o.repeat; ++r) {
    std::uint64_t before = total_expansions();
    auto start = std::chrono::steady_clock::now();
    Rational value = eval_at(t, x, static_cast<std::size_t>(o.prec));
    std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    out << "run " << r << ": " << std::fixed << std::setprecision(3) << elapsed.count() << " ms, "
        << (total_expansions() - before) << " new expansions, tree expansions " << t.expansion_count() << "\n";
    out.unsetf(std::ios::floatfield);
    if (r == o.repeat) out << "value " << to_string(value) << "\n";
  }
  return kExitOk;
}

int cmd_float_demo(const Options& o, std::ostream& out) {
  const Rational x = point(o.at);
  CTree t = iterate_tree(logistic_tree(2), static_cast<std::size_t>(o.iterations));
  Rational exact = eval_at(t, x, static_cast<std::size_t>(o.prec));
  double fx = float_logistic_iterate(2.0, x.get_d(), o.iterations);
  out << "exact (certified to " << bound_text(-o.prec) << "): " << to_string(exact) << "\n";
  out << "exact (decimal):  " << to_decimal(exact, 25) << "\n";
  out << "float (binary64, unverified): " << shortest(fx) << "\n";
  return kExitOk;
}

}  // namespace

double float_logistic_iterate(double a, double x, int iterations) {
  volatile double y = x;
  for (int i = 0; i < iterations; ++i) {
    double sq = y * y;
    double diff = 1.0 - sq;
    double scaled = a * diff;
    y = scaled - 1.0;
  }
  return y;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact real arithmetic on signed-digit streams and continuity trees", "sdreal"};
  app.require_subcommand(1);
  Options eo, go, io, to, bo, fo;
  auto positive = CLI::Range(1, kMaxCount);

  auto* eval = app.add_subcommand("eval", "Evaluate EXPR at a rational point to precision 2^-N");
  eval->add_option("expr", eo.expr, "expression")->required();
  eval->add_option("--at", eo.at, "rational point in [-1,1]")->required();
  eval->add_option("--prec", eo.prec, "binary precision N")->check(positive);
  eval->add_option("--decimal", eo.decimal, "print a rounded decimal with D digits")->check(CLI::Range(0, kMaxCount));

  auto* digits = app.add_subcommand("digits", "Print output digits of EXPR at a rational point");
  digits->add_option("expr", go.expr, "expression")->required();
  digits->add_option("--at", go.at, "rational point in [-1,1]")->required();
  digits->add_option("--count", go.count, "number of digits")->check(positive);

  auto* integ = app.add_subcommand("integrate", "Integrate EXPR over [-1,1] to within 2^(1-K)");
  integ->add_option("expr", io.expr, "expression")->required();
  integ->add_option("--prec", io.prec, "K")->check(positive);
  integ->add_option("--decimal", io.decimal, "print a rounded decimal with D digits")->check(CLI::Range(0, kMaxCount));
  integ->add_option("--max-nodes", io.max_nodes, "budget of newly expanded nodes; exceeding it exits with status 3")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* tree = app.add_subcommand("tree", "Render the first levels of EXPR's tree");
  tree->add_option("expr", to.expr, "expression")->required();
  tree->add_option("--depth", to.depth, "levels to render")->check(CLI::Range(0, static_cast<int>(kMaxRenderDepth)));
  tree->add_flag("--dot", to.dot, "Graphviz output");

  auto* bench = app.add_subcommand("bench", "Time repeated evaluations of the same tree");
  bench->add_option("expr", bo.expr, "expression")->required();
  bench->add_option("--at", bo.at, "rational point in [-1,1]")->required();
  bench->add_option("--prec", bo.prec, "binary precision N")->check(positive);
  bench->add_option("--repeat", bo.repeat, "repetitions")->check(positive);

  auto* demo = app.add_subcommand("float-demo", "Compare the exact logistic iterate with binary64");
  fo.at = "0.7";
  fo.prec = 100;
  demo->add_option("--at", fo.at, "start point (default 0.7)");
  demo->add_option("--iterations", fo.iterations, "iterations (default 100)")->check(positive);
  demo->add_option("--prec", fo.prec, "binary precision (default 100)")->check(positive);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  }
  try {
    if (eval->parsed()) return cmd_eval(eo, out);
    if (digits->parsed()) return cmd_digits(go, out);
    if (integ->parsed()) return cmd_integrate(io, out);
    if (tree->parsed()) return cmd_tree(to, out);
    if (bench->parsed()) return cmd_bench(bo, out);
    return cmd_float_demo(fo, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitResourceLimit;
  }
}

}  // namespace sdreal::cli
