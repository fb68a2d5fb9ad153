#ifndef SDREAL_EXPRDSL_HPP
#define SDREAL_EXPRDSL_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sdreal/ctree.hpp"
#include "sdreal/oracle.hpp"

namespace sdreal {

/// Syntax error; `position` is the 1-based byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

inline constexpr std::size_t kMaxPowExponent = 1000000;

/// Grammar:
///
///   func  := atom { "o" atom }              f o g is f after g, left-assoc
///   atom  := "lin(" rat "," rat ")"
///          | "quad(" rat "," rat "," rat ")"
///          | "logistic(" rat ")"
///          | "pow(" func "," nat ")"
///          | "(" func ")"
///   rat   := [+-] digits [ "/" digits ] | [+-] digits "." digits
///
/// Whitespace may appear between tokens; `o` must be separated from
/// neighbouring words. Atoms whose function leaves I raise DomainError.
FuncExpr parse(std::string_view src);

/// Tree realizing the expression: atoms map to their builders, `o` to
/// compose and pow to left-nested iteration.
CTree to_tree(const FuncExpr& e);

}  // namespace sdreal

#endif  // SDREAL_EXPRDSL_HPP
