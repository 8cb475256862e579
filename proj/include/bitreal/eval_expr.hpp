#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitreal/oracle.hpp"

namespace bitreal {

// An arithmetic expression compiled to a tree of real oracles. nodes holds
// every oracle built while parsing (constants, literals, and intermediate
// operations), so query and bit-operation totals can be read off after the
// root has been evaluated.
struct ParsedExpr {
    RealOracle root;
    std::vector<RealOracle> nodes;

    std::uint64_t total_queries() const;
    std::uint64_t total_oracle_bit_ops() const;
};

// Grammar (whitespace-insensitive):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-')* power
//   power  := atom ('^' ('-')? integer)?
//   atom   := number | const | func '(' expr ')' | '(' expr ')'
//   const  := pi | e | sqrt2
//   func   := exp | sqrt | cbrt
//   number := digits or a finite dyadic decimal ("0.5", "1.25")
// Powers use square-and-multiply over exact oracle products; a negative
// exponent goes through reciprocal (divisor separation applies). "1/3" is
// ordinary division. Malformed text raises ParseError (non-dyadic decimals
// name the nearest representable value); domain violations and divisor
// separation failures surface from the operator oracles as DomainError /
// SeparationError, either at build time or on the first query.
ParsedExpr parse_real_expr(const std::string& text);

} // namespace bitreal
