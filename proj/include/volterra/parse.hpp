#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "volterra/symexpr.hpp"

namespace volterra {

/// Raw syntax tree produced by the parser, before canonical normalization.
/// Grammar: variables x1..xn, xi1..xin, tau, THETA; operators + - * / ^;
/// rational exponents ^(-p/q); complex constants such as (1+2i) or 2.5i.
struct ExprNode {
    enum class Kind { Const, X, Xi, Tau, Theta, Add, Mul, Neg, Pow };

    Kind kind = Kind::Const;
    Complex value;          // Const
    int index = 0;          // X, Xi (zero-based)
    int exp_num = 1;        // Pow: exponent numerator
    int exp_den = 1;        // Pow: exponent denominator (> 0)
    std::size_t position = 0;
    std::vector<std::unique_ptr<ExprNode>> children;
};

using ExprTree = std::unique_ptr<ExprNode>;

ExprTree parse_tree(std::string_view text, int n);

/// Direct evaluation of the raw tree (principal branch for fractional powers).
Complex evaluate_tree(const ExprNode& node, const Context& ctx, const EvalPoint& pt);

/// Canonical form of a raw tree.
SymExpr normalize(const ExprNode& node, const ContextPtr& ctx);

/// parse_tree + normalize. Throws ParseError on bad syntax, unknown variables
/// or Theta exponents outside (1/w)Z.
SymExpr parse_expr(std::string_view text, const ContextPtr& ctx);

/// Parses a polynomial in x and xi (no tau, no THETA), e.g. a principal symbol or coefficient.
Poly parse_poly(std::string_view text, int n);

}  // namespace volterra
