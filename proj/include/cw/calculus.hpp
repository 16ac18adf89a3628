#pragma once

#include "cw/expr.hpp"

#include <map>
#include <string>

namespace cw {

/// Partial derivative with respect to a variable; result canonicalized.
/// Opaque unary user functions yield formal derivatives of the next order;
/// differentiating a multi-argument opaque application is unsupported.
Expr differentiate(const Expr& e, const std::string& v);

/// Replaces variables by expressions everywhere (including inside function
/// kernels); result canonicalized.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl);

} // namespace cw
