#pragma once

#include "cw/expr.hpp"
#include "cw/error.hpp"

#include <map>
#include <string>

namespace cw {

/// Tracks user-function arities across parses; first use declares, later
/// uses must agree.
class SymbolTable {
public:
    /// Returns the arity; throws Error on conflict with a prior declaration.
    int declare_function(const std::string& name, int arity);
    bool known(const std::string& name) const { return arity_.count(name) != 0; }
    int arity(const std::string& name) const { return arity_.at(name); }

private:
    std::map<std::string, int> arity_;
};

/// Parses the expression grammar (infix +,-,*,/,^ with rational exponents,
/// function calls, reserved `pi` and `I`) and returns the canonicalized
/// expression. Throws SyntaxError with a byte offset on malformed input.
Expr parse_expr(const std::string& text, SymbolTable* symbols = nullptr);

} // namespace cw
