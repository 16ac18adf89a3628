#pragma once

#include <stdexcept>
#include <string>

namespace cw {

/// Base class for all engine errors; `where` names the originating module.
class Error : public std::runtime_error {
public:
    Error(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, size_t offset)
        : Error("parse", what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

/// Division by an expression whose canonical form is zero.
class ZeroDivisionError : public Error {
public:
    explicit ZeroDivisionError(const std::string& what) : Error("symexpr", what) {}
};

class EvalError : public Error {
public:
    explicit EvalError(const std::string& what) : Error("eval", what) {}
};

} // namespace cw
