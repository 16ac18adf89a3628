#pragma once

#include "cw/num.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cw {

struct RatFn; // canonical rational-function payload, defined in poly.hpp

enum class Kind {
    Number,   // exact rational constant
    Pi,       // the constant pi
    Imag,     // the imaginary unit
    Var,      // named variable
    Power,    // base ^ rational exponent
    Fn,       // elementary function application
    UserFn,   // opaque user function application with formal derivative order
    Product,
    Sum,
};

enum class ElemFn { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log };

const char* elem_fn_name(ElemFn f);
std::optional<ElemFn> elem_fn_from_name(const std::string& s);

class Expr;

struct ExprNode {
    Kind kind;
    Rational number;          // Number
    std::string name;         // Var, UserFn
    std::vector<Expr> kids;   // Sum/Product operands, Fn/UserFn args, Power base at [0]
    Rational expo;            // Power
    ElemFn fn = ElemFn::Sin;  // Fn
    int deriv_order = 0;      // UserFn
    size_t hash = 0;
    bool canonical = false;                  // produced by canonicalize()
    std::shared_ptr<const RatFn> rf;         // set iff canonical

    ExprNode();
    ~ExprNode();
};

/// Immutable symbolic expression handle. Value semantics, cheap to copy,
/// safe to share across threads.
class Expr {
public:
    Expr() = default; // empty handle; only valid after assignment

    Kind kind() const { return node_->kind; }
    const Rational& number() const { return node_->number; }
    const std::string& name() const { return node_->name; }
    const std::vector<Expr>& kids() const { return node_->kids; }
    const Rational& exponent() const { return node_->expo; }
    ElemFn fn() const { return node_->fn; }
    int deriv_order() const { return node_->deriv_order; }
    size_t hash() const { return node_->hash; }
    bool is_canonical() const { return node_->canonical; }
    const std::shared_ptr<const RatFn>& ratfn() const { return node_->rf; }
    bool valid() const { return node_ != nullptr; }

    bool is_number() const { return node_->kind == Kind::Number; }
    bool is_zero() const { return is_number() && node_->number.is_zero(); }
    bool is_one() const { return is_number() && node_->number.is_one(); }

    /// Structural equality (same tree); canonical forms of equal expressions
    /// are structurally equal.
    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    /// Fixed total order on trees; used for canonical term ordering.
    static int compare(const Expr& a, const Expr& b);

    const ExprNode* raw() const { return node_.get(); }

private:
    std::shared_ptr<const ExprNode> node_;
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    friend Expr make_expr(ExprNode&& n);
};

Expr make_expr(ExprNode&& n);

// ------------------------------------------------------------ constructors

Expr num(Rational r);
Expr num(long long n);
Expr num(long long n, long long d);
Expr pi_const();
Expr imag_unit();
Expr var(const std::string& name);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr power(Expr base, Rational exponent);
Expr fn_app(ElemFn f, Expr arg);
Expr user_app(const std::string& name, int deriv_order, std::vector<Expr> args);
Expr sqrt_of(Expr arg); // sugar for power(arg, 1/2)

// Convenience arithmetic; results are canonicalized.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow_int(const Expr& a, long long e);

// ------------------------------------------------------------ printing

/// Renders in the artifact's expression grammar; parse(print(e)) == canon(e).
std::string to_text(const Expr& e);
/// LaTeX rendering (formal derivatives in partial notation).
std::string to_latex(const Expr& e);

std::vector<std::string> free_variables(const Expr& e);
bool contains_var(const Expr& e, const std::string& v);

} // namespace cw

template <>
struct std::hash<cw::Expr> {
    size_t operator()(const cw::Expr& e) const { return e.hash(); }
};
