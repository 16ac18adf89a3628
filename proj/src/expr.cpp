#include "cw/expr.hpp"
#include "cw/poly.hpp"
#include "cw/canon.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cw {

ExprNode::ExprNode() = default;
ExprNode::~ExprNode() = default;

const char* elem_fn_name(ElemFn f) {
    switch (f) {
        case ElemFn::Sin: return "sin";
        case ElemFn::Cos: return "cos";
        case ElemFn::Tan: return "tan";
        case ElemFn::Sinh: return "sinh";
        case ElemFn::Cosh: return "cosh";
        case ElemFn::Tanh: return "tanh";
        case ElemFn::Exp: return "exp";
        case ElemFn::Log: return "log";
    }
    return "?";
}

std::optional<ElemFn> elem_fn_from_name(const std::string& s) {
    static const std::pair<const char*, ElemFn> table[] = {
        {"sin", ElemFn::Sin},   {"cos", ElemFn::Cos},   {"tan", ElemFn::Tan},
        {"sinh", ElemFn::Sinh}, {"cosh", ElemFn::Cosh}, {"tanh", ElemFn::Tanh},
        {"exp", ElemFn::Exp},   {"log", ElemFn::Log},
    };
    for (auto& [name, f] : table)
        if (s == name) return f;
    return std::nullopt;
}

static size_t node_hash(const ExprNode& n) {
    size_t h = static_cast<size_t>(n.kind) * 0x9e3779b97f4a7c15ULL;
    switch (n.kind) {
        case Kind::Number: h = hash_combine(h, n.number.hash()); break;
        case Kind::Pi:
        case Kind::Imag: break;
        case Kind::Var: h = hash_combine(h, std::hash<std::string>{}(n.name)); break;
        case Kind::Power: h = hash_combine(h, n.expo.hash()); break;
        case Kind::Fn: h = hash_combine(h, static_cast<size_t>(n.fn)); break;
        case Kind::UserFn:
            h = hash_combine(h, std::hash<std::string>{}(n.name));
            h = hash_combine(h, static_cast<size_t>(n.deriv_order));
            break;
        default: break;
    }
    for (const Expr& k : n.kids) h = hash_combine(h, k.hash());
    return h;
}

Expr make_expr(ExprNode&& n) {
    n.hash = node_hash(n);
    return Expr(std::make_shared<const ExprNode>(std::move(n)));
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.raw() == b.raw()) return true;
    return Expr::compare(a, b) == 0;
}

static int kind_rank(Kind k) {
    switch (k) {
        case Kind::Number: return 0;
        case Kind::Pi: return 1;
        case Kind::Imag: return 2;
        case Kind::Var: return 3;
        case Kind::Power: return 4;
        case Kind::Fn: return 5;
        case Kind::UserFn: return 6;
        case Kind::Product: return 7;
        case Kind::Sum: return 8;
    }
    return 9;
}

int Expr::compare(const Expr& a, const Expr& b) {
    if (a.raw() == b.raw()) return 0;
    int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
        case Kind::Number: {
            auto c = a.number() <=> b.number();
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case Kind::Pi:
        case Kind::Imag: return 0;
        case Kind::Var: return a.name().compare(b.name());
        case Kind::Power: {
            int c = compare(a.kids()[0], b.kids()[0]);
            if (c) return c;
            auto e = a.exponent() <=> b.exponent();
            return e < 0 ? -1 : (e > 0 ? 1 : 0);
        }
        case Kind::Fn: {
            if (a.fn() != b.fn()) return static_cast<int>(a.fn()) < static_cast<int>(b.fn()) ? -1 : 1;
            break;
        }
        case Kind::UserFn: {
            int c = a.name().compare(b.name());
            if (c) return c < 0 ? -1 : 1;
            if (a.deriv_order() != b.deriv_order())
                return a.deriv_order() < b.deriv_order() ? -1 : 1;
            break;
        }
        default: break;
    }
    const auto& ka = a.kids();
    const auto& kb = b.kids();
    if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
    for (size_t i = 0; i < ka.size(); ++i) {
        int c = compare(ka[i], kb[i]);
        if (c) return c;
    }
    return 0;
}

// ------------------------------------------------------------ constructors

Expr num(Rational r) {
    ExprNode n;
    n.kind = Kind::Number;
    n.number = std::move(r);
    return make_expr(std::move(n));
}
Expr num(long long v) { return num(Rational(v)); }
Expr num(long long a, long long b) { return num(Rational(a, b)); }

Expr pi_const() {
    ExprNode n;
    n.kind = Kind::Pi;
    return make_expr(std::move(n));
}

Expr imag_unit() {
    ExprNode n;
    n.kind = Kind::Imag;
    return make_expr(std::move(n));
}

Expr var(const std::string& name) {
    ExprNode n;
    n.kind = Kind::Var;
    n.name = name;
    return make_expr(std::move(n));
}

Expr sum(std::vector<Expr> terms) {
    if (terms.empty()) return num(0);
    if (terms.size() == 1) return terms[0];
    ExprNode n;
    n.kind = Kind::Sum;
    n.kids = std::move(terms);
    return make_expr(std::move(n));
}

Expr product(std::vector<Expr> factors) {
    if (factors.empty()) return num(1);
    if (factors.size() == 1) return factors[0];
    ExprNode n;
    n.kind = Kind::Product;
    n.kids = std::move(factors);
    return make_expr(std::move(n));
}

Expr power(Expr base, Rational exponent) {
    ExprNode n;
    n.kind = Kind::Power;
    n.kids.push_back(std::move(base));
    n.expo = std::move(exponent);
    return make_expr(std::move(n));
}

Expr fn_app(ElemFn f, Expr arg) {
    ExprNode n;
    n.kind = Kind::Fn;
    n.fn = f;
    n.kids.push_back(std::move(arg));
    return make_expr(std::move(n));
}

Expr user_app(const std::string& name, int deriv_order, std::vector<Expr> args) {
    ExprNode n;
    n.kind = Kind::UserFn;
    n.name = name;
    n.deriv_order = deriv_order;
    n.kids = std::move(args);
    return make_expr(std::move(n));
}

Expr sqrt_of(Expr arg) { return power(std::move(arg), Rational(1, 2)); }

Expr operator+(const Expr& a, const Expr& b) { return canonicalize(sum({a, b})); }
Expr operator-(const Expr& a, const Expr& b) { return canonicalize(sum({a, product({num(-1), b})})); }
Expr operator*(const Expr& a, const Expr& b) { return canonicalize(product({a, b})); }
Expr operator/(const Expr& a, const Expr& b) { return canonicalize(product({a, power(b, Rational(-1))})); }
Expr operator-(const Expr& a) { return canonicalize(product({num(-1), a})); }
Expr pow_int(const Expr& a, long long e) { return canonicalize(power(a, Rational(e))); }

// ------------------------------------------------------------ printing

namespace {

enum Prec { PrecSum = 0, PrecProd = 1, PrecUnary = 2, PrecPow = 3, PrecAtomic = 4 };

void print_rec(std::ostringstream& os, const Expr& e, int parent_prec);

int prec_of(const Expr& e) {
    switch (e.kind()) {
        case Kind::Sum: return PrecSum;
        case Kind::Product: return PrecProd;
        case Kind::Power:
            if (e.exponent() == Rational(1, 2)) return PrecAtomic; // prints as sqrt(...)
            return PrecPow;
        case Kind::Number:
            if (e.number().is_neg()) return PrecSum;
            if (!e.number().is_integer()) return PrecProd;
            return PrecAtomic;
        default: return PrecAtomic;
    }
}

void paren_if(std::ostringstream& os, const Expr& e, int min_prec) {
    if (prec_of(e) < min_prec) {
        os << "(";
        print_rec(os, e, PrecSum);
        os << ")";
    } else {
        print_rec(os, e, PrecSum);
    }
}

bool is_negative_leading(const Expr& e) {
    if (e.kind() == Kind::Number) return e.number().is_neg();
    if (e.kind() == Kind::Product && !e.kids().empty()) return is_negative_leading(e.kids()[0]);
    return false;
}

// strips one leading minus sign, returns the positive counterpart
Expr strip_minus(const Expr& e) {
    if (e.kind() == Kind::Number) return num(-e.number());
    if (e.kind() == Kind::Product) {
        std::vector<Expr> ks = e.kids();
        ks[0] = strip_minus(ks[0]);
        if (ks[0].is_one() && ks.size() > 1) ks.erase(ks.begin());
        return product(std::move(ks));
    }
    return e;
}

// prints the positive-power counterpart of a divisor factor
void print_divisor(std::ostringstream& os, const Expr& k) {
    Rational pos = -k.exponent();
    Expr inv = pos.is_one() ? k.kids()[0] : power(k.kids()[0], pos);
    paren_if(os, inv, PrecUnary);
}

void print_rec(std::ostringstream& os, const Expr& e, int parent_prec) {
    switch (e.kind()) {
        case Kind::Number: {
            const Rational& r = e.number();
            bool parens = (r.is_neg() && parent_prec > PrecSum) ||
                          (!r.is_integer() && parent_prec > PrecProd);
            if (parens) os << "(";
            os << r.to_string();
            if (parens) os << ")";
            return;
        }
        case Kind::Pi: os << "pi"; return;
        case Kind::Imag: os << "I"; return;
        case Kind::Var: os << e.name(); return;
        case Kind::Power: {
            const Rational& ex = e.exponent();
            if (ex == Rational(1, 2)) {
                os << "sqrt(";
                print_rec(os, e.kids()[0], PrecSum);
                os << ")";
                return;
            }
            if (ex.is_neg()) {
                // render as a quotient: 1/base^|ex|
                if (parent_prec > PrecProd) os << "(";
                os << "1/";
                print_divisor(os, e);
                if (parent_prec > PrecProd) os << ")";
                return;
            }
            if (parent_prec > PrecPow) os << "(";
            paren_if(os, e.kids()[0], PrecAtomic);
            os << "^";
            if (ex.is_integer()) os << ex.to_string();
            else os << "(" << ex.to_string() << ")";
            if (parent_prec > PrecPow) os << ")";
            return;
        }
        case Kind::Fn: {
            os << elem_fn_name(e.fn()) << "(";
            print_rec(os, e.kids()[0], PrecSum);
            os << ")";
            return;
        }
        case Kind::UserFn: {
            os << e.name();
            for (int i = 0; i < e.deriv_order(); ++i) os << "'";
            os << "(";
            for (size_t i = 0; i < e.kids().size(); ++i) {
                if (i) os << ", ";
                print_rec(os, e.kids()[i], PrecSum);
            }
            os << ")";
            return;
        }
        case Kind::Product: {
            if (parent_prec > PrecProd) os << "(";
            bool first = true;
            for (const Expr& k : e.kids()) {
                bool divide = k.kind() == Kind::Power && k.exponent().is_neg();
                if (first && divide) os << "1";
                if (!first || divide) os << (divide ? "/" : "*");
                if (divide) print_divisor(os, k);
                else paren_if(os, k, first ? PrecProd : PrecUnary);
                first = false;
            }
            if (parent_prec > PrecProd) os << ")";
            return;
        }
        case Kind::Sum: {
            if (parent_prec > PrecSum) os << "(";
            bool first = true;
            for (const Expr& k : e.kids()) {
                if (!first && is_negative_leading(k)) {
                    os << " - ";
                    paren_if(os, strip_minus(k), PrecProd);
                } else {
                    if (!first) os << " + ";
                    paren_if(os, k, first ? PrecSum : PrecProd);
                }
                first = false;
            }
            if (parent_prec > PrecSum) os << ")";
            return;
        }
    }
}

} // namespace

std::string to_text(const Expr& e) {
    std::ostringstream os;
    print_rec(os, e, PrecSum);
    return os.str();
}

// ------------------------------------------------------------ latex

namespace {

void latex_rec(std::ostringstream& os, const Expr& e, int parent_prec);

void latex_paren_if(std::ostringstream& os, const Expr& e, int prec, int parent_prec) {
    if (prec < parent_prec) {
        os << "\\left(";
        latex_rec(os, e, PrecSum);
        os << "\\right)";
    } else {
        latex_rec(os, e, parent_prec);
    }
}

void latex_rec(std::ostringstream& os, const Expr& e, int parent_prec) {
    switch (e.kind()) {
        case Kind::Number: {
            const Rational& r = e.number();
            if (r.is_integer()) {
                if (r.is_neg() && parent_prec > PrecSum) os << "\\left(" << r.to_string() << "\\right)";
                else os << r.to_string();
            } else {
                if (r.is_neg()) os << "-";
                os << "\\frac{" << r.abs().num().to_string() << "}{" << r.den().to_string() << "}";
            }
            return;
        }
        case Kind::Pi: os << "\\pi"; return;
        case Kind::Imag: os << "i"; return;
        case Kind::Var: {
            if (e.name() == "zbar") { os << "\\bar{z}"; return; }
            os << e.name();
            return;
        }
        case Kind::Power: {
            const Rational& ex = e.exponent();
            if (ex == Rational(1, 2)) {
                os << "\\sqrt{";
                latex_rec(os, e.kids()[0], PrecSum);
                os << "}";
                return;
            }
            latex_paren_if(os, e.kids()[0], PrecAtomic, PrecAtomic);
            os << "^{" << ex.to_string() << "}";
            return;
        }
        case Kind::Fn: {
            os << "\\" << elem_fn_name(e.fn()) << "\\left(";
            latex_rec(os, e.kids()[0], PrecSum);
            os << "\\right)";
            return;
        }
        case Kind::UserFn: {
            if (e.deriv_order() == 0) {
                os << e.name();
            } else if (e.deriv_order() == 1) {
                os << "\\frac{\\partial\\," << e.name() << "}{\\partial " << to_latex(e.kids()[0]) << "}";
                return;
            } else {
                os << "\\frac{\\partial^" << e.deriv_order() << "\\," << e.name() << "}{\\partial "
                   << to_latex(e.kids()[0]) << "^" << e.deriv_order() << "}";
                return;
            }
            os << "\\left(";
            for (size_t i = 0; i < e.kids().size(); ++i) {
                if (i) os << ", ";
                latex_rec(os, e.kids()[i], PrecSum);
            }
            os << "\\right)";
            return;
        }
        case Kind::Product: {
            // collect numerator/denominator factors
            std::vector<Expr> nums, dens;
            for (const Expr& k : e.kids()) {
                if (k.kind() == Kind::Power && k.exponent().is_neg())
                    dens.push_back(power(k.kids()[0], -k.exponent()));
                else
                    nums.push_back(k);
            }
            if (!dens.empty()) {
                if (parent_prec > PrecProd) os << "\\left(";
                os << "\\frac{";
                latex_rec(os, nums.empty() ? num(1) : product(nums), PrecSum);
                os << "}{";
                latex_rec(os, dens.size() == 1 ? dens[0] : product(dens), PrecSum);
                os << "}";
                if (parent_prec > PrecProd) os << "\\right)";
                return;
            }
            if (parent_prec > PrecProd) os << "\\left(";
            bool first = true;
            for (const Expr& k : e.kids()) {
                if (!first) os << " \\, ";
                latex_paren_if(os, k, PrecProd, first ? PrecProd : PrecUnary);
                first = false;
            }
            if (parent_prec > PrecProd) os << "\\right)";
            return;
        }
        case Kind::Sum: {
            if (parent_prec > PrecSum) os << "\\left(";
            bool first = true;
            for (const Expr& k : e.kids()) {
                if (!first && is_negative_leading(k)) {
                    os << " - ";
                    latex_rec(os, strip_minus(k), PrecProd);
                } else {
                    if (!first) os << " + ";
                    latex_rec(os, k, first ? PrecSum : PrecProd);
                }
                first = false;
            }
            if (parent_prec > PrecSum) os << "\\right)";
            return;
        }
    }
}

} // namespace

std::string to_latex(const Expr& e) {
    std::ostringstream os;
    latex_rec(os, e, PrecSum);
    return os.str();
}

// ------------------------------------------------------------ variables

static void collect_vars(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == Kind::Var) out.insert(e.name());
    for (const Expr& k : e.kids()) collect_vars(k, out);
}

std::vector<std::string> free_variables(const Expr& e) {
    std::set<std::string> s;
    collect_vars(e, s);
    return {s.begin(), s.end()};
}

bool contains_var(const Expr& e, const std::string& v) {
    if (e.kind() == Kind::Var) return e.name() == v;
    for (const Expr& k : e.kids())
        if (contains_var(k, v)) return true;
    return false;
}

} // namespace cw
