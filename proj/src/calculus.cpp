#include "cw/calculus.hpp"
#include "cw/canon.hpp"
#include "cw/error.hpp"
#include "cw/poly.hpp"

namespace cw {

namespace {

Expr diff_raw(const Expr& e, const std::string& v);

// chain rule through the atoms of a canonical rational function; much
// cheaper than walking the rendered tree for large expressions
RatFn diff_ratfn(const RatFn& rf, const std::string& v) {
    auto& table = AtomTable::instance();
    std::vector<AtomId> atoms = rf.num.atoms();
    for (AtomId a : rf.den.atoms())
        if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);

    RatFn total = RatFn::zero();
    RatFn den_rf = RatFn::from_poly(rf.den);
    bool den_const = rf.den.is_constant();
    for (AtomId a : atoms) {
        Expr kernel = table.expr(a);
        if (!contains_var(kernel, v)) continue;
        // d(kernel)/dv is small; computed on the kernel tree
        RatFn dk = to_ratfn(canonicalize(diff_raw(kernel, v)));
        if (dk.is_zero()) continue;
        Poly dn = rf.num.derivative_wrt(a);
        RatFn part;
        if (den_const) {
            part = RatFn{std::move(dn), rf.den};
        } else {
            Poly dd = rf.den.derivative_wrt(a);
            // (N' D - N D') / D^2
            Poly numpart = dn * rf.den - rf.num * dd;
            part = RatFn::make(std::move(numpart), rf.den * rf.den);
        }
        total = total + part * dk;
    }
    return total;
}

} // namespace

namespace {

// raw (uncanonicalized) derivative tree
Expr diff_raw(const Expr& e, const std::string& v) {
    switch (e.kind()) {
        case Kind::Number:
        case Kind::Pi:
        case Kind::Imag: return num(0);
        case Kind::Var: return e.name() == v ? num(1) : num(0);
        case Kind::Sum: {
            std::vector<Expr> parts;
            for (const Expr& k : e.kids()) parts.push_back(diff_raw(k, v));
            return sum(std::move(parts));
        }
        case Kind::Product: {
            std::vector<Expr> parts;
            for (size_t i = 0; i < e.kids().size(); ++i) {
                std::vector<Expr> fs = e.kids();
                fs[i] = diff_raw(fs[i], v);
                parts.push_back(product(std::move(fs)));
            }
            return sum(std::move(parts));
        }
        case Kind::Power: {
            const Expr& b = e.kids()[0];
            const Rational& q = e.exponent();
            // q * b^(q-1) * b'
            return product({num(q), power(b, q - Rational(1)), diff_raw(b, v)});
        }
        case Kind::Fn: {
            const Expr& u = e.kids()[0];
            Expr outer;
            switch (e.fn()) {
                case ElemFn::Sin: outer = fn_app(ElemFn::Cos, u); break;
                case ElemFn::Cos: outer = product({num(-1), fn_app(ElemFn::Sin, u)}); break;
                case ElemFn::Tan:
                    outer = sum({num(1), power(fn_app(ElemFn::Tan, u), Rational(2))});
                    break;
                case ElemFn::Sinh: outer = fn_app(ElemFn::Cosh, u); break;
                case ElemFn::Cosh: outer = fn_app(ElemFn::Sinh, u); break;
                case ElemFn::Tanh:
                    outer = sum({num(1), product({num(-1), power(fn_app(ElemFn::Tanh, u), Rational(2))})});
                    break;
                case ElemFn::Exp: outer = fn_app(ElemFn::Exp, u); break;
                case ElemFn::Log: outer = power(u, Rational(-1)); break;
            }
            return product({outer, diff_raw(u, v)});
        }
        case Kind::UserFn: {
            if (e.kids().size() != 1) {
                bool depends = false;
                for (const Expr& k : e.kids())
                    if (contains_var(k, v)) depends = true;
                if (!depends) return num(0);
                throw Error("symexpr",
                            "formal derivatives of multi-argument opaque functions are not supported");
            }
            Expr inner = diff_raw(e.kids()[0], v);
            Expr bumped = user_app(e.name(), e.deriv_order() + 1, {e.kids()[0]});
            return product({bumped, inner});
        }
    }
    throw Error("symexpr", "unknown node kind");
}

Expr subst_raw(const Expr& e, const std::map<std::string, Expr>& repl) {
    switch (e.kind()) {
        case Kind::Number:
        case Kind::Pi:
        case Kind::Imag: return e;
        case Kind::Var: {
            auto it = repl.find(e.name());
            return it == repl.end() ? e : it->second;
        }
        default: break;
    }
    std::vector<Expr> kids;
    kids.reserve(e.kids().size());
    for (const Expr& k : e.kids()) kids.push_back(subst_raw(k, repl));
    switch (e.kind()) {
        case Kind::Sum: return sum(std::move(kids));
        case Kind::Product: return product(std::move(kids));
        case Kind::Power: return power(std::move(kids[0]), e.exponent());
        case Kind::Fn: return fn_app(e.fn(), std::move(kids[0]));
        case Kind::UserFn: return user_app(e.name(), e.deriv_order(), std::move(kids));
        default: break;
    }
    throw Error("symexpr", "unknown node kind");
}

} // namespace

Expr differentiate(const Expr& e, const std::string& v) {
    if (e.is_canonical() && e.ratfn()) return from_ratfn(diff_ratfn(*e.ratfn(), v));
    return canonicalize(diff_raw(e, v));
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
    return canonicalize(subst_raw(e, repl));
}

} // namespace cw
