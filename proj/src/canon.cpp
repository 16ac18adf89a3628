#include "cw/canon.hpp"
#include "cw/error.hpp"

#include <algorithm>
#include <map>

namespace cw {

// ------------------------------------------------------------ to_ratfn

namespace {

RatFn atom_poly(const Expr& kernel) {
    return RatFn::from_poly(Poly::atom(AtomTable::instance().intern(kernel)));
}

RatFn ratfn_of(const Expr& e);

// b^(p/q) with q > 1; splits the integer part and keeps a fractional-power
// kernel of exponent 1/q
RatFn fractional_power(const Expr& base, const Rational& ex) {
    RatFn rb = ratfn_of(base);
    long long p = 0, q = 0;
    if (!ex.num().fits_ll() || !ex.den().fits_ll())
        throw Error("symexpr", "exponent too large");
    p = ex.num().to_ll();
    q = ex.den().to_ll();

    if (rb.is_zero()) {
        if (p > 0) return RatFn::zero();
        throw ZeroDivisionError("zero raised to a negative power");
    }
    if (rb.is_constant() && q == 2) {
        GaussRational c = rb.num.constant_value() * rb.den.constant_value().inverse();
        if (c.is_real()) {
            Rational r = c.re();
            Rational root;
            if (!r.is_neg() && r.sqrt_exact(root))
                return RatFn::constant(GaussRational(root).pow(p));
            if (r.is_neg() && (-r).sqrt_exact(root))
                return RatFn::constant(GaussRational(Rational(0), root).pow(p));
        }
    }
    // p = s*q + m with 0 <= m < q
    long long s = p >= 0 ? p / q : -((-p + q - 1) / q);
    long long m = p - s * q;
    Expr base_canon = canonicalize(base);
    RatFn out = rb.pow_int(s);
    if (m != 0) {
        Expr kernel = power(base_canon, Rational(1, q));
        out = out * atom_poly(kernel).pow_int(m);
    }
    return out;
}

bool rational_arg(const RatFn& rf, Rational* out) {
    if (!rf.is_constant()) return false;
    GaussRational c = rf.num.constant_value() * rf.den.constant_value().inverse();
    if (!c.is_real()) return false;
    *out = c.re();
    return true;
}

RatFn elementary_app(ElemFn f, const Expr& arg) {
    Expr arg_canon = canonicalize(arg);
    Rational r;
    if (rational_arg(*arg_canon.ratfn(), &r)) {
        if (r.is_zero()) {
            switch (f) {
                case ElemFn::Sin:
                case ElemFn::Tan:
                case ElemFn::Sinh:
                case ElemFn::Tanh: return RatFn::zero();
                case ElemFn::Cos:
                case ElemFn::Cosh:
                case ElemFn::Exp: return RatFn::constant(GaussRational(1));
                case ElemFn::Log: throw Error("symexpr", "log(0) is undefined");
            }
        }
        if (r.is_one() && f == ElemFn::Log) return RatFn::zero();
    }
    return atom_poly(fn_app(f, arg_canon));
}

RatFn ratfn_of(const Expr& e) {
    if (e.is_canonical() && e.ratfn()) return *e.ratfn();
    switch (e.kind()) {
        case Kind::Number: return RatFn::constant(GaussRational(e.number()));
        case Kind::Pi: return atom_poly(pi_const());
        case Kind::Imag: return RatFn::constant(GaussRational::i());
        case Kind::Var: return atom_poly(var(e.name()));
        case Kind::Sum: {
            RatFn acc = RatFn::zero();
            for (const Expr& k : e.kids()) acc = acc + ratfn_of(k);
            return acc;
        }
        case Kind::Product: {
            RatFn acc = RatFn::constant(GaussRational(1));
            for (const Expr& k : e.kids()) {
                acc = acc * ratfn_of(k);
                if (acc.is_zero()) {
                    // keep scanning so a zero divisor still raises
                    for (const Expr& rest : e.kids()) (void)ratfn_of(rest);
                    return acc;
                }
            }
            return acc;
        }
        case Kind::Power: {
            const Rational& ex = e.exponent();
            const Expr& base = e.kids()[0];
            // principal fractional roots raised to further powers combine:
            // (b^(1/q))^r = b^(r/q)
            if (base.kind() == Kind::Power && !base.exponent().is_integer())
                return ratfn_of(power(base.kids()[0], base.exponent() * ex));
            if (ex.is_integer()) {
                if (!ex.num().fits_ll()) throw Error("symexpr", "exponent too large");
                return ratfn_of(base).pow_int(ex.num().to_ll());
            }
            return fractional_power(base, ex);
        }
        case Kind::Fn: return elementary_app(e.fn(), e.kids()[0]);
        case Kind::UserFn: {
            std::vector<Expr> args;
            args.reserve(e.kids().size());
            for (const Expr& k : e.kids()) args.push_back(canonicalize(k));
            return atom_poly(user_app(e.name(), e.deriv_order(), std::move(args)));
        }
    }
    throw Error("symexpr", "unknown node kind");
}

// ------------------------------------------------------------ rendering

struct RenderOrder {
    std::map<AtomId, std::string> keys;
    const std::string& key(AtomId a) {
        auto it = keys.find(a);
        if (it == keys.end()) it = keys.emplace(a, AtomTable::instance().render_key(a)).first;
        return it->second;
    }
    // display order: higher total degree first, then lex by render keys
    bool term_less(const Monomial& a, const Monomial& b) {
        uint32_t da = a.total_degree(), db = b.total_degree();
        if (da != db) return da > db;
        // collect union of atoms sorted by key
        std::vector<AtomId> atoms;
        for (auto& [id, e] : a.f) atoms.push_back(id);
        for (auto& [id, e] : b.f)
            if (std::find(atoms.begin(), atoms.end(), id) == atoms.end()) atoms.push_back(id);
        std::sort(atoms.begin(), atoms.end(),
                  [&](AtomId x, AtomId y) { return key(x) < key(y); });
        for (AtomId id : atoms) {
            uint32_t ea = a.exp_of(id), eb = b.exp_of(id);
            if (ea != eb) return ea > eb;
        }
        return false;
    }
};

Expr coeff_expr(const GaussRational& c) {
    if (c.im().is_zero()) return num(c.re());
    Expr ipart;
    if (c.im().is_one()) ipart = imag_unit();
    else if (c.im() == Rational(-1)) ipart = product({num(-1), imag_unit()});
    else ipart = product({num(c.im()), imag_unit()});
    if (c.re().is_zero()) return ipart;
    return sum({num(c.re()), ipart});
}

Expr render_term(const Monomial& m, const GaussRational& c, RenderOrder& ord) {
    if (m.is_one()) return coeff_expr(c);
    std::vector<std::pair<AtomId, uint32_t>> factors(m.f.begin(), m.f.end());
    std::sort(factors.begin(), factors.end(),
              [&](auto& x, auto& y) { return ord.key(x.first) < ord.key(y.first); });
    std::vector<Expr> parts;
    if (c.is_one()) {
        // no coefficient factor
    } else if (c == GaussRational(-1)) {
        parts.push_back(num(-1));
    } else {
        parts.push_back(coeff_expr(c));
    }
    for (auto& [id, e] : factors) {
        Expr a = AtomTable::instance().expr(id);
        parts.push_back(e == 1 ? a : power(a, Rational(static_cast<long long>(e))));
    }
    return product(std::move(parts));
}

Expr render_poly(const Poly& p, RenderOrder& ord) {
    if (p.is_zero()) return num(0);
    std::vector<std::pair<Monomial, GaussRational>> terms = p.terms;
    std::sort(terms.begin(), terms.end(),
              [&](auto& x, auto& y) { return ord.term_less(x.first, y.first); });
    std::vector<Expr> out;
    out.reserve(terms.size());
    for (auto& [m, c] : terms) out.push_back(render_term(m, c, ord));
    return sum(std::move(out));
}

// Scales num/den so den has coprime Gaussian-integer coefficients with a
// canonical leading unit in *render* order; cross-process deterministic.
void display_scale(Poly& n, Poly& d, RenderOrder& ord) {
    Rational content = d.rational_content();
    GaussRational scale{content.inverse()};
    const Monomial* lead = &d.terms.front().first;
    const GaussRational* lead_c = &d.terms.front().second;
    for (auto& [m, c] : d.terms) {
        if (ord.term_less(m, *lead)) {
            lead = &m;
            lead_c = &c;
        }
    }
    GaussRational lc = *lead_c * scale;
    static const GaussRational units[4] = {
        GaussRational(1), GaussRational(-1),
        GaussRational(Rational(0), Rational(1)), GaussRational(Rational(0), Rational(-1))};
    for (const auto& u : units) {
        GaussRational v = lc * u;
        if (v.re().sign() > 0 || (v.re().is_zero() && v.im().sign() > 0)) {
            scale = scale * u;
            break;
        }
    }
    n = n.scaled(scale);
    d = d.scaled(scale);
}

Expr attach(Expr tree, RatFn rf) {
    ExprNode n;
    n.kind = tree.kind();
    n.number = tree.number();
    n.name = tree.name();
    n.kids = tree.kids();
    n.expo = tree.exponent();
    n.fn = tree.fn();
    n.deriv_order = tree.deriv_order();
    n.canonical = true;
    n.rf = std::make_shared<const RatFn>(std::move(rf));
    return make_expr(std::move(n));
}

} // namespace

Expr from_ratfn(const RatFn& rf) {
    RenderOrder ord;
    if (rf.num.is_zero()) return attach(num(0), rf);
    if (rf.den.is_constant()) {
        Poly n = rf.num.scaled(rf.den.constant_value().inverse());
        return attach(render_poly(n, ord), RatFn{n, Poly::one()});
    }
    Poly n = rf.num, d = rf.den;
    display_scale(n, d, ord);
    Expr num_tree = render_poly(n, ord);
    Expr den_tree = render_poly(d, ord);
    Expr inv = power(den_tree, Rational(-1));
    Expr tree;
    if (num_tree.is_one()) {
        tree = inv;
    } else if (num_tree.kind() == Kind::Product) {
        std::vector<Expr> kids = num_tree.kids();
        kids.push_back(inv);
        tree = product(std::move(kids));
    } else {
        tree = product({num_tree, inv});
    }
    return attach(std::move(tree), rf);
}

RatFn to_ratfn(const Expr& e) { return ratfn_of(e); }

Expr canonicalize(const Expr& e) { return canonicalize(e, CanonOptions{}); }

Expr canonicalize(const Expr& e, const CanonOptions& opts) {
    RatFn rf = ratfn_of(e);
    if (opts.trig_rewrite) rf = apply_trig_rewrites(rf);
    return from_ratfn(rf);
}

RatFn apply_trig_rewrites(const RatFn& rf) {
    Poly n = rf.num, d = rf.den;
    auto& table = AtomTable::instance();
    bool changed = false;
    for (int pass = 0; pass < 8; ++pass) {
        bool any = false;
        std::vector<AtomId> atoms = n.atoms();
        for (AtomId a : d.atoms())
            if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);
        for (AtomId a : atoms) {
            if (n.degree_in(a) < 2 && d.degree_in(a) < 2) continue;
            Expr kernel = table.expr(a);
            if (kernel.kind() != Kind::Fn) continue;
            Poly sq;
            if (kernel.fn() == ElemFn::Sin) {
                AtomId c = table.intern(fn_app(ElemFn::Cos, kernel.kids()[0]));
                sq = Poly::one() - Poly::atom(c, 2);
            } else if (kernel.fn() == ElemFn::Sinh) {
                AtomId c = table.intern(fn_app(ElemFn::Cosh, kernel.kids()[0]));
                sq = Poly::atom(c, 2) - Poly::one();
            } else {
                continue;
            }
            n = n.subst_square(a, sq);
            d = d.subst_square(a, sq);
            any = true;
            changed = true;
        }
        if (!any) break;
    }
    if (!changed) return rf;
    return RatFn::make(std::move(n), std::move(d));
}

bool is_canonically_zero(const Expr& e) { return to_ratfn(e).is_zero(); }

bool is_canonically_zero(const Expr& e, const CanonOptions& opts) {
    RatFn rf = to_ratfn(e);
    if (rf.is_zero()) return true;
    if (opts.trig_rewrite) return apply_trig_rewrites(rf).is_zero();
    return false;
}

bool canonically_equal(const Expr& a, const Expr& b) {
    return (to_ratfn(a) - to_ratfn(b)).is_zero();
}

bool as_gauss_constant(const Expr& e, GaussRational* out) {
    RatFn rf = to_ratfn(e);
    if (!rf.is_constant()) return false;
    if (out) *out = rf.num.constant_value() * rf.den.constant_value().inverse();
    return true;
}

bool as_rational_constant(const Expr& e, Rational* out) {
    GaussRational g;
    if (!as_gauss_constant(e, &g)) return false;
    if (!g.is_real()) return false;
    if (out) *out = g.re();
    return true;
}

} // namespace cw
