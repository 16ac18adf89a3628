#include "cw/series.hpp"
#include "cw/canon.hpp"
#include "cw/error.hpp"

#include <algorithm>

namespace cw {

// ---------------------------------------------------------------- PowerSeries

PowerSeries::PowerSeries(std::vector<Expr> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw Error("series", "empty coefficient list");
    for (Expr& e : c_) e = canonicalize(e);
}

PowerSeries PowerSeries::zero(int order) {
    return PowerSeries(std::vector<Expr>(static_cast<size_t>(order) + 1, num(0)));
}

PowerSeries PowerSeries::one(int order) {
    PowerSeries s = zero(order);
    s.c_[0] = num(1);
    return s;
}

PowerSeries PowerSeries::variable(int order) {
    PowerSeries s = zero(order);
    if (order >= 1) s.c_[1] = num(1);
    return s;
}

Rational PowerSeries::rational_coeff(int k) const {
    Rational r;
    if (!as_rational_constant(coeff(k), &r))
        throw Error("series", "coefficient " + std::to_string(k) + " is not rational");
    return r;
}

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
    int n = std::min(a.order(), b.order());
    std::vector<Expr> c(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) c[static_cast<size_t>(k)] = a.coeff(k) + b.coeff(k);
    return PowerSeries(std::move(c));
}

PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
    int n = std::min(a.order(), b.order());
    std::vector<Expr> c(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) c[static_cast<size_t>(k)] = a.coeff(k) - b.coeff(k);
    return PowerSeries(std::move(c));
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    int n = std::min(a.order(), b.order());
    std::vector<Expr> c(static_cast<size_t>(n) + 1, num(0));
    for (int i = 0; i <= n; ++i) {
        if (a.coeff(i).is_zero()) continue;
        for (int j = 0; i + j <= n; ++j)
            c[static_cast<size_t>(i + j)] = c[static_cast<size_t>(i + j)] + a.coeff(i) * b.coeff(j);
    }
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::scaled(const Expr& s) const {
    std::vector<Expr> c(c_.size());
    for (size_t k = 0; k < c_.size(); ++k) c[k] = c_[k] * s;
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::compose(const PowerSeries& g, const PowerSeries& h) {
    if (!h.coeff(0).is_zero()) throw Error("series", "compose requires h(0) = 0");
    int n = h.order();
    PowerSeries r = PowerSeries::zero(n);
    for (int k = std::min(g.order(), n); k >= 0; --k) {
        r = r * h;
        std::vector<Expr> c = r.coeffs();
        c[0] = c[0] + g.coeff(k);
        r = PowerSeries(std::move(c));
    }
    return r;
}

PowerSeries PowerSeries::reciprocal() const {
    if (coeff(0).is_zero()) throw Error("series", "reciprocal of series with zero constant term");
    int n = order();
    std::vector<Expr> b(static_cast<size_t>(n) + 1, num(0));
    Expr inv = num(1) / coeff(0);
    b[0] = inv;
    for (int k = 1; k <= n; ++k) {
        Expr s = num(0);
        for (int j = 1; j <= k; ++j) s = s + coeff(j) * b[static_cast<size_t>(k - j)];
        b[static_cast<size_t>(k)] = num(-1) * inv * s;
    }
    return PowerSeries(std::move(b));
}

PowerSeries PowerSeries::sqrt_unit() const {
    if (!coeff(0).is_one())
        throw Error("series", "square root requires unit constant term (branch with f(0)=1)");
    int n = order();
    std::vector<Expr> b(static_cast<size_t>(n) + 1, num(0));
    b[0] = num(1);
    for (int k = 1; k <= n; ++k) {
        Expr s = num(0);
        for (int j = 1; j < k; ++j) s = s + b[static_cast<size_t>(j)] * b[static_cast<size_t>(k - j)];
        b[static_cast<size_t>(k)] = (coeff(k) - s) * num(1, 2);
    }
    return PowerSeries(std::move(b));
}

PowerSeries PowerSeries::stretch2(int order) const {
    std::vector<Expr> c(static_cast<size_t>(order) + 1, num(0));
    for (int j = 0; 2 * j <= order && j <= this->order(); ++j)
        c[static_cast<size_t>(2 * j)] = coeff(j);
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::odd_part() const {
    std::vector<Expr> c = c_;
    for (size_t k = 0; k < c.size(); k += 2) c[k] = num(0);
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::even_part() const {
    std::vector<Expr> c = c_;
    for (size_t k = 1; k < c.size(); k += 2) c[k] = num(0);
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::truncated(int order) const {
    std::vector<Expr> c(c_.begin(), c_.begin() + std::min<size_t>(c_.size(), static_cast<size_t>(order) + 1));
    c.resize(static_cast<size_t>(order) + 1, num(0));
    return PowerSeries(std::move(c));
}

// ---------------------------------------------------------------- taylor

namespace {

// Internal Laurent-aware truncated series: sum of c[j] z^(val+j); `known`
// is the highest exponent whose coefficient is trustworthy.
struct LSeries {
    int val = 0;
    int known = 0;
    std::vector<Expr> c; // exponents val .. val + c.size() - 1

    Expr at(int e) const {
        if (e < val) return num(0);
        size_t i = static_cast<size_t>(e - val);
        return i < c.size() ? c[i] : num(0);
    }
    void normalize() {
        size_t lead = 0;
        while (lead < c.size() && c[lead].is_zero()) ++lead;
        if (lead == c.size()) {
            val = known + 1;
            c.clear();
            return;
        }
        if (lead > 0) {
            c.erase(c.begin(), c.begin() + static_cast<long>(lead));
            val += static_cast<int>(lead);
        }
        size_t maxlen = static_cast<size_t>(std::max(0, known - val + 1));
        if (c.size() > maxlen) c.resize(maxlen, num(0));
    }
    bool is_zero() const { return c.empty(); }
};

LSeries lconst(Expr e, int known) {
    LSeries s;
    s.val = 0;
    s.known = known;
    s.c = {canonicalize(std::move(e))};
    s.normalize();
    return s;
}

LSeries lvar(int known) {
    LSeries s;
    s.val = 1;
    s.known = known;
    s.c = {num(1)};
    return s;
}

LSeries ladd(const LSeries& a, const LSeries& b) {
    LSeries r;
    r.known = std::min(a.known, b.known);
    if (a.is_zero() && b.is_zero()) {
        r.val = r.known + 1;
        return r;
    }
    int lo = a.is_zero() ? b.val : (b.is_zero() ? a.val : std::min(a.val, b.val));
    r.val = std::min(lo, r.known + 1);
    for (int e = r.val; e <= r.known; ++e) r.c.push_back(a.at(e) + b.at(e));
    r.normalize();
    return r;
}

LSeries lneg(const LSeries& a) {
    LSeries r = a;
    for (Expr& e : r.c) e = num(-1) * e;
    return r;
}

LSeries lmul(const LSeries& a, const LSeries& b) {
    LSeries r;
    if (a.is_zero() || b.is_zero()) {
        r.known = std::min(a.known + (b.is_zero() ? b.known + 1 : b.val),
                           b.known + (a.is_zero() ? a.known + 1 : a.val));
        r.val = r.known + 1;
        return r;
    }
    r.known = std::min(a.known + b.val, b.known + a.val);
    r.val = a.val + b.val;
    if (r.val > r.known) {
        r.val = r.known + 1;
        return r;
    }
    r.c.assign(static_cast<size_t>(r.known - r.val + 1), num(0));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        int ea = a.val + static_cast<int>(i);
        for (size_t j = 0; j < b.c.size(); ++j) {
            int e = ea + b.val + static_cast<int>(j);
            if (e > r.known) break;
            size_t idx = static_cast<size_t>(e - r.val);
            r.c[idx] = r.c[idx] + a.c[i] * b.c[j];
        }
    }
    r.normalize();
    return r;
}

LSeries lreciprocal(const LSeries& a) {
    if (a.is_zero()) throw ZeroDivisionError("series division by zero");
    int v = a.val;
    int uk = a.known - v; // the unit part is known through exponent uk
    LSeries r;
    r.val = -v;
    r.known = uk - v;
    if (r.known < r.val) throw Error("series", "insufficient series order for division");
    std::vector<Expr> b(static_cast<size_t>(uk) + 1, num(0));
    Expr inv = num(1) / a.c[0];
    b[0] = inv;
    for (int k = 1; k <= uk; ++k) {
        Expr s = num(0);
        for (int j = 1; j <= k; ++j) {
            Expr aj = static_cast<size_t>(j) < a.c.size() ? a.c[static_cast<size_t>(j)] : num(0);
            s = s + aj * b[static_cast<size_t>(k - j)];
        }
        b[static_cast<size_t>(k)] = num(-1) * inv * s;
    }
    r.c = std::move(b);
    r.normalize();
    return r;
}

LSeries lpow_int(const LSeries& a, long long e) {
    if (e == 0) return lconst(num(1), a.known);
    if (e < 0) return lpow_int(lreciprocal(a), -e);
    LSeries r = lconst(num(1), a.known + a.val * (static_cast<int>(e) - 1));
    LSeries base = a;
    while (e) {
        if (e & 1) r = lmul(r, base);
        e >>= 1;
        if (e) base = lmul(base, base);
    }
    return r;
}

// Horner evaluation of an entire function's Maclaurin coefficients at a
// vanishing series u
LSeries lcompose(const std::vector<Rational>& m, const LSeries& u) {
    LSeries r = lconst(num(0), u.known);
    for (size_t k = m.size(); k-- > 0;) {
        r = lmul(r, u);
        r = ladd(r, lconst(num(m[k]), u.known));
    }
    return r;
}

std::vector<Rational> mac_exp(int n) {
    std::vector<Rational> m(static_cast<size_t>(n) + 1);
    Rational f(1);
    for (int k = 0; k <= n; ++k) {
        if (k > 0) f = f * Rational(1, k);
        m[static_cast<size_t>(k)] = f;
    }
    return m;
}

std::vector<Rational> mac_sin(int n, bool hyperbolic) {
    std::vector<Rational> m(static_cast<size_t>(n) + 1, Rational(0));
    Rational f(1);
    for (int k = 1; k <= n; ++k) {
        f = f * Rational(1, k);
        if (k % 2 == 1) m[static_cast<size_t>(k)] = (hyperbolic || (k % 4 == 1)) ? f : -f;
    }
    return m;
}

std::vector<Rational> mac_cos(int n, bool hyperbolic) {
    std::vector<Rational> m(static_cast<size_t>(n) + 1, Rational(0));
    m[0] = Rational(1);
    Rational f(1);
    for (int k = 1; k <= n; ++k) {
        f = f * Rational(1, k);
        if (k % 2 == 0) m[static_cast<size_t>(k)] = (hyperbolic || (k % 4 == 0)) ? f : -f;
    }
    return m;
}

std::vector<Rational> mac_log1p(int n) {
    std::vector<Rational> m(static_cast<size_t>(n) + 1, Rational(0));
    for (int k = 1; k <= n; ++k) m[static_cast<size_t>(k)] = Rational(k % 2 == 1 ? 1 : -1, k);
    return m;
}

std::vector<Rational> mac_binom(const Rational& r, int n) {
    std::vector<Rational> m(static_cast<size_t>(n) + 1);
    Rational acc(1);
    m[0] = acc;
    for (int k = 1; k <= n; ++k) {
        acc = acc * (r - Rational(k - 1)) * Rational(1, k);
        m[static_cast<size_t>(k)] = acc;
    }
    return m;
}

LSeries ltaylor(const Expr& g, const std::string& v, int known);

LSeries lelementary(ElemFn f, const Expr& arg, const std::string& v, int known) {
    LSeries s = ltaylor(arg, v, known);
    if (!s.is_zero() && s.val < 0)
        throw Error("series", "argument of elementary function has a pole at 0");
    Expr a0 = s.at(0);
    LSeries u = s.is_zero() || s.val > 0 ? s : ladd(s, lconst(num(-1) * a0, s.known));
    switch (f) {
        case ElemFn::Exp: {
            LSeries e = lcompose(mac_exp(known + 1), u);
            return a0.is_zero() ? e : lmul(lconst(fn_app(ElemFn::Exp, a0), known), e);
        }
        case ElemFn::Sin: {
            LSeries su = lcompose(mac_sin(known + 1, false), u);
            if (a0.is_zero()) return su;
            LSeries cu = lcompose(mac_cos(known + 1, false), u);
            return ladd(lmul(lconst(fn_app(ElemFn::Sin, a0), known), cu),
                        lmul(lconst(fn_app(ElemFn::Cos, a0), known), su));
        }
        case ElemFn::Cos: {
            LSeries cu = lcompose(mac_cos(known + 1, false), u);
            if (a0.is_zero()) return cu;
            LSeries su = lcompose(mac_sin(known + 1, false), u);
            return ladd(lmul(lconst(fn_app(ElemFn::Cos, a0), known), cu),
                        lneg(lmul(lconst(fn_app(ElemFn::Sin, a0), known), su)));
        }
        case ElemFn::Sinh: {
            LSeries su = lcompose(mac_sin(known + 1, true), u);
            if (a0.is_zero()) return su;
            LSeries cu = lcompose(mac_cos(known + 1, true), u);
            return ladd(lmul(lconst(fn_app(ElemFn::Sinh, a0), known), cu),
                        lmul(lconst(fn_app(ElemFn::Cosh, a0), known), su));
        }
        case ElemFn::Cosh: {
            LSeries cu = lcompose(mac_cos(known + 1, true), u);
            if (a0.is_zero()) return cu;
            LSeries su = lcompose(mac_sin(known + 1, true), u);
            return ladd(lmul(lconst(fn_app(ElemFn::Cosh, a0), known), cu),
                        lmul(lconst(fn_app(ElemFn::Sinh, a0), known), su));
        }
        case ElemFn::Tan:
            return lmul(lelementary(ElemFn::Sin, arg, v, known),
                        lreciprocal(lelementary(ElemFn::Cos, arg, v, known)));
        case ElemFn::Tanh:
            return lmul(lelementary(ElemFn::Sinh, arg, v, known),
                        lreciprocal(lelementary(ElemFn::Cosh, arg, v, known)));
        case ElemFn::Log: {
            if (s.is_zero() || s.val != 0) throw Error("series", "log has a singularity at 0");
            LSeries w = lmul(u, lconst(num(1) / a0, known));
            LSeries l = lcompose(mac_log1p(known + 1), w);
            Rational r0;
            Expr head = (as_rational_constant(a0, &r0) && r0.is_one()) ? num(0)
                                                                       : fn_app(ElemFn::Log, a0);
            return ladd(lconst(head, known), l);
        }
    }
    throw Error("series", "unknown elementary function");
}

LSeries ltaylor(const Expr& g, const std::string& v, int known) {
    switch (g.kind()) {
        case Kind::Number:
        case Kind::Pi:
        case Kind::Imag: return lconst(g, known);
        case Kind::Var:
            if (g.name() == v) return lvar(known);
            return lconst(g, known);
        case Kind::Sum: {
            LSeries r = lconst(num(0), known);
            for (const Expr& k : g.kids()) r = ladd(r, ltaylor(k, v, known));
            return r;
        }
        case Kind::Product: {
            LSeries r = lconst(num(1), known);
            for (const Expr& k : g.kids()) r = lmul(r, ltaylor(k, v, known));
            return r;
        }
        case Kind::Power: {
            const Rational& ex = g.exponent();
            if (ex.is_integer()) {
                if (!ex.num().fits_ll()) throw Error("series", "exponent too large");
                return lpow_int(ltaylor(g.kids()[0], v, known), ex.num().to_ll());
            }
            if (!contains_var(g, v)) return lconst(g, known);
            LSeries b = ltaylor(g.kids()[0], v, known);
            if (b.is_zero() || b.val != 0)
                throw Error("series",
                            "fractional power of a vanishing argument is not analytic at 0");
            Expr a0 = b.at(0);
            LSeries u = ladd(b, lconst(num(-1) * a0, b.known));
            LSeries w = lmul(u, lconst(num(1) / a0, known));
            LSeries e = lcompose(mac_binom(ex, known + 1), w);
            return lmul(lconst(power(a0, ex), known), e);
        }
        case Kind::Fn:
            if (!contains_var(g.kids()[0], v)) return lconst(g, known);
            return lelementary(g.fn(), g.kids()[0], v, known);
        case Kind::UserFn:
            if (!contains_var(g, v)) return lconst(g, known);
            throw Error("series", "opaque function '" + g.name() + "' has no known series at 0");
    }
    throw Error("series", "unknown node kind");
}

PowerSeries finish(const LSeries& s, int order) {
    if (!s.is_zero() && s.val < 0) throw Error("series", "pole at 0");
    std::vector<Expr> c(static_cast<size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) c[static_cast<size_t>(k)] = s.at(k);
    return PowerSeries(std::move(c));
}

// rewrites sqrt(v) -> u and v -> u^2
Expr sqrt_substitute(const Expr& g, const std::string& v, const Expr& u) {
    if (g.kind() == Kind::Var) return g.name() == v ? power(u, Rational(2)) : g;
    if (g.kind() == Kind::Power && g.kids()[0].kind() == Kind::Var && g.kids()[0].name() == v &&
        !g.exponent().is_integer()) {
        Rational doubled = g.exponent() * Rational(2);
        if (doubled.is_integer()) return power(u, doubled);
    }
    if (g.kids().empty()) return g;
    std::vector<Expr> kids;
    kids.reserve(g.kids().size());
    for (const Expr& k : g.kids()) kids.push_back(sqrt_substitute(k, v, u));
    switch (g.kind()) {
        case Kind::Sum: return sum(std::move(kids));
        case Kind::Product: return product(std::move(kids));
        case Kind::Power: return power(std::move(kids[0]), g.exponent());
        case Kind::Fn: return fn_app(g.fn(), std::move(kids[0]));
        case Kind::UserFn: return user_app(g.name(), g.deriv_order(), std::move(kids));
        default: return g;
    }
}

PowerSeries taylor_impl(const Expr& g, const std::string& v, int order) {
    for (int slack = 4; slack <= 108; slack *= 3) {
        LSeries s = ltaylor(g, v, order + slack);
        if (!s.is_zero() && s.val < 0) throw Error("series", "pole at 0");
        if (s.is_zero() || s.known >= order) return finish(s, order);
    }
    throw Error("series", "series order did not converge (deep cancellation)");
}

} // namespace

PowerSeries taylor(const Expr& g, const std::string& var, int order) {
    return taylor_impl(g, var, order);
}

PowerSeries taylor_sqrt_substituted(const Expr& g, const std::string& var, int order) {
    std::string uname = "_u_" + var;
    Expr rewritten = sqrt_substitute(g, var, cw::var(uname));
    return taylor_impl(rewritten, uname, order);
}

PowerSeries taylor_in_z_allowing_sqrt(const Expr& g, const std::string& var, int order) {
    PowerSeries u = taylor_sqrt_substituted(g, var, 2 * order);
    for (int k = 1; k <= 2 * order; k += 2) {
        if (!u.coeff(k).is_zero())
            throw Error("series", "function is not analytic in " + var + " (odd term present)");
    }
    std::vector<Expr> c(static_cast<size_t>(order) + 1);
    for (int j = 0; j <= order; ++j) c[static_cast<size_t>(j)] = u.coeff(2 * j);
    return PowerSeries(std::move(c));
}

std::vector<Expr> transform_series(const PowerSeries& g, ClassType type, FieldTag field,
                                   int order) {
    if (field == FieldTag::Complex) {
        if (type == ClassType::Pfaffian)
            throw Error("series", "Pfaffian classes require a real vector bundle");
        return g.truncated(order).coeffs();
    }
    switch (type) {
        case ClassType::Multiplicative:
            if (!g.coeff(0).is_one())
                throw Error("series",
                            "real multiplicative class requires g(0) = 1 (branch with f(0)=1)");
            return g.stretch2(order).sqrt_unit().coeffs();
        case ClassType::Additive:
            if (!g.coeff(0).is_zero())
                throw Error("series", "real additive class requires g(0) = 0");
            return g.stretch2(order).scaled(num(1, 2)).coeffs();
        case ClassType::Pfaffian:
            return g.truncated(order).odd_part().coeffs();
    }
    throw Error("series", "unknown class type");
}

} // namespace cw
