#include "cw/poly.hpp"
#include "cw/error.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>

namespace cw {

// ---------------------------------------------------------------- AtomTable

AtomTable& AtomTable::instance() {
    static AtomTable t;
    return t;
}

static std::string atom_render_key(const Expr& kernel) {
    char cls;
    switch (kernel.kind()) {
        case Kind::Var: cls = '0'; break;
        case Kind::Pi: cls = '1'; break;
        case Kind::Fn: cls = '2'; break;
        case Kind::Power: cls = '3'; break;
        case Kind::UserFn: cls = '4'; break;
        default: cls = '5'; break;
    }
    return std::string(1, cls) + to_text(kernel);
}

AtomId AtomTable::intern(const Expr& kernel) {
    {
        std::shared_lock lock(mu_);
        auto it = ids_.find(kernel);
        if (it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mu_);
    auto it = ids_.find(kernel);
    if (it != ids_.end()) return it->second;
    AtomId id = static_cast<AtomId>(exprs_.size());
    exprs_.push_back(kernel);
    keys_.push_back(atom_render_key(kernel));
    ids_.emplace(kernel, id);
    return id;
}

Expr AtomTable::expr(AtomId id) const {
    std::shared_lock lock(mu_);
    return exprs_.at(id);
}

const std::string& AtomTable::render_key(AtomId id) const {
    std::shared_lock lock(mu_);
    return keys_.at(id);
}

// ---------------------------------------------------------------- Monomial

uint32_t Monomial::total_degree() const {
    uint32_t d = 0;
    for (auto& [a, e] : f) d += e;
    return d;
}

uint32_t Monomial::exp_of(AtomId a) const {
    for (auto& [id, e] : f)
        if (id == a) return e;
    return 0;
}

size_t Monomial::hash() const {
    size_t h = 0x243f6a8885a308d3ULL;
    for (auto& [a, e] : f) {
        h = hash_combine(h, a);
        h = hash_combine(h, e);
    }
    return h;
}

int Monomial::cmp(const Monomial& a, const Monomial& b) {
    uint32_t da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db ? -1 : 1;
    // lex with smaller atom ids more significant
    size_t i = 0, j = 0;
    while (i < a.f.size() && j < b.f.size()) {
        if (a.f[i].first != b.f[j].first) {
            // the one having a power of the smaller atom is larger
            return a.f[i].first < b.f[j].first ? 1 : -1;
        }
        if (a.f[i].second != b.f[j].second) return a.f[i].second < b.f[j].second ? -1 : 1;
        ++i;
        ++j;
    }
    if (i < a.f.size()) return 1;
    if (j < b.f.size()) return -1;
    return 0;
}

Monomial Monomial::mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.f.reserve(a.f.size() + b.f.size());
    size_t i = 0, j = 0;
    while (i < a.f.size() && j < b.f.size()) {
        if (a.f[i].first == b.f[j].first) {
            r.f.emplace_back(a.f[i].first, a.f[i].second + b.f[j].second);
            ++i;
            ++j;
        } else if (a.f[i].first < b.f[j].first) {
            r.f.push_back(a.f[i++]);
        } else {
            r.f.push_back(b.f[j++]);
        }
    }
    while (i < a.f.size()) r.f.push_back(a.f[i++]);
    while (j < b.f.size()) r.f.push_back(b.f[j++]);
    return r;
}

std::optional<Monomial> Monomial::div(const Monomial& a, const Monomial& b) {
    Monomial r;
    size_t i = 0;
    for (auto& [id, e] : b.f) {
        while (i < a.f.size() && a.f[i].first < id) r.f.push_back(a.f[i++]);
        if (i >= a.f.size() || a.f[i].first != id || a.f[i].second < e) return std::nullopt;
        if (a.f[i].second > e) r.f.emplace_back(id, a.f[i].second - e);
        ++i;
    }
    while (i < a.f.size()) r.f.push_back(a.f[i++]);
    return r;
}

// ---------------------------------------------------------------- Poly

Poly Poly::constant(GaussRational c) {
    Poly p;
    if (!c.is_zero()) p.terms.emplace_back(Monomial{}, std::move(c));
    return p;
}

Poly Poly::atom(AtomId a, uint32_t exp) {
    if (exp == 0) return one();
    Poly p;
    Monomial m;
    m.f.emplace_back(a, exp);
    p.terms.emplace_back(std::move(m), GaussRational(1));
    return p;
}

GaussRational Poly::constant_value() const {
    if (terms.empty()) return GaussRational(0);
    assert(is_constant());
    return terms[0].second;
}

Poly Poly::from_sorted(std::vector<std::pair<Monomial, GaussRational>> t) {
    Poly p;
    p.terms = std::move(t);
    return p;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.terms.reserve(a.terms.size() + b.terms.size());
    size_t i = 0, j = 0;
    while (i < a.terms.size() && j < b.terms.size()) {
        int c = Monomial::cmp(a.terms[i].first, b.terms[j].first);
        if (c > 0) {
            r.terms.push_back(a.terms[i++]);
        } else if (c < 0) {
            r.terms.push_back(b.terms[j++]);
        } else {
            GaussRational s = a.terms[i].second + b.terms[j].second;
            if (!s.is_zero()) r.terms.emplace_back(a.terms[i].first, std::move(s));
            ++i;
            ++j;
        }
    }
    while (i < a.terms.size()) r.terms.push_back(a.terms[i++]);
    while (j < b.terms.size()) r.terms.push_back(b.terms[j++]);
    return r;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly Poly::scaled(const GaussRational& c) const {
    if (c.is_zero()) return zero();
    Poly r = *this;
    for (auto& [m, cc] : r.terms) cc = cc * c;
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly::zero();
    if (a.is_constant()) return b.scaled(a.constant_value());
    if (b.is_constant()) return a.scaled(b.constant_value());
    std::unordered_map<Monomial, GaussRational, MonomialHash> acc;
    acc.reserve(a.terms.size() * b.terms.size());
    for (auto& [ma, ca] : a.terms) {
        for (auto& [mb, cb] : b.terms) {
            Monomial m = Monomial::mul(ma, mb);
            auto [it, fresh] = acc.try_emplace(std::move(m), GaussRational(0));
            it->second += ca * cb;
        }
    }
    std::vector<std::pair<Monomial, GaussRational>> t;
    t.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (!c.is_zero()) t.emplace_back(m, std::move(c));
    std::sort(t.begin(), t.end(),
              [](const auto& x, const auto& y) { return Monomial::cmp(x.first, y.first) > 0; });
    return Poly::from_sorted(std::move(t));
}

Poly Poly::pow(uint32_t e) const {
    Poly r = one(), base = *this;
    while (e) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

std::optional<Poly> Poly::div_exact(const Poly& d) const {
    if (d.is_zero()) return std::nullopt;
    if (is_zero()) return zero();
    if (d.is_constant()) return scaled(d.constant_value().inverse());
    Poly q, r = *this;
    while (!r.is_zero()) {
        auto m = Monomial::div(r.lead_mon(), d.lead_mon());
        if (!m) return std::nullopt;
        GaussRational c = r.lead_coeff() * d.lead_coeff().inverse();
        Poly t;
        t.terms.emplace_back(std::move(*m), std::move(c));
        q = q + t;
        r = r - t * d;
    }
    return q;
}

uint32_t Poly::degree_in(AtomId a) const {
    uint32_t d = 0;
    for (auto& [m, c] : terms) d = std::max(d, m.exp_of(a));
    return d;
}

std::vector<AtomId> Poly::atoms() const {
    std::vector<AtomId> out;
    for (auto& [m, c] : terms)
        for (auto& [a, e] : m.f)
            if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    std::sort(out.begin(), out.end());
    return out;
}

bool Poly::contains_atom(AtomId a) const {
    for (auto& [m, c] : terms)
        if (m.exp_of(a) > 0) return true;
    return false;
}

Poly Poly::subst_square(AtomId a, const Poly& sq) const {
    Poly out;
    for (auto& [m, c] : terms) {
        uint32_t e = m.exp_of(a);
        if (e < 2) {
            Poly t;
            t.terms.emplace_back(m, c);
            out = out + t;
            continue;
        }
        Monomial rest;
        for (auto& [id, ee] : m.f)
            if (id != a) rest.f.emplace_back(id, ee);
        if (e % 2) rest = Monomial::mul(rest, Monomial{{{a, 1}}});
        Poly t;
        t.terms.emplace_back(std::move(rest), c);
        out = out + t * sq.pow(e / 2);
    }
    return out;
}

Rational Poly::rational_content() const {
    if (is_zero()) return Rational(1);
    BigInt l(1);
    for (auto& [m, c] : terms) {
        l = BigInt::lcm(l, c.re().den());
        l = BigInt::lcm(l, c.im().den());
    }
    BigInt g(0);
    Rational lr{l};
    for (auto& [m, c] : terms) {
        g = BigInt::gcd(g, (c.re() * lr).num());
        g = BigInt::gcd(g, (c.im() * lr).num());
    }
    if (g.is_zero()) g = BigInt(1);
    return Rational(g, l);
}

Poly Poly::primitive_normalized(GaussRational* applied) const {
    if (is_zero()) {
        if (applied) *applied = GaussRational(1);
        return zero();
    }
    Rational content = rational_content();
    GaussRational scale{content.inverse()};
    // choose the unit in {1,-1,i,-i} making the leading coefficient canonical:
    // positive real part, or zero real part with positive imaginary part
    GaussRational lead = lead_coeff() * scale;
    GaussRational unit(1);
    if (lead.re().is_zero()) {
        unit = lead.im().is_neg() ? GaussRational(Rational(0), Rational(-1))
                                  : GaussRational(Rational(0), Rational(1));
        unit = unit.inverse();
        // lead*unit should be positive real or canonical; simpler below
    }
    // pick the rotation directly
    auto canonical = [](const GaussRational& v) {
        return v.re().sign() > 0 || (v.re().is_zero() && v.im().sign() > 0);
    };
    static const GaussRational units[4] = {
        GaussRational(1), GaussRational(-1),
        GaussRational(Rational(0), Rational(1)), GaussRational(Rational(0), Rational(-1))};
    for (const auto& u : units) {
        if (canonical(lead * u)) {
            unit = u;
            break;
        }
    }
    GaussRational total = scale * unit;
    if (applied) *applied = total;
    return scaled(total);
}

size_t Poly::hash() const {
    size_t h = 0x452821e638d01377ULL;
    for (auto& [m, c] : terms) {
        h = hash_combine(h, m.hash());
        h = hash_combine(h, c.hash());
    }
    return h;
}

Poly Poly::derivative_wrt(AtomId a) const {
    Poly out;
    for (auto& [m, c] : terms) {
        uint32_t e = m.exp_of(a);
        if (e == 0) continue;
        Monomial rest;
        for (auto& [id, ee] : m.f) {
            if (id == a) {
                if (ee > 1) rest.f.emplace_back(id, ee - 1);
            } else {
                rest.f.emplace_back(id, ee);
            }
        }
        Poly t;
        t.terms.emplace_back(std::move(rest), c * GaussRational(Rational(static_cast<long long>(e))));
        out = out + t;
    }
    return out;
}

GaussRational Poly::eval(const std::map<AtomId, GaussRational>& values) const {
    GaussRational acc(0);
    for (auto& [m, c] : terms) {
        GaussRational t = c;
        for (auto& [a, e] : m.f) {
            auto it = values.find(a);
            if (it == values.end()) throw Error("poly", "unbound atom in evaluation");
            t = t * it->second.pow(e);
        }
        acc = acc + t;
    }
    return acc;
}

// ------------------------------------------------------------ multivariate gcd

namespace {

// coefficient vector in the main atom x (dense in x, index = power)
std::vector<Poly> coeffs_in(const Poly& p, AtomId x) {
    std::vector<Poly> out(p.degree_in(x) + 1);
    for (auto& [m, c] : p.terms) {
        uint32_t e = m.exp_of(x);
        Monomial rest;
        for (auto& [id, ee] : m.f)
            if (id != x) rest.f.emplace_back(id, ee);
        Poly t;
        t.terms.emplace_back(std::move(rest), c);
        out[e] = out[e] + t;
    }
    return out;
}

Poly from_coeffs(const std::vector<Poly>& cs, AtomId x) {
    Poly out;
    for (size_t e = 0; e < cs.size(); ++e) {
        if (cs[e].is_zero()) continue;
        out = out + cs[e] * Poly::atom(x, static_cast<uint32_t>(e));
    }
    return out;
}

int deg_of(const std::vector<Poly>& c) {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        if (!c[i].is_zero()) return i;
    return -1;
}

// associate of the pseudo-remainder of u by v in x (deg u >= deg v >= 1)
Poly pseudo_rem(const Poly& u, const Poly& v, AtomId x) {
    std::vector<Poly> r = coeffs_in(u, x);
    std::vector<Poly> b = coeffs_in(v, x);
    int n = deg_of(b);
    Poly lc = b[n];
    int dr = deg_of(r);
    while (dr >= n) {
        Poly t = r[dr];
        for (int i = 0; i <= dr; ++i) r[i] = lc * r[i];
        for (int j = 0; j <= n; ++j) r[dr - n + j] = r[dr - n + j] - t * b[j];
        // drop rational content each step to keep coefficients small
        int nd = dr - 1;
        while (nd >= 0 && r[nd].is_zero()) --nd;
        if (nd < 0) return Poly::zero();
        Poly whole = from_coeffs(std::vector<Poly>(r.begin(), r.begin() + nd + 1), x);
        whole = whole.primitive_normalized();
        r = coeffs_in(whole, x);
        dr = deg_of(r);
    }
    return from_coeffs(r, x);
}

// gcd of all x-coefficients (the content of p wrt x)
Poly content_wrt(const Poly& p, AtomId x) {
    std::vector<Poly> cs = coeffs_in(p, x);
    Poly g = Poly::zero();
    for (auto& c : cs) {
        if (c.is_zero()) continue;
        g = Poly::gcd(g, c);
        if (g.is_constant()) break;
    }
    return g.is_zero() ? Poly::one() : g;
}

// common monomial factor of all terms
Monomial monomial_content(const Poly& p) {
    Monomial m = p.terms.front().first;
    for (auto& [mm, c] : p.terms) {
        Monomial next;
        size_t i = 0;
        for (auto& [id, e] : m.f) {
            uint32_t o = mm.exp_of(id);
            if (o > 0) next.f.emplace_back(id, std::min(e, o));
            (void)i;
        }
        m = std::move(next);
        if (m.is_one()) break;
    }
    return m;
}

Poly shift_out_monomial(const Poly& p, const Monomial& m) {
    if (m.is_one()) return p;
    Poly out;
    out.terms.reserve(p.terms.size());
    for (auto& [mm, c] : p.terms) out.terms.emplace_back(*Monomial::div(mm, m), c);
    return out;
}

// ---------------------------------------------------- coprimality certificate

// modular arithmetic over GF(p) with p = 1 mod 4 so that i has a square root
struct ModField {
    uint64_t p;
    uint64_t i_root; // i_root^2 = p - 1 (mod p)
};

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) {
    uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

uint64_t invmod(uint64_t a, uint64_t p) { return powmod(a, p - 2, p); }

const std::vector<ModField>& mod_fields() {
    static const std::vector<ModField> fields = [] {
        std::vector<ModField> out;
        auto is_prime = [](uint64_t n) {
            if (n < 2) return false;
            for (uint64_t d : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
                if (n % d == 0) return n == d;
            }
            uint64_t r = 0, d = n - 1;
            while (d % 2 == 0) d /= 2, ++r;
            for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
                uint64_t x = powmod(a, d, n);
                if (x == 1 || x == n - 1) continue;
                bool composite = true;
                for (uint64_t i = 1; i < r; ++i) {
                    x = mulmod(x, x, n);
                    if (x == n - 1) {
                        composite = false;
                        break;
                    }
                }
                if (composite) return false;
            }
            return true;
        };
        uint64_t candidate = (1ull << 31) - 3;
        while (out.size() < 6 && candidate > (1ull << 30)) {
            if (candidate % 4 == 1 && is_prime(candidate)) {
                // square root of -1 from a quadratic non-residue
                uint64_t s = 0;
                for (uint64_t a = 2; a < 100; ++a) {
                    if (powmod(a, (candidate - 1) / 2, candidate) == candidate - 1) {
                        s = powmod(a, (candidate - 1) / 4, candidate);
                        break;
                    }
                }
                if (s) out.push_back({candidate, s});
            }
            candidate -= 2;
        }
        return out;
    }();
    return fields;
}

// reduction of a Gaussian rational mod p; false when a denominator vanishes
bool mod_of(const GaussRational& g, const ModField& f, uint64_t& out) {
    auto part = [&](const Rational& r, uint64_t& v) {
        BigInt q, rem;
        BigInt::divmod(r.num(), BigInt(static_cast<long long>(f.p)), q, rem);
        long long n = rem.to_ll();
        uint64_t nn = n >= 0 ? static_cast<uint64_t>(n) : f.p - static_cast<uint64_t>(-n);
        BigInt::divmod(r.den(), BigInt(static_cast<long long>(f.p)), q, rem);
        long long d = rem.to_ll();
        if (d == 0) return false;
        uint64_t dd = d >= 0 ? static_cast<uint64_t>(d) : f.p - static_cast<uint64_t>(-d);
        v = mulmod(nn % f.p, invmod(dd, f.p), f.p);
        return true;
    };
    uint64_t re = 0, im = 0;
    if (!part(g.re(), re) || !part(g.im(), im)) return false;
    out = (re + mulmod(im, f.i_root, f.p)) % f.p;
    return true;
}

// evaluates p at integer atom values mod the field; false on bad reduction
bool eval_mod(const Poly& poly, const std::map<AtomId, uint64_t>& pt, const ModField& f,
              uint64_t& out) {
    uint64_t acc = 0;
    for (auto& [m, c] : poly.terms) {
        uint64_t t;
        if (!mod_of(c, f, t)) return false;
        for (auto& [a, e] : m.f) t = mulmod(t, powmod(pt.at(a), e, f.p), f.p);
        acc = (acc + t) % f.p;
    }
    out = acc;
    return true;
}

int uni_gcd_degree_mod(std::vector<uint64_t> a, std::vector<uint64_t> b, const ModField& f) {
    auto deg = [](const std::vector<uint64_t>& v) {
        for (size_t i = v.size(); i-- > 0;)
            if (v[i]) return static_cast<int>(i);
        return -1;
    };
    int da = deg(a), db = deg(b);
    while (db >= 0) {
        uint64_t lead = invmod(b[static_cast<size_t>(db)], f.p);
        while (da >= db) {
            uint64_t factor = mulmod(a[static_cast<size_t>(da)], lead, f.p);
            if (factor) {
                for (int i = 0; i <= db; ++i) {
                    size_t ai = static_cast<size_t>(da - db + i);
                    uint64_t sub = mulmod(factor, b[static_cast<size_t>(i)], f.p);
                    a[ai] = (a[ai] + f.p - sub) % f.p;
                }
            }
            a[static_cast<size_t>(da)] = 0;
            da = deg(a);
        }
        std::swap(a, b);
        std::swap(da, db);
    }
    return da;
}

// Sound one-variable certificate: evaluates every atom but x at a point
// where the leading x-coefficient of one input survives mod p, and returns
// the degree of the univariate image gcd over GF(p) (an upper bound for
// deg_x gcd(A,B); a nonzero value mod p is nonzero exactly); -1 when no
// valid (point, prime) combination was found.
int image_gcd_degree(const Poly& A, const Poly& B, AtomId x, const std::vector<AtomId>& others) {
    std::vector<Poly> ca = coeffs_in(A, x);
    std::vector<Poly> cb = coeffs_in(B, x);
    const Poly& lcA = ca.back();
    const Poly& lcB = cb.back();
    uint64_t state = 0x9e3779b97f4a7c15ULL ^ (static_cast<uint64_t>(x) << 32) ^ others.size();
    const auto& fields = mod_fields();
    for (int attempt = 0; attempt < 24; ++attempt) {
        const ModField& f = fields[static_cast<size_t>(attempt) % fields.size()];
        std::map<AtomId, uint64_t> pt;
        for (AtomId a : others) {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            pt[a] = ((state >> 33) % 211) + 2;
        }
        uint64_t la = 0, lb = 0;
        if (!eval_mod(lcA, pt, f, la) || !eval_mod(lcB, pt, f, lb)) continue;
        if (la == 0 && lb == 0) continue;
        std::vector<uint64_t> ua(ca.size()), ub(cb.size());
        bool ok = true;
        for (size_t i = 0; i < ca.size() && ok; ++i) ok = eval_mod(ca[i], pt, f, ua[i]);
        for (size_t i = 0; i < cb.size() && ok; ++i) ok = eval_mod(cb[i], pt, f, ub[i]);
        if (!ok) continue;
        return uni_gcd_degree_mod(std::move(ua), std::move(ub), f);
    }
    return -1;
}

// ---------------------------------------------------- denominator hint basis

// Pairwise-coprime basis of polynomials the engine has divided by. Dividing
// hinted factors out of gcd inputs removes the expensive structured cases
// (metric determinant powers and the like) before any remainder sequence
// runs. Purely an accelerator: every use is verified by exact division.
struct HintBasis {
    std::shared_mutex mu;
    std::shared_ptr<const std::vector<Poly>> snapshot =
        std::make_shared<const std::vector<Poly>>();

    std::shared_ptr<const std::vector<Poly>> get() {
        std::shared_lock lock(mu);
        return snapshot;
    }

    void insert(const Poly& candidate);
};

HintBasis& hint_basis() {
    static HintBasis h;
    return h;
}

bool hint_worthy(const Poly& p) {
    if (p.is_zero() || p.is_constant()) return false;
    if (p.terms.size() > 256) return false;
    if (p.terms.size() == 1) return false; // monomials are handled separately
    return true;
}

} // namespace

namespace {

Poly gcd_impl(Poly A, Poly B, bool use_hints) {
    if (A.is_zero()) return B.primitive_normalized();
    if (B.is_zero()) return A.primitive_normalized();
    if (A.is_constant() || B.is_constant()) return Poly::one();

    Monomial ma = monomial_content(A);
    Monomial mb = monomial_content(B);
    Monomial mg;
    for (auto& [id, e] : ma.f) {
        uint32_t o = mb.exp_of(id);
        if (o > 0) mg.f.emplace_back(id, std::min(e, o));
    }
    A = shift_out_monomial(A, ma);
    B = shift_out_monomial(B, mb);

    Poly accumulated = Poly::one();
    if (!mg.is_one()) {
        Poly m;
        m.terms.emplace_back(mg, GaussRational(1));
        accumulated = std::move(m);
    }

    // structured common factors divide out cheaply
    if (use_hints && !A.is_constant() && !B.is_constant()) {
        auto hints = hint_basis().get();
        for (const Poly& h : *hints) {
            while (true) {
                auto qa = A.div_exact(h);
                if (!qa) break;
                auto qb = B.div_exact(h);
                if (!qb) break;
                A = std::move(*qa);
                B = std::move(*qb);
                accumulated = accumulated * h;
            }
        }
    }

    Poly result;
    bool resolved = false;
    if (A.is_constant() || B.is_constant()) {
        result = Poly::one();
        resolved = true;
    } else if (A == B) {
        result = A;
        resolved = true;
    } else if (auto q = A.div_exact(B)) {
        (void)q;
        result = B;
        resolved = true;
    } else if (auto q2 = B.div_exact(A)) {
        (void)q2;
        result = A;
        resolved = true;
    }

    std::vector<AtomId> common;
    if (!resolved) {
        std::vector<AtomId> aa = A.atoms(), bb = B.atoms();
        for (AtomId id : aa)
            if (std::find(bb.begin(), bb.end(), id) != bb.end()) common.push_back(id);
        if (common.empty()) {
            result = Poly::one();
            resolved = true;
        }
    }

    if (!resolved) {
        // sound coprimality certificate per variable
        std::vector<AtomId> all = A.atoms();
        for (AtomId id : B.atoms())
            if (std::find(all.begin(), all.end(), id) == all.end()) all.push_back(id);
        bool coprime = true;
        for (AtomId x : common) {
            std::vector<AtomId> others;
            for (AtomId id : all)
                if (id != x) others.push_back(id);
            int d = image_gcd_degree(A, B, x, others);
            if (d != 0) {
                coprime = false;
                break;
            }
        }
        if (coprime) {
            result = Poly::one();
            resolved = true;
        }
    }

    if (!resolved) {
        // primitive PRS on the residual parts
        AtomId x = common.front();
        uint32_t best = 0;
        bool first = true;
        for (AtomId id : common) {
            uint32_t d = std::min(A.degree_in(id), B.degree_in(id));
            if (first || d < best) {
                first = false;
                best = d;
                x = id;
            }
        }
        Poly contA = content_wrt(A, x);
        Poly contB = content_wrt(B, x);
        Poly ppA = *A.div_exact(contA);
        Poly ppB = *B.div_exact(contB);
        Poly cg = Poly::gcd(contA, contB);
        Poly u = ppA, v = ppB;
        if (u.degree_in(x) < v.degree_in(x)) std::swap(u, v);
        Poly g;
        while (true) {
            if (v.is_zero()) {
                g = u;
                break;
            }
            if (v.degree_in(x) == 0) {
                g = Poly::one();
                break;
            }
            Poly r = pseudo_rem(u, v, x);
            if (!r.is_zero()) {
                Poly c = content_wrt(r, x);
                r = *r.div_exact(c);
            }
            u = std::move(v);
            v = std::move(r);
        }
        if (!g.is_constant()) {
            Poly c = content_wrt(g, x);
            g = *g.div_exact(c);
        }
        result = cg * g;
    }

    return (accumulated * result).primitive_normalized();
}

void HintBasis::insert(const Poly& candidate) {
    Poly c = shift_out_monomial(candidate, monomial_content(candidate)).primitive_normalized();
    // divide out everything the basis already covers
    {
        auto snap = get();
        for (const Poly& h : *snap) {
            while (true) {
                auto q = c.div_exact(h);
                if (!q) break;
                c = std::move(*q);
            }
        }
    }
    if (!hint_worthy(c)) return;

    // refine to keep the basis pairwise coprime (worklist, outside any lock)
    std::vector<Poly> base = *get();
    if (base.size() >= 64) return;
    std::vector<Poly> queue = {c.primitive_normalized()};
    int guard = 0;
    while (!queue.empty() && ++guard < 128) {
        Poly q = std::move(queue.back());
        queue.pop_back();
        q = shift_out_monomial(q, monomial_content(q));
        if (q.is_constant() || q.terms.size() == 1) continue;

        // split off repeated factors through derivative gcds so the basis
        // holds factor bases rather than powers
        bool split = false;
        for (AtomId x : q.atoms()) {
            Poly d = q.derivative_wrt(x);
            if (d.is_zero()) continue;
            Poly g = gcd_impl(q, d, false);
            if (g.is_constant() || g.terms.size() >= q.terms.size()) continue;
            auto rest = q.div_exact(g);
            if (!rest) continue;
            queue.push_back(g.primitive_normalized());
            queue.push_back(rest->primitive_normalized());
            split = true;
            break;
        }
        if (split) continue;

        bool restart = false;
        for (size_t i = 0; i < base.size() && !restart; ++i) {
            Poly g = gcd_impl(q, base[i], false);
            if (g.is_constant()) continue;
            if (!(g == base[i])) {
                // split the basis element
                Poly rest = *base[i].div_exact(g);
                base.erase(base.begin() + static_cast<long>(i));
                if (hint_worthy(g) || g.terms.size() == 1) base.push_back(g.primitive_normalized());
                if (!rest.is_constant()) queue.push_back(rest.primitive_normalized());
                queue.push_back(q);
                restart = true;
                break;
            }
            auto qq = q.div_exact(g);
            q = std::move(*qq);
            if (q.is_constant()) break;
        }
        if (restart) continue;
        if (!q.is_constant() && q.terms.size() > 1) base.push_back(q.primitive_normalized());
    }

    std::unique_lock lock(mu);
    snapshot = std::make_shared<const std::vector<Poly>>(std::move(base));
}

void register_denominator_hint(const Poly& p) {
    if (p.is_zero() || p.is_constant() || p.terms.size() == 1) return;
    hint_basis().insert(p);
}

} // namespace

Poly Poly::gcd(const Poly& a, const Poly& b) { return gcd_impl(a, b, true); }

// ---------------------------------------------------------------- RatFn

RatFn RatFn::make(Poly n, Poly d) {
    if (d.is_zero()) throw ZeroDivisionError("division by a canonically zero expression");
    if (n.is_zero()) return zero();
    Poly g = Poly::gcd(n, d);
    if (!g.is_constant()) {
        n = *n.div_exact(g);
        d = *d.div_exact(g);
    }
    GaussRational lc = d.lead_coeff();
    if (!lc.is_one()) {
        GaussRational inv = lc.inverse();
        n = n.scaled(inv);
        d = d.scaled(inv);
    }
    return {std::move(n), std::move(d)};
}

RatFn operator+(const RatFn& a, const RatFn& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den == b.den) return RatFn::make(a.num + b.num, a.den);
    Poly g = Poly::gcd(a.den, b.den);
    if (g.is_constant()) {
        return RatFn::make(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    Poly da = *a.den.div_exact(g);
    Poly db = *b.den.div_exact(g);
    return RatFn::make(a.num * db + b.num * da, a.den * db);
}

RatFn RatFn::operator-() const { return {-num, den}; }

RatFn operator-(const RatFn& a, const RatFn& b) { return a + (-b); }

RatFn operator*(const RatFn& a, const RatFn& b) {
    if (a.is_zero() || b.is_zero()) return RatFn::zero();
    // cross-reduce before the big multiply
    Poly g1 = Poly::gcd(a.num, b.den);
    Poly g2 = Poly::gcd(b.num, a.den);
    Poly n1 = g1.is_constant() ? a.num : *a.num.div_exact(g1);
    Poly d2 = g1.is_constant() ? b.den : *b.den.div_exact(g1);
    Poly n2 = g2.is_constant() ? b.num : *b.num.div_exact(g2);
    Poly d1 = g2.is_constant() ? a.den : *a.den.div_exact(g2);
    Poly n = n1 * n2;
    Poly d = d1 * d2;
    GaussRational lc = d.is_zero() ? GaussRational(1) : d.lead_coeff();
    if (!lc.is_one()) {
        GaussRational inv = lc.inverse();
        n = n.scaled(inv);
        d = d.scaled(inv);
    }
    return {std::move(n), std::move(d)};
}

RatFn RatFn::inverse() const {
    if (is_zero()) throw ZeroDivisionError("division by a canonically zero expression");
    register_denominator_hint(num);
    return make(den, num);
}

RatFn operator/(const RatFn& a, const RatFn& b) { return a * b.inverse(); }

RatFn RatFn::pow_int(long long e) const {
    if (e == 0) return from_poly(Poly::one());
    if (e < 0) return inverse().pow_int(-e);
    RatFn r = {num.pow(static_cast<uint32_t>(e)), den.pow(static_cast<uint32_t>(e))};
    return r;
}

} // namespace cw
