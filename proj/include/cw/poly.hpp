#pragma once

#include "cw/expr.hpp"
#include "cw/num.hpp"

#include <map>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

namespace cw {

using AtomId = uint32_t;

/// Global registry of transcendental atoms (variables, pi, function kernels,
/// fractional powers). Append-only; shared-lock reads, so polynomials can be
/// combined freely across threads.
class AtomTable {
public:
    static AtomTable& instance();

    AtomId intern(const Expr& kernel);
    Expr expr(AtomId id) const;
    /// Cross-process-stable sort key used at rendering time.
    const std::string& render_key(AtomId id) const;

private:
    AtomTable() = default;
    mutable std::shared_mutex mu_;
    std::unordered_map<Expr, AtomId> ids_;
    std::vector<Expr> exprs_;
    std::vector<std::string> keys_;
};

/// Product of atom powers; factors sorted by atom id, exponents >= 1.
struct Monomial {
    std::vector<std::pair<AtomId, uint32_t>> f;

    bool is_one() const { return f.empty(); }
    uint32_t total_degree() const;
    uint32_t exp_of(AtomId a) const;
    size_t hash() const;

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.f == b.f; }
    /// deglex over atom ids; total order compatible with multiplication
    static int cmp(const Monomial& a, const Monomial& b);
    static Monomial mul(const Monomial& a, const Monomial& b);
    static std::optional<Monomial> div(const Monomial& a, const Monomial& b);
};

struct MonomialHash {
    size_t operator()(const Monomial& m) const { return m.hash(); }
};

/// Sparse multivariate polynomial over Q(i) in registered atoms.
/// Terms sorted descending by Monomial::cmp; no zero coefficients.
class Poly {
public:
    std::vector<std::pair<Monomial, GaussRational>> terms;

    static Poly zero() { return {}; }
    static Poly one() { return constant(GaussRational(1)); }
    static Poly constant(GaussRational c);
    static Poly atom(AtomId a, uint32_t exp = 1);

    bool is_zero() const { return terms.empty(); }
    bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].first.is_one()); }
    GaussRational constant_value() const;
    const GaussRational& lead_coeff() const { return terms.front().second; }
    const Monomial& lead_mon() const { return terms.front().first; }

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly operator-() const;
    Poly scaled(const GaussRational& c) const;
    Poly pow(uint32_t e) const;

    /// Exact polynomial division; nullopt if the division has a remainder.
    std::optional<Poly> div_exact(const Poly& d) const;

    /// GCD, normalized to primitive Gaussian-integer coefficients with a
    /// canonical leading unit.
    static Poly gcd(const Poly& a, const Poly& b);

    /// Evaluation with every atom bound.
    GaussRational eval(const std::map<AtomId, GaussRational>& values) const;

    /// Formal partial derivative with respect to an atom.
    Poly derivative_wrt(AtomId a) const;

    uint32_t degree_in(AtomId a) const;
    std::vector<AtomId> atoms() const;
    bool contains_atom(AtomId a) const;

    /// Replaces a^2 by `sq` throughout (used by the optional trig rewrites).
    Poly subst_square(AtomId a, const Poly& sq) const;

    /// Rational content (positive): P / content has coprime Gaussian-integer
    /// coefficients. Zero polynomial has content 1.
    Rational rational_content() const;
    /// Divides out rational content and normalizes the leading unit to the
    /// canonical one among {1,-1,i,-i}. Returns the applied scalar factor.
    Poly primitive_normalized(GaussRational* applied = nullptr) const;

    size_t hash() const;
    friend bool operator==(const Poly& a, const Poly& b) { return a.terms == b.terms; }

    static Poly from_sorted(std::vector<std::pair<Monomial, GaussRational>> t);
};

/// Reduced rational function num/den over the atom polynomial ring.
/// Invariants: gcd(num, den) constant; den has leading coefficient 1;
/// zero is {0, 1}.
struct RatFn {
    Poly num;
    Poly den;

    static RatFn zero() { return {Poly::zero(), Poly::one()}; }
    static RatFn from_poly(Poly p) { return {std::move(p), Poly::one()}; }
    static RatFn constant(GaussRational c) { return from_poly(Poly::constant(std::move(c))); }
    /// Throws ZeroDivisionError if d is the zero polynomial.
    static RatFn make(Poly n, Poly d);

    bool is_zero() const { return num.is_zero(); }
    bool is_constant() const { return num.is_constant() && den.is_constant(); }

    friend RatFn operator+(const RatFn& a, const RatFn& b);
    friend RatFn operator-(const RatFn& a, const RatFn& b);
    friend RatFn operator*(const RatFn& a, const RatFn& b);
    friend RatFn operator/(const RatFn& a, const RatFn& b);
    RatFn operator-() const;
    RatFn inverse() const;
    RatFn pow_int(long long e) const;

    friend bool operator==(const RatFn& a, const RatFn& b) {
        return a.num == b.num && a.den == b.den;
    }
};

} // namespace cw
