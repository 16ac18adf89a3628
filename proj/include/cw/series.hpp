#pragma once

#include "cw/expr.hpp"

#include <string>
#include <vector>

namespace cw {

/// Truncated formal power series: coefficients c0..cK as canonical constant
/// expressions; exact rationals whenever the source function has rational
/// Taylor coefficients.
class PowerSeries {
public:
    PowerSeries() = default;
    explicit PowerSeries(std::vector<Expr> coeffs);
    static PowerSeries zero(int order);
    static PowerSeries one(int order);
    /// the series "z"
    static PowerSeries variable(int order);

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const Expr& coeff(int k) const { return c_.at(static_cast<size_t>(k)); }
    const std::vector<Expr>& coeffs() const { return c_; }
    /// Throws if coefficient k is not an exact rational constant.
    Rational rational_coeff(int k) const;

    friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
    friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b);
    friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
    PowerSeries scaled(const Expr& s) const;

    /// g(h) for h with h(0) = 0.
    static PowerSeries compose(const PowerSeries& g, const PowerSeries& h);
    /// 1/this; constant term must be nonzero.
    PowerSeries reciprocal() const;
    /// Square root with unit constant term (c0 == 1).
    PowerSeries sqrt_unit() const;
    /// S(z) -> S(x^2) as a series in x of the given order.
    PowerSeries stretch2(int order) const;
    PowerSeries odd_part() const;
    PowerSeries even_part() const;
    PowerSeries truncated(int order) const;

    bool operator==(const PowerSeries& o) const { return c_ == o.c_; }

private:
    std::vector<Expr> c_;
};

/// Exact Taylor coefficients of g at var = 0 through the given order.
/// Throws Error on poles at 0 and on non-analytic kernels.
PowerSeries taylor(const Expr& g, const std::string& var, int order);

/// Series in u of g(u^2), where occurrences of sqrt(var) in g become u.
/// This is how predefined classes containing sqrt(z) are expanded without
/// ever taking a symbolic square root of the variable.
PowerSeries taylor_sqrt_substituted(const Expr& g, const std::string& var, int order);

/// Series of g in z itself for sqrt-containing g (odd u-coefficients must
/// vanish); order counts powers of z.
PowerSeries taylor_in_z_allowing_sqrt(const Expr& g, const std::string& var, int order);

enum class ClassType { Additive, Multiplicative, Pfaffian };
enum class FieldTag { Real, Complex };

/// The class-type transform g -> f: identity over the complex field,
/// f(x) = sqrt(g(x^2)) (real multiplicative, g(0)=1), f(x) = g(x^2)/2
/// (real additive, g(0)=0), f(x) = (g(x)-g(-x))/2 (Pfaffian). Returns the
/// x-coefficients [c0..c_order]. For real classes `g` is the series of g in
/// z; for complex and Pfaffian classes it is the series in x.
std::vector<Expr> transform_series(const PowerSeries& g, ClassType type, FieldTag field,
                                   int order);

} // namespace cw
