#pragma once

#include "cw/expr.hpp"
#include "cw/poly.hpp"

namespace cw {

struct CanonOptions {
    /// Enables the optional rewrite set sin^2 u -> 1 - cos^2 u,
    /// sinh^2 u -> cosh^2 u - 1 before zero testing.
    bool trig_rewrite = false;
};

/// Normal form: rational function over Q(i) with pi and function kernels as
/// transcendental atoms. Idempotent; equal expressions render identically.
/// Throws ZeroDivisionError when a divisor canonicalizes to zero.
Expr canonicalize(const Expr& e);
Expr canonicalize(const Expr& e, const CanonOptions& opts);

/// Canonical rational-function payload of an expression (cached on canonical
/// nodes).
RatFn to_ratfn(const Expr& e);

/// Deterministic rendering of a rational function as a canonical tree.
Expr from_ratfn(const RatFn& rf);

bool is_canonically_zero(const Expr& e);
bool is_canonically_zero(const Expr& e, const CanonOptions& opts);
bool canonically_equal(const Expr& a, const Expr& b);

RatFn apply_trig_rewrites(const RatFn& rf);

/// True if e canonicalizes to a rational constant (imaginary part zero).
bool as_rational_constant(const Expr& e, Rational* out);
/// True if e canonicalizes to an element of Q(i).
bool as_gauss_constant(const Expr& e, GaussRational* out);

} // namespace cw
