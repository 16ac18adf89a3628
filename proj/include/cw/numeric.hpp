#pragma once

#include "cw/expr.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace cw {

using Complex = std::complex<double>;

/// Numeric implementation of an opaque user function at a given formal
/// derivative order.
using FnImpl = std::function<Complex(const std::vector<Complex>&)>;

struct EvalContext {
    std::map<std::string, Complex> vars;
    std::map<std::pair<std::string, int>, FnImpl> fns;
    /// Divisions by values of smaller magnitude raise an EvalError; equality
    /// sampling raises this to reject near-pole sample points.
    double pole_floor = 1e-300;

    void bind(const std::string& name, Complex v) { vars[name] = v; }
    void implement(const std::string& name, int order, FnImpl f) {
        fns[{name, order}] = std::move(f);
    }
};

/// IEEE-double evaluation; throws EvalError on unbound variables, missing
/// function implementations, and poles.
Complex eval_numeric(const Expr& e, const EvalContext& ctx);

struct EqualResult {
    bool equal = false;
    bool exact = false; // decided by canonical zero test rather than sampling
    std::map<std::string, double> witness; // populated when equal == false

    explicit operator bool() const { return equal; }
};

/// Semantic equality: exact when canon(a-b) == 0 (with and without the trig
/// rewrite set), otherwise sampled at `trials` random points in [-2,2] per
/// variable with pole rejection. Opaque functions without implementations in
/// `base_ctx` get deterministic smooth stand-ins. A zero seed falls back to
/// the process-wide default.
EqualResult equal_sym(const Expr& a, const Expr& b, int trials = 20, double tol = 1e-8,
                      uint64_t seed = 0, const EvalContext* base_ctx = nullptr);

/// Process-wide default seed for probabilistic equality sampling.
void set_default_sampling_seed(uint64_t seed);
uint64_t default_sampling_seed();

} // namespace cw
