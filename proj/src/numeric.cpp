#include "cw/numeric.hpp"
#include "cw/canon.hpp"
#include "cw/error.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <set>

namespace cw {

namespace {

Complex pow_complex(Complex base, const Rational& e, double pole_floor) {
    if (e.is_integer() && e.num().fits_ll()) {
        long long k = e.num().to_ll();
        if (k < 0) {
            if (std::abs(base) < pole_floor) throw EvalError("pole: division by ~0");
            base = 1.0 / base;
            k = -k;
        }
        Complex r = 1.0;
        while (k) {
            if (k & 1) r *= base;
            base *= base;
            k >>= 1;
        }
        return r;
    }
    if (e.is_neg() && std::abs(base) < pole_floor) throw EvalError("pole: division by ~0");
    return std::pow(base, Complex(e.to_double(), 0.0));
}

} // namespace

Complex eval_numeric(const Expr& e, const EvalContext& ctx) {
    switch (e.kind()) {
        case Kind::Number: return Complex(e.number().to_double(), 0.0);
        case Kind::Pi: return Complex(M_PI, 0.0);
        case Kind::Imag: return Complex(0.0, 1.0);
        case Kind::Var: {
            auto it = ctx.vars.find(e.name());
            if (it == ctx.vars.end()) throw EvalError("unbound variable '" + e.name() + "'");
            return it->second;
        }
        case Kind::Sum: {
            Complex acc = 0.0;
            for (const Expr& k : e.kids()) acc += eval_numeric(k, ctx);
            return acc;
        }
        case Kind::Product: {
            Complex acc = 1.0;
            for (const Expr& k : e.kids()) acc *= eval_numeric(k, ctx);
            return acc;
        }
        case Kind::Power: return pow_complex(eval_numeric(e.kids()[0], ctx), e.exponent(), ctx.pole_floor);
        case Kind::Fn: {
            Complex u = eval_numeric(e.kids()[0], ctx);
            switch (e.fn()) {
                case ElemFn::Sin: return std::sin(u);
                case ElemFn::Cos: return std::cos(u);
                case ElemFn::Tan: return std::tan(u);
                case ElemFn::Sinh: return std::sinh(u);
                case ElemFn::Cosh: return std::cosh(u);
                case ElemFn::Tanh: return std::tanh(u);
                case ElemFn::Exp: return std::exp(u);
                case ElemFn::Log:
                    if (std::abs(u) < ctx.pole_floor) throw EvalError("pole: log of ~0");
                    return std::log(u);
            }
            throw EvalError("unknown elementary function");
        }
        case Kind::UserFn: {
            auto it = ctx.fns.find({e.name(), e.deriv_order()});
            if (it == ctx.fns.end()) {
                std::string marker(static_cast<size_t>(e.deriv_order()), '\'');
                throw EvalError("missing implementation for function '" + e.name() + marker + "'");
            }
            std::vector<Complex> args;
            args.reserve(e.kids().size());
            for (const Expr& k : e.kids()) args.push_back(eval_numeric(k, ctx));
            return it->second(args);
        }
    }
    throw EvalError("unknown node kind");
}

namespace {

void collect_user_fns(const Expr& e, std::set<std::pair<std::string, int>>& out) {
    if (e.kind() == Kind::UserFn) out.insert({e.name(), e.deriv_order()});
    for (const Expr& k : e.kids()) collect_user_fns(k, out);
}

// deterministic smooth stand-in: generic enough that rational identities in
// the function values hold iff they hold identically
FnImpl make_stand_in(const std::string& name, int order) {
    uint64_t h = 1469598103934665603ULL;
    for (char c : name) h = (h ^ static_cast<uint64_t>(c)) * 1099511628211ULL;
    h = (h ^ static_cast<uint64_t>(order + 17)) * 1099511628211ULL;
    std::mt19937_64 rng(h);
    std::uniform_real_distribution<double> coef(0.3, 1.7);
    double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
    return [c0, c1, c2, c3](const std::vector<Complex>& args) {
        Complex acc(c0, 0.0);
        for (size_t j = 0; j < args.size(); ++j) {
            acc += c1 * std::sin(c2 * args[j] + c3) + 0.37 * c3 * args[j];
        }
        return acc;
    };
}

} // namespace

namespace {
std::atomic<uint64_t> g_sampling_seed{12345};
}

void set_default_sampling_seed(uint64_t seed) { g_sampling_seed = seed ? seed : 12345; }
uint64_t default_sampling_seed() { return g_sampling_seed; }

EqualResult equal_sym(const Expr& a, const Expr& b, int trials, double tol, uint64_t seed,
                      const EvalContext* base_ctx) {
    if (seed == 0) seed = default_sampling_seed();
    EqualResult res;
    try {
        RatFn diff = to_ratfn(a) - to_ratfn(b);
        if (diff.is_zero()) {
            res.equal = true;
            res.exact = true;
            return res;
        }
        if (apply_trig_rewrites(diff).is_zero()) {
            res.equal = true;
            res.exact = true;
            return res;
        }
    } catch (const Error&) {
        // fall through to sampling
    }

    std::set<std::string> vars;
    for (const std::string& v : free_variables(a)) vars.insert(v);
    for (const std::string& v : free_variables(b)) vars.insert(v);
    std::set<std::pair<std::string, int>> fns;
    collect_user_fns(a, fns);
    collect_user_fns(b, fns);

    EvalContext ctx;
    if (base_ctx) ctx = *base_ctx;
    ctx.pole_floor = 1e-6;
    for (auto& key : fns) {
        if (!ctx.fns.count(key)) ctx.fns[key] = make_stand_in(key.first, key.second);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    int done = 0, attempts = 0;
    const int max_attempts = trials * 64 + 64;
    while (done < trials && attempts < max_attempts) {
        ++attempts;
        for (const std::string& v : vars) ctx.vars[v] = Complex(dist(rng), 0.0);
        Complex va, vb;
        try {
            va = eval_numeric(a, ctx);
            vb = eval_numeric(b, ctx);
        } catch (const EvalError&) {
            continue; // near a pole; resample
        }
        double scale = std::max({1.0, std::abs(va), std::abs(vb)});
        if (std::abs(va - vb) > tol * scale) {
            res.equal = false;
            res.exact = false;
            for (const std::string& v : vars) res.witness[v] = ctx.vars[v].real();
            return res;
        }
        ++done;
    }
    if (done == 0)
        throw EvalError("equal_sym: could not find pole-free sample points");
    res.equal = true;
    res.exact = false;
    return res;
}

} // namespace cw
