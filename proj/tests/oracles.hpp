// Independent test oracles. Everything here is deliberately written against
// primitive types (or raw Expr trees) so it does not share code paths with
// the implementation it checks.
#pragma once

#include "cw/expr.hpp"
#include "cw/num.hpp"
#include "cw/numeric.hpp"

#include <functional>
#include <random>
#include <vector>

namespace oracle {

// central finite difference d/dv f at a point, step h
inline cw::Complex central_diff(const std::function<cw::Complex(double)>& f, double x0, double h) {
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

// ---------------------------------------------------------------- series

// minimal exact power-series arithmetic on rational coefficient vectors
using RSeries = std::vector<cw::Rational>;

inline RSeries rs_mul(const RSeries& a, const RSeries& b, size_t order) {
    RSeries r(order + 1, cw::Rational(0));
    for (size_t i = 0; i <= order && i < a.size(); ++i)
        for (size_t j = 0; i + j <= order && j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

inline RSeries rs_reciprocal(const RSeries& a, size_t order) {
    // a[0] != 0; classic recurrence b0 = 1/a0, b_n = -(1/a0) sum a_k b_{n-k}
    RSeries b(order + 1, cw::Rational(0));
    cw::Rational inv = a[0].inverse();
    b[0] = inv;
    for (size_t n = 1; n <= order; ++n) {
        cw::Rational s(0);
        for (size_t k = 1; k <= n; ++k) {
            cw::Rational ak = k < a.size() ? a[k] : cw::Rational(0);
            s += ak * b[n - k];
        }
        b[n] = -inv * s;
    }
    return b;
}

// Newton iteration for sqrt with unit constant term: y <- (y + a/y)/2
inline RSeries rs_sqrt_newton(const RSeries& a, size_t order) {
    RSeries y(order + 1, cw::Rational(0));
    y[0] = cw::Rational(1);
    for (size_t it = 0; it < order + 2; ++it) {
        RSeries ainv_y = rs_mul(a, rs_reciprocal(y, order), order);
        for (size_t i = 0; i <= order; ++i) y[i] = (y[i] + ainv_y[i]) * cw::Rational(1, 2);
    }
    return y;
}

// ---------------------------------------------------------------- dense forms

// dense antisymmetric k-tensor on an n-dim space, entries Expr
struct DenseForm {
    int n = 0;
    int k = 0;
    std::vector<cw::Expr> a; // full tensor, index = sum i_j * n^j

    static size_t flat(const std::vector<int>& idx, int n) {
        size_t f = 0;
        for (int i : idx) f = f * static_cast<size_t>(n) + static_cast<size_t>(i);
        return f;
    }
    cw::Expr at(const std::vector<int>& idx) const { return a[flat(idx, n)]; }
};

inline int perm_sign(std::vector<int> p) {
    int sign = 1;
    for (size_t i = 0; i < p.size(); ++i) {
        while (p[i] != static_cast<int>(i)) {
            std::swap(p[i], p[p[i]]);
            sign = -sign;
        }
    }
    return sign;
}

inline void for_each_tuple(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> idx(k, 0);
    while (true) {
        f(idx);
        int j = k - 1;
        while (j >= 0 && idx[j] == n - 1) {
            idx[j] = 0;
            --j;
        }
        if (j < 0) return;
        ++idx[j];
    }
}

// full antisymmetrized wedge: (alpha ^ beta)(e_I) over all permutations with
// 1/(k! l!) normalization, exact Expr arithmetic
inline DenseForm dense_wedge(const DenseForm& x, const DenseForm& y) {
    DenseForm r;
    r.n = x.n;
    r.k = x.k + y.k;
    size_t total = 1;
    for (int i = 0; i < r.k; ++i) total *= static_cast<size_t>(r.n);
    r.a.assign(total, cw::num(0));
    cw::Rational norm(1);
    for (int i = 2; i <= x.k; ++i) norm = norm * cw::Rational(i);
    for (int i = 2; i <= y.k; ++i) norm = norm * cw::Rational(i);
    norm = norm.inverse();

    std::vector<int> perm(r.k);
    for (int i = 0; i < r.k; ++i) perm[i] = i;
    std::vector<std::pair<std::vector<int>, int>> perms;
    do {
        perms.emplace_back(perm, perm_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));

    for_each_tuple(r.n, r.k, [&](const std::vector<int>& idx) {
        cw::Expr acc = cw::num(0);
        for (auto& [p, sgn] : perms) {
            std::vector<int> xi(idx.size());
            for (size_t i = 0; i < idx.size(); ++i) xi[i] = idx[p[i]];
            std::vector<int> i1(xi.begin(), xi.begin() + x.k);
            std::vector<int> i2(xi.begin() + x.k, xi.end());
            cw::Expr term = x.at(i1) * y.at(i2);
            acc = acc + (sgn > 0 ? term : cw::num(-1) * term);
        }
        r.a[DenseForm::flat(idx, r.n)] = cw::num(norm) * acc;
    });
    return r;
}

} // namespace oracle
