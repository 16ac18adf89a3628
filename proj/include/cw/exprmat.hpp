#pragma once

#include "cw/error.hpp"
#include "cw/expr.hpp"

#include <vector>

namespace cw {

/// Dense matrix of symbolic expressions.
using ExprMat = std::vector<std::vector<Expr>>;

inline ExprMat expr_mat_identity(size_t n) {
    ExprMat m(n, std::vector<Expr>(n, num(0)));
    for (size_t i = 0; i < n; ++i) m[i][i] = num(1);
    return m;
}

inline ExprMat expr_mat_mul(const ExprMat& a, const ExprMat& b) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    ExprMat r(n, std::vector<Expr>(m, num(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero()) continue;
            for (size_t j = 0; j < m; ++j) r[i][j] = r[i][j] + a[i][l] * b[l][j];
        }
    return r;
}

inline ExprMat expr_mat_transpose(const ExprMat& a) {
    size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
    ExprMat r(m, std::vector<Expr>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) r[j][i] = a[i][j];
    return r;
}

/// Determinant by cofactor expansion (intended for small n).
inline Expr expr_mat_det(const ExprMat& a) {
    size_t n = a.size();
    if (n == 0) return num(1);
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    Expr det = num(0);
    for (size_t j = 0; j < n; ++j) {
        if (a[0][j].is_zero()) continue;
        ExprMat minor(n - 1, std::vector<Expr>(n - 1));
        for (size_t r = 1; r < n; ++r) {
            size_t cc = 0;
            for (size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor[r - 1][cc++] = a[r][c];
            }
        }
        Expr term = a[0][j] * expr_mat_det(minor);
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

/// Inverse via adjugate over the determinant; throws if the determinant is
/// canonically zero.
inline ExprMat expr_mat_inverse(const ExprMat& a) {
    size_t n = a.size();
    Expr det = expr_mat_det(a);
    if (det.is_zero()) throw Error("matrix", "matrix is canonically singular");
    ExprMat inv(n, std::vector<Expr>(n));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            ExprMat minor(n - 1, std::vector<Expr>(n - 1));
            size_t rr = 0;
            for (size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                size_t cc = 0;
                for (size_t c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor[rr][cc++] = a[r][c];
                }
                ++rr;
            }
            Expr cof = expr_mat_det(minor);
            if ((i + j) % 2 == 1) cof = num(-1) * cof;
            inv[j][i] = cof / det;
        }
    }
    return inv;
}

/// Submatrix determinant on selected rows/columns.
inline Expr expr_mat_minor_det(const ExprMat& a, const std::vector<int>& rows,
                               const std::vector<int>& cols) {
    ExprMat sub(rows.size(), std::vector<Expr>(cols.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            sub[i][j] = a[static_cast<size_t>(rows[i])][static_cast<size_t>(cols[j])];
    return expr_mat_det(sub);
}

} // namespace cw
