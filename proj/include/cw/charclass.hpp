#pragma once

#include "cw/connection.hpp"
#include "cw/series.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cw {

using MixedMat = std::vector<std::vector<MixedForm>>;

MixedMat mixed_mat_identity(const Manifold* m, int n, const CoframeDef* cf);
MixedMat mixed_mat_mul(const MixedMat& a, const MixedMat& b);
MixedMat mixed_mat_add(const MixedMat& a, const MixedMat& b);
MixedMat mixed_mat_scale(const Expr& s, const MixedMat& a);

/// f(Omega/(2 pi eps)) = c0 + c1 X + ... + ck X^k as a matrix over the
/// commutative ring of even mixed forms.
MixedMat functional_calculus(const std::vector<Expr>& coeffs, const CurvatureMatrix& omega,
                             const Expr& eps);

/// Division-free determinant: cofactor expansion for n <= 4, Berkowitz
/// elimination above.
MixedForm invariant_det(const MixedMat& m);
MixedForm invariant_trace(const MixedMat& m);
/// Pfaffian of a canonically skew matrix of even mixed forms via the signed
/// sum over perfect matchings.
MixedForm invariant_pfaffian(const MixedMat& m);

Expr epsilon_for(ClassType type); // 1 for Pfaffian classes, i otherwise

/// Characteristic-class factory: (bundle, type, base function, name)
/// identifies the class; get() returns the shared cached instance.
class CharClass {
public:
    static std::shared_ptr<CharClass> get(const VectorBundle* bundle, ClassType type, Expr g,
                                          const std::string& name);
    /// Predefined classes: Chern, ChernChar, Todd, Pontryagin, AHat,
    /// Hirzebruch, Euler; validates field/rank compatibility.
    static std::shared_ptr<CharClass> predefined(const std::string& keyword,
                                                 const VectorBundle* bundle);

    const VectorBundle* bundle() const { return bundle_; }
    ClassType type() const { return type_; }
    const Expr& function() const { return g_; }
    const std::string& name() const { return name_; }

    /// f-coefficients [c0..c_order] from the class-type transform (cached).
    std::vector<Expr> coefficients(int order) const;

    /// Chern-Weil pipeline: per frame, curvature (or override), functional
    /// calculus with the 1/(2 pi eps) scaling, invariant polynomial; glued
    /// into one mixed form with overlap-conflict detection. Cached per
    /// connection.
    MixedForm get_form(const BundleConnection& conn,
                       const std::map<const LocalFrame*, CurvatureMatrix>* curvature_override =
                           nullptr) const;

private:
    CharClass(const VectorBundle* bundle, ClassType type, Expr g, std::string name);

    const VectorBundle* bundle_;
    ClassType type_;
    Expr g_;
    std::string name_;
    std::string series_var_;

    mutable std::mutex mu_;
    mutable std::map<int, std::vector<Expr>> coeff_cache_;
    mutable std::map<const BundleConnection*, MixedForm> form_cache_;
};

} // namespace cw
