#pragma once

#include "cw/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace cw {

/// strictly increasing index tuple
using IndexTuple = std::vector<int>;

/// Differential form of fixed degree with sparse per-coframe components
/// (only nonzero strictly increasing tuples stored).
class DiffForm {
public:
    DiffForm() = default;
    DiffForm(const Manifold* m, int degree, std::string name = "");

    const Manifold* manifold() const { return manifold_; }
    int degree() const { return degree_; }
    const std::string& name() const { return name_; }
    void rename(std::string n) { name_ = std::move(n); }

    /// Accepts any index tuple; sorts it, applies the antisymmetry sign,
    /// canonicalizes, and drops canonical zeros.
    void set_comp(const CoframeDef* cf, IndexTuple idx, Expr value);
    Expr comp(const CoframeDef* cf, IndexTuple idx) const;
    bool has_coframe(const CoframeDef* cf) const { return comps_.count(cf) != 0; }
    const std::map<IndexTuple, Expr>& comps(const CoframeDef* cf) const;
    std::vector<const CoframeDef*> coframes() const;
    bool is_zero_on(const CoframeDef* cf) const;

    static DiffForm zero(const Manifold* m, int degree) { return DiffForm(m, degree); }
    static DiffForm from_scalar(const Manifold* m, const CoframeDef* cf, Expr value);

private:
    const Manifold* manifold_ = nullptr;
    int degree_ = 0;
    std::string name_;
    std::map<const CoframeDef*, std::map<IndexTuple, Expr>> comps_;
};

/// sorts the tuple in place, returns the permutation sign (0 on repeats)
int normalize_tuple(IndexTuple& idx);

DiffForm wedge(const DiffForm& a, const DiffForm& b);
DiffForm exterior_derivative(const DiffForm& a);
DiffForm form_add(const DiffForm& a, const DiffForm& b);
DiffForm form_scale(const Expr& s, const DiffForm& a);
DiffForm form_neg(const DiffForm& a);

/// Components re-expressed in another coframe over the same chart via the
/// k-fold exterior power of the linking matrices.
DiffForm change_coframe(const DiffForm& a, const CoframeDef* target);
/// Components transported to another chart's coordinate coframe through the
/// registered transition map (substitution plus Jacobian minors).
DiffForm pullback_to_chart(const DiffForm& a, const Chart& target);

/// Canonical equality on every coframe the two forms share (after
/// automatic conversion when only the coframes differ).
bool forms_equal(const DiffForm& a, const DiffForm& b);
bool form_is_zero(const DiffForm& a);

/// Makes f available on the coframe, converting when possible; false when
/// no conversion path exists.
bool obtain_form_on(const DiffForm& f, const CoframeDef* cf, DiffForm& out);

/// Tuple of forms of degree 0..n: element of the graded algebra.
class MixedForm {
public:
    MixedForm() = default;
    MixedForm(const Manifold* m, std::string name = "");

    const Manifold* manifold() const { return manifold_; }
    const std::string& name() const { return name_; }
    void rename(std::string n) { name_ = std::move(n); }

    DiffForm& operator[](int k) { return parts_.at(static_cast<size_t>(k)); }
    const DiffForm& operator[](int k) const { return parts_.at(static_cast<size_t>(k)); }
    int top_degree() const { return static_cast<int>(parts_.size()) - 1; }
    void set_part(int k, DiffForm f);

    static MixedForm zero(const Manifold* m);
    static MixedForm one(const Manifold* m, const CoframeDef* cf);
    static MixedForm from_form(DiffForm f);
    static MixedForm from_scalar(const Manifold* m, const CoframeDef* cf, Expr value);

private:
    const Manifold* manifold_ = nullptr;
    std::string name_;
    std::vector<DiffForm> parts_;
};

MixedForm mixed_mul(const MixedForm& a, const MixedForm& b);
MixedForm mixed_add(const MixedForm& a, const MixedForm& b);
MixedForm mixed_scale(const Expr& s, const MixedForm& a);
MixedForm mixed_exterior_derivative(const MixedForm& a);
bool mixed_is_zero(const MixedForm& a);
bool mixed_equal(const MixedForm& a, const MixedForm& b);

/// Paper-style "[expr]_k" expansion; components shown on `prefer` when given.
std::string display_expansion(const MixedForm& a, const CoframeDef* prefer = nullptr);
std::string display_form(const DiffForm& f, const CoframeDef* prefer = nullptr);

/// Source covectors in terms of target covectors over a shared chart:
/// sigma^i = sum_j M[i][j] tau^j.
ExprMat coframe_covector_matrix(const CoframeDef* src, const CoframeDef* tgt);

} // namespace cw
