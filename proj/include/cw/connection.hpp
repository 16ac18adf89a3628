#pragma once

#include "cw/bundle.hpp"
#include "cw/forms.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cw {

using FormMat = std::vector<std::vector<DiffForm>>;

FormMat form_mat_zero(const Manifold* m, int n, int degree);
FormMat form_mat_add(const FormMat& a, const FormMat& b);
FormMat form_mat_wedge(const FormMat& a, const FormMat& b);

/// Connection given by per-frame matrices of 1-forms, allocation
/// (i,j) -> omega^i_j; missing entries are zero.
class BundleConnection {
public:
    BundleConnection(const VectorBundle* bundle, std::string name);

    const VectorBundle* bundle() const { return bundle_; }
    const std::string& name() const { return name_; }

    void set_form(const LocalFrame& frame, int i, int j, DiffForm omega);
    /// zero 1-form when unset
    DiffForm form(const LocalFrame& frame, int i, int j) const;
    bool has_frame(const LocalFrame& frame) const { return omega_.count(&frame) != 0; }
    std::vector<const LocalFrame*> frames() const;

private:
    const VectorBundle* bundle_;
    std::string name_;
    std::map<const LocalFrame*, FormMat> omega_;
};

struct CurvatureMatrix {
    const LocalFrame* frame = nullptr;
    FormMat entries; // degree-2 forms, [i][j] = Omega^i_j

    bool is_skew() const;
};

/// Omega^j_i = d omega^j_i + sum_k omega^j_k wedge omega^k_i, canonicalized.
CurvatureMatrix curvature_from_connection(const BundleConnection& conn, const LocalFrame& frame);

/// Connection forms in `target` from the ones in `source`:
/// omega' = g^-1 dg + g^-1 omega g with e_target = e_source * g.
FormMat connection_change_frame(const BundleConnection& conn, const LocalFrame& source,
                                const LocalFrame& target);

enum class Signature { Riemannian, Lorentzian };

/// Symmetric 2-tensor with per-coframe component matrices.
class Metric {
public:
    Metric() = default;
    Metric(const Manifold* m, Signature sig, std::string name)
        : manifold_(m), sig_(sig), name_(std::move(name)) {}

    const Manifold* manifold() const { return manifold_; }
    Signature signature() const { return sig_; }
    const std::string& name() const { return name_; }

    /// Throws unless the matrix is symmetric with canonically nonzero
    /// determinant.
    void set_comps(const CoframeDef* cf, ExprMat g);
    bool has_coframe(const CoframeDef* cf) const { return comps_.count(cf) != 0; }
    const ExprMat& comps(const CoframeDef* cf) const;
    std::vector<const CoframeDef*> coframes() const;
    /// Components on another coframe over the same chart.
    ExprMat comps_on(const CoframeDef* target) const;
    /// Inverse-metric components on the target coframe. For metrics stored
    /// in an abstract coframe this uses (Q^T h Q)^-1 = P h^-1 P^T with the
    /// frame matrix P, avoiding a symbolic inversion of the converted
    /// components.
    ExprMat inverse_comps_on(const CoframeDef* target) const;

private:
    const Manifold* manifold_ = nullptr;
    Signature sig_ = Signature::Riemannian;
    std::string name_;
    std::map<const CoframeDef*, ExprMat> comps_;
};

/// Map between manifolds with per-chart-pair coordinate expressions.
class SmoothMap {
public:
    SmoothMap(const Manifold* src, const Manifold* dst, std::string name)
        : src_(src), dst_(dst), name_(std::move(name)) {}

    const Manifold* source() const { return src_; }
    const Manifold* target() const { return dst_; }
    const std::string& name() const { return name_; }

    void set_exprs(const Chart& src_chart, const Chart& dst_chart, std::vector<Expr> exprs);
    const std::vector<Expr>* exprs(const Chart& src_chart, const Chart& dst_chart) const;
    const std::map<std::pair<const Chart*, const Chart*>, std::vector<Expr>>& all() const {
        return exprs_;
    }

private:
    const Manifold* src_;
    const Manifold* dst_;
    std::string name_;
    std::map<std::pair<const Chart*, const Chart*>, std::vector<Expr>> exprs_;
};

/// g_ij = sum_ab h_ab (df^a/dx^i)(df^b/dx^j), per available chart pair.
Metric pullback_metric(const Metric& h, const SmoothMap& f, Signature sig = Signature::Riemannian);

/// Torsion-free metric-compatible connection on the tangent bundle from the
/// Christoffel symbols; connection forms omega^j_i = Gamma^j_{ki} dx^k per
/// chart frame. Metrics stored in an abstract coframe are converted to
/// coordinates first.
std::unique_ptr<BundleConnection> levi_civita(const Metric& g, const VectorBundle& tangent);

} // namespace cw
