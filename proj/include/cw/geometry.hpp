#pragma once

#include "cw/expr.hpp"
#include "cw/exprmat.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace cw {

class Manifold;

struct Restriction {
    enum Rel { NotEqual, Greater, Less };
    Expr lhs; // compared against zero
    Rel rel = NotEqual;
};

struct Chart {
    Manifold* manifold = nullptr;
    std::string name;
    std::string domain; // subset name
    std::vector<std::string> coords;
    std::vector<Restriction> restrictions;

    int index_of(const std::string& coord) const;
};

struct TransitionMap {
    const Chart* src = nullptr;
    const Chart* dst = nullptr;
    std::vector<Expr> forward; // dst coordinates as expressions in src coordinates
    std::vector<Expr> inverse; // src coordinates as expressions in dst coordinates
};

/// Coframe on (part of) the manifold: either the coordinate coframe of a
/// chart or an abstract frame linked to a chart frame by the matrix P with
/// frame vectors as columns (e_i = sum_j P[j][i] d/dx^j). The dual covectors
/// then satisfy eps^i = sum_j (P^-1)[i][j] dx^j.
struct CoframeDef {
    std::string name;
    const Chart* chart = nullptr;
    bool is_coordinate = true;
    std::string domain;
    ExprMat frame_matrix;   // P (abstract only)
    ExprMat inverse_matrix; // P^-1 (abstract only)

    std::string covector_symbol(int i) const;
};

/// Charted manifold: named subsets with declared containment, charts,
/// pairwise transition maps, registered coframes. Construction is
/// single-threaded; treat as immutable once built.
class Manifold {
public:
    Manifold(std::string name, int dim);
    Manifold(const Manifold&) = delete;
    Manifold& operator=(const Manifold&) = delete;

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }

    /// Declares a named open subset contained in `parent` (default: whole
    /// manifold).
    void declare_subset(const std::string& name, const std::string& parent = "");
    /// Records that `parent` is covered by the given subsets.
    void declare_union(const std::string& parent, const std::vector<std::string>& parts);
    /// Declares w = a ∩ b.
    void declare_intersection(const std::string& a, const std::string& b, const std::string& w);
    bool subset_known(const std::string& s) const;
    /// a ⊇ b by declared containment (reflexive, transitive).
    bool subset_contains(const std::string& a, const std::string& b) const;
    /// true when the two subsets are known to overlap (containment or a
    /// declared intersection)
    bool subsets_overlap(const std::string& a, const std::string& b) const;
    /// declared intersection name, if any
    std::string intersection_of(const std::string& a, const std::string& b) const;
    bool covers_whole(const std::vector<std::string>& subsets) const;

    Chart& add_chart(const std::string& name, const std::string& domain,
                     std::vector<std::string> coords, std::vector<Restriction> restrictions = {});
    const Chart* chart(const std::string& name) const;
    std::vector<const Chart*> charts() const;

    /// Registers both directions; verifies forward∘inverse = id by
    /// canonicalization, falling back to sampling.
    const TransitionMap& add_transition(const Chart& src, const Chart& dst,
                                        std::vector<Expr> forward_exprs,
                                        std::vector<Expr> inverse_exprs);
    /// nullptr when the pair has no registered transition
    const TransitionMap* transition(const Chart& src, const Chart& dst) const;

    const CoframeDef* coordinate_coframe(const Chart& c) const;
    const CoframeDef* register_coframe(const std::string& name, const Chart& base,
                                       ExprMat frame_matrix, const std::string& domain);
    const CoframeDef* coframe(const std::string& name) const;

private:
    std::string name_;
    int dim_;
    std::map<std::string, std::set<std::string>> children_; // parent -> contained subsets
    std::map<std::string, std::vector<std::string>> unions_;
    std::map<std::pair<std::string, std::string>, std::string> intersections_;
    std::vector<std::unique_ptr<Chart>> charts_;
    std::vector<std::unique_ptr<TransitionMap>> transitions_;
    std::vector<std::unique_ptr<CoframeDef>> coframes_;
};

/// Scalar field: one expression per chart; overlap compatibility is an
/// explicit validation step.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(const Manifold* m, std::string name) : manifold_(m), name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    const Manifold* manifold() const { return manifold_; }
    void set_expr(const Chart& chart, Expr e);
    bool has_chart(const Chart& chart) const;
    Expr expr(const Chart& chart) const;
    const std::map<const Chart*, Expr>& exprs() const { return by_chart_; }

private:
    const Manifold* manifold_ = nullptr;
    std::string name_;
    std::map<const Chart*, Expr> by_chart_;
};

/// Expression of a field's `from`-chart value in `to`-chart coordinates,
/// through the registered transition.
Expr field_on_overlap(const ScalarField& f, const Chart& from, const Chart& to);
/// Scalar transport of an arbitrary expression between charts.
Expr scalar_to_chart(const Expr& e, const Chart& from, const Chart& to);

/// Checks pairwise overlap compatibility of all chart expressions;
/// canonical equality with a randomized fallback.
bool validate_scalar_field(const ScalarField& f, int trials = 12, double tol = 1e-9,
                           uint64_t seed = 7);

struct Point {
    const Chart* chart = nullptr;
    std::vector<Expr> coords;

    /// Throws if coordinates violate the chart's restriction predicate.
    static Point make(const Chart& chart, std::vector<Expr> coords);
};

} // namespace cw
