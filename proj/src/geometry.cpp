#include "cw/geometry.hpp"
#include "cw/calculus.hpp"
#include "cw/canon.hpp"
#include "cw/error.hpp"
#include "cw/numeric.hpp"

#include <algorithm>

namespace cw {

int Chart::index_of(const std::string& coord) const {
    for (size_t i = 0; i < coords.size(); ++i)
        if (coords[i] == coord) return static_cast<int>(i);
    throw Error("geometry", "chart '" + name + "' has no coordinate '" + coord + "'");
}

std::string CoframeDef::covector_symbol(int i) const {
    if (is_coordinate) return "d" + chart->coords[static_cast<size_t>(i)];
    return name + "^" + std::to_string(i);
}

Manifold::Manifold(std::string name, int dim) : name_(std::move(name)), dim_(dim) {
    if (dim < 1) throw Error("geometry", "dimension must be positive");
    children_[name_] = {};
}

void Manifold::declare_subset(const std::string& name, const std::string& parent) {
    std::string p = parent.empty() ? name_ : parent;
    if (!subset_known(p)) throw Error("geometry", "unknown subset '" + p + "'");
    children_[p].insert(name);
    children_.try_emplace(name);
}

void Manifold::declare_union(const std::string& parent, const std::vector<std::string>& parts) {
    std::string p = parent.empty() ? name_ : parent;
    for (const std::string& s : parts) {
        if (!subset_known(s)) declare_subset(s, p);
        else children_[p].insert(s);
    }
    unions_[p] = parts;
}

void Manifold::declare_intersection(const std::string& a, const std::string& b,
                                    const std::string& w) {
    if (!subset_known(a) || !subset_known(b))
        throw Error("geometry", "intersection of unknown subsets");
    if (!subset_known(w)) {
        children_[a].insert(w);
        children_[b].insert(w);
        children_.try_emplace(w);
    }
    intersections_[{std::min(a, b), std::max(a, b)}] = w;
}

bool Manifold::subset_known(const std::string& s) const { return children_.count(s) != 0; }

bool Manifold::subset_contains(const std::string& a, const std::string& b) const {
    if (a == b) return true;
    auto it = children_.find(a);
    if (it == children_.end()) return false;
    for (const std::string& kid : it->second)
        if (subset_contains(kid, b)) return true;
    return false;
}

bool Manifold::subsets_overlap(const std::string& a, const std::string& b) const {
    if (subset_contains(a, b) || subset_contains(b, a)) return true;
    return intersections_.count({std::min(a, b), std::max(a, b)}) != 0;
}

std::string Manifold::intersection_of(const std::string& a, const std::string& b) const {
    if (subset_contains(a, b)) return b;
    if (subset_contains(b, a)) return a;
    auto it = intersections_.find({std::min(a, b), std::max(a, b)});
    return it == intersections_.end() ? std::string() : it->second;
}

bool Manifold::covers_whole(const std::vector<std::string>& subsets) const {
    for (const std::string& s : subsets)
        if (s == name_) return true;
    auto it = unions_.find(name_);
    if (it == unions_.end()) return false;
    for (const std::string& part : it->second) {
        bool covered = false;
        for (const std::string& s : subsets)
            if (subset_contains(s, part)) covered = true;
        if (!covered) return false;
    }
    return true;
}

Chart& Manifold::add_chart(const std::string& name, const std::string& domain,
                           std::vector<std::string> coords,
                           std::vector<Restriction> restrictions) {
    if (static_cast<int>(coords.size()) != dim_)
        throw Error("geometry", "chart '" + name + "' must have " + std::to_string(dim_) +
                                    " coordinates");
    for (const auto& up : charts_) {
        for (const std::string& c : coords)
            for (const std::string& o : up->coords)
                if (c == o)
                    throw Error("geometry",
                                "coordinate symbol '" + c + "' already used by chart '" +
                                    up->name + "'");
    }
    std::string dom = domain.empty() ? name_ : domain;
    if (!subset_known(dom)) declare_subset(dom);
    auto chart = std::make_unique<Chart>();
    chart->manifold = this;
    chart->name = name;
    chart->domain = dom;
    chart->coords = std::move(coords);
    chart->restrictions = std::move(restrictions);
    charts_.push_back(std::move(chart));
    Chart& out = *charts_.back();
    // eager coordinate coframe so lookups stay const (and thread-safe) later
    auto cf = std::make_unique<CoframeDef>();
    cf->name = out.name;
    cf->chart = &out;
    cf->is_coordinate = true;
    cf->domain = out.domain;
    coframes_.push_back(std::move(cf));
    return out;
}

const Chart* Manifold::chart(const std::string& name) const {
    for (const auto& c : charts_)
        if (c->name == name) return c.get();
    return nullptr;
}

std::vector<const Chart*> Manifold::charts() const {
    std::vector<const Chart*> out;
    for (const auto& c : charts_) out.push_back(c.get());
    return out;
}

const TransitionMap& Manifold::add_transition(const Chart& src, const Chart& dst,
                                              std::vector<Expr> forward_exprs,
                                              std::vector<Expr> inverse_exprs) {
    if (static_cast<int>(forward_exprs.size()) != dim_ ||
        static_cast<int>(inverse_exprs.size()) != dim_)
        throw Error("geometry", "transition expression count must equal the dimension");
    if (src.manifold != this || dst.manifold != this)
        throw Error("geometry", "charts belong to a different manifold");

    // round trip: substituting the forward expressions into the inverse
    // must give back the source coordinates
    for (int i = 0; i < dim_; ++i) {
        std::map<std::string, Expr> repl;
        for (int j = 0; j < dim_; ++j) repl[dst.coords[static_cast<size_t>(j)]] = forward_exprs[static_cast<size_t>(j)];
        Expr back = substitute(inverse_exprs[static_cast<size_t>(i)], repl);
        Expr want = var(src.coords[static_cast<size_t>(i)]);
        bool ok = canonically_equal(back, want);
        if (!ok) ok = static_cast<bool>(equal_sym(back, want, 16, 1e-9, 11));
        if (!ok)
            throw Error("geometry", "transition " + src.name + " -> " + dst.name +
                                        " fails the round-trip check on coordinate " +
                                        src.coords[static_cast<size_t>(i)]);
    }

    auto fwd = std::make_unique<TransitionMap>();
    fwd->src = &src;
    fwd->dst = &dst;
    fwd->forward = forward_exprs;
    fwd->inverse = inverse_exprs;
    auto rev = std::make_unique<TransitionMap>();
    rev->src = &dst;
    rev->dst = &src;
    rev->forward = std::move(inverse_exprs);
    rev->inverse = std::move(forward_exprs);
    transitions_.push_back(std::move(fwd));
    transitions_.push_back(std::move(rev));

    // charts with a transition overlap; record an implicit intersection
    if (intersection_of(src.domain, dst.domain).empty()) {
        declare_intersection(src.domain, dst.domain, "_overlap_" + src.domain + "_" + dst.domain);
    }
    return *transitions_[transitions_.size() - 2];
}

const TransitionMap* Manifold::transition(const Chart& src, const Chart& dst) const {
    for (const auto& t : transitions_)
        if (t->src == &src && t->dst == &dst) return t.get();
    return nullptr;
}

const CoframeDef* Manifold::coordinate_coframe(const Chart& c) const {
    for (const auto& cf : coframes_)
        if (cf->is_coordinate && cf->chart == &c) return cf.get();
    throw Error("geometry", "chart '" + c.name + "' is not registered on this manifold");
}

const CoframeDef* Manifold::register_coframe(const std::string& name, const Chart& base,
                                             ExprMat frame_matrix, const std::string& domain) {
    Expr det = expr_mat_det(frame_matrix);
    if (det.is_zero())
        throw Error("geometry", "coframe '" + name + "' has a canonically singular linking matrix");
    auto cf = std::make_unique<CoframeDef>();
    cf->name = name;
    cf->chart = &base;
    cf->is_coordinate = false;
    cf->domain = domain.empty() ? base.domain : domain;
    cf->inverse_matrix = expr_mat_inverse(frame_matrix);
    cf->frame_matrix = std::move(frame_matrix);
    coframes_.push_back(std::move(cf));
    return coframes_.back().get();
}

const CoframeDef* Manifold::coframe(const std::string& name) const {
    for (const auto& cf : coframes_)
        if (cf->name == name) return cf.get();
    return nullptr;
}

// ---------------------------------------------------------------- fields

void ScalarField::set_expr(const Chart& chart, Expr e) {
    by_chart_[&chart] = canonicalize(std::move(e));
}

bool ScalarField::has_chart(const Chart& chart) const { return by_chart_.count(&chart) != 0; }

Expr ScalarField::expr(const Chart& chart) const {
    auto it = by_chart_.find(&chart);
    if (it == by_chart_.end())
        throw Error("geometry", "field '" + name_ + "' has no expression on chart '" +
                                    chart.name + "'");
    return it->second;
}

Expr scalar_to_chart(const Expr& e, const Chart& from, const Chart& to) {
    if (&from == &to) return canonicalize(e);
    const TransitionMap* t = from.manifold->transition(from, to);
    if (!t)
        throw Error("geometry",
                    "no transition registered between charts '" + from.name + "' and '" + to.name + "'");
    // from-coordinates in terms of to-coordinates are the inverse expressions
    std::map<std::string, Expr> repl;
    for (size_t i = 0; i < from.coords.size(); ++i) repl[from.coords[i]] = t->inverse[i];
    return substitute(e, repl);
}

Expr field_on_overlap(const ScalarField& f, const Chart& from, const Chart& to) {
    return scalar_to_chart(f.expr(from), from, to);
}

bool validate_scalar_field(const ScalarField& f, int trials, double tol, uint64_t seed) {
    const auto& exprs = f.exprs();
    for (auto it = exprs.begin(); it != exprs.end(); ++it) {
        for (auto jt = std::next(it); jt != exprs.end(); ++jt) {
            const Chart* a = it->first;
            const Chart* b = jt->first;
            if (!a->manifold->transition(*a, *b)) continue;
            Expr transported = scalar_to_chart(it->second, *a, *b);
            if (canonically_equal(transported, jt->second)) continue;
            if (!equal_sym(transported, jt->second, trials, tol, seed)) return false;
        }
    }
    return true;
}

Point Point::make(const Chart& chart, std::vector<Expr> coords) {
    if (coords.size() != chart.coords.size())
        throw Error("geometry", "wrong coordinate count for point");
    EvalContext ctx;
    for (size_t i = 0; i < coords.size(); ++i) {
        coords[i] = canonicalize(coords[i]);
        ctx.bind(chart.coords[i], eval_numeric(coords[i], ctx));
    }
    for (const Restriction& r : chart.restrictions) {
        double v = eval_numeric(r.lhs, ctx).real();
        bool ok = true;
        switch (r.rel) {
            case Restriction::NotEqual: ok = std::abs(v) > 1e-12; break;
            case Restriction::Greater: ok = v > 0; break;
            case Restriction::Less: ok = v < 0; break;
        }
        if (!ok)
            throw Error("geometry", "point violates the restriction predicate of chart '" +
                                        chart.name + "'");
    }
    Point p;
    p.chart = &chart;
    p.coords = std::move(coords);
    return p;
}

} // namespace cw
