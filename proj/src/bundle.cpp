#include "cw/bundle.hpp"
#include "cw/calculus.hpp"
#include "cw/canon.hpp"
#include "cw/error.hpp"

#include <algorithm>

namespace cw {

ExprMat FrameChange::matrix_on(const Chart& chart) const {
    auto it = g.find(&chart);
    if (it != g.end()) return it->second;
    // transport from any chart with a registered transition
    for (auto& [ch, mat] : g) {
        if (!chart.manifold->transition(*ch, chart)) continue;
        ExprMat out(mat.size(), std::vector<Expr>(mat.size()));
        for (size_t i = 0; i < mat.size(); ++i)
            for (size_t j = 0; j < mat.size(); ++j)
                out[i][j] = scalar_to_chart(mat[i][j], *ch, chart);
        return out;
    }
    throw Error("bundle", "frame change has no expression on chart '" + chart.name + "'");
}

Expr FrameChange::det_on(const Chart& chart) const { return expr_mat_det(matrix_on(chart)); }

VectorBundle::VectorBundle(Manifold* base, int rank, FieldKind field, std::string name)
    : base_(base), rank_(rank), field_(field), name_(std::move(name)) {
    if (rank < 1) throw Error("bundle", "rank must be positive");
}

LocalFrame& VectorBundle::add_frame(const std::string& name, const std::string& domain,
                                    const CoframeDef* coframe) {
    auto f = std::make_unique<LocalFrame>();
    f->bundle = this;
    f->name = name;
    f->domain = domain.empty() ? base_->name() : domain;
    f->coframe = coframe;
    if (!base_->subset_known(f->domain)) base_->declare_subset(f->domain);
    frames_.push_back(std::move(f));
    return *frames_.back();
}

const LocalFrame* VectorBundle::frame(const std::string& name) const {
    for (const auto& f : frames_)
        if (f->name == name) return f.get();
    return nullptr;
}

std::vector<const LocalFrame*> VectorBundle::frames() const {
    std::vector<const LocalFrame*> out;
    for (const auto& f : frames_) out.push_back(f.get());
    return out;
}

const FrameChange& VectorBundle::set_frame_change(const LocalFrame& f1, const LocalFrame& f2,
                                                  const std::map<const Chart*, ExprMat>& g) {
    if (g.empty()) throw Error("bundle", "frame change needs at least one chart expression");
    std::map<const Chart*, ExprMat> inv;
    for (auto& [chart, mat] : g) {
        if (static_cast<int>(mat.size()) != rank_)
            throw Error("bundle", "frame change must be a " + std::to_string(rank_) + "x" +
                                      std::to_string(rank_) + " matrix");
        Expr det = expr_mat_det(mat);
        if (det.is_zero())
            throw Error("bundle", "frame change between '" + f1.name + "' and '" + f2.name +
                                      "' is canonically singular");
        inv[chart] = expr_mat_inverse(mat);
    }
    std::string overlap = base_->intersection_of(f1.domain, f2.domain);
    auto fwd = std::make_unique<FrameChange>();
    fwd->from = &f1;
    fwd->to = &f2;
    fwd->g = g;
    fwd->overlap = overlap;
    auto rev = std::make_unique<FrameChange>();
    rev->from = &f2;
    rev->to = &f1;
    rev->g = std::move(inv);
    rev->overlap = overlap;
    changes_.push_back(std::move(fwd));
    changes_.push_back(std::move(rev));
    return *changes_[changes_.size() - 2];
}

const FrameChange* VectorBundle::frame_change(const LocalFrame& from,
                                              const LocalFrame& to) const {
    for (const auto& c : changes_)
        if (c->from == &from && c->to == &to) return c.get();
    return nullptr;
}

std::unique_ptr<VectorBundle> VectorBundle::tangent(Manifold& base) {
    auto tb = std::make_unique<VectorBundle>(&base, base.dim(), FieldKind::Real,
                                             "T" + base.name());
    for (const Chart* c : base.charts())
        tb->add_frame(c->name, c->domain, base.coordinate_coframe(*c));
    return tb;
}

// ---------------------------------------------------------------- sections

void Section::set_comp(const LocalFrame& frame, const Chart& chart, int i, Expr value) {
    auto& vec = comps_[&frame];
    if (vec.empty()) {
        vec.reserve(static_cast<size_t>(bundle_->rank()));
        for (int k = 0; k < bundle_->rank(); ++k)
            vec.emplace_back(bundle_->base(), name_ + "^" + std::to_string(k));
    }
    vec.at(static_cast<size_t>(i)).set_expr(chart, std::move(value));
}

const std::vector<ScalarField>& Section::comps(const LocalFrame& frame) const {
    auto it = comps_.find(&frame);
    if (it == comps_.end())
        throw Error("bundle", "section '" + name_ + "' has no components in frame '" +
                                  frame.name + "'");
    return it->second;
}

std::vector<const LocalFrame*> Section::frames() const {
    std::vector<const LocalFrame*> out;
    for (auto& [f, v] : comps_) out.push_back(f);
    return out;
}

namespace {

// returns the expression of a scalar field on `chart`, transporting through
// a transition when only another chart is populated
Expr field_expr_on(const ScalarField& f, const Chart& chart) {
    if (f.has_chart(chart)) return f.expr(chart);
    for (auto& [ch, e] : f.exprs()) {
        if (chart.manifold->transition(*ch, chart)) return scalar_to_chart(e, *ch, chart);
    }
    throw Error("bundle", "component has no expression reachable on chart '" + chart.name + "'");
}

} // namespace

std::vector<ScalarField> section_change_frame(const Section& s, const LocalFrame& target) {
    const VectorBundle* vb = s.bundle();
    if (s.has_frame(target)) return s.comps(target);
    for (const LocalFrame* f : s.frames()) {
        const FrameChange* ch = vb->frame_change(*f, target);
        if (!ch) continue;
        const std::vector<ScalarField>& c = s.comps(*f);
        std::vector<ScalarField> out;
        for (int i = 0; i < vb->rank(); ++i)
            out.emplace_back(vb->base(), s.name() + "^" + std::to_string(i));
        for (auto& [chart, mat] : ch->g) {
            for (int i = 0; i < vb->rank(); ++i) {
                Expr acc = num(0);
                for (int j = 0; j < vb->rank(); ++j) {
                    Expr cj = field_expr_on(c[static_cast<size_t>(j)], *chart);
                    acc = acc + mat[static_cast<size_t>(i)][static_cast<size_t>(j)] * cj;
                }
                out[static_cast<size_t>(i)].set_expr(*chart, acc);
            }
        }
        return out;
    }
    throw Error("bundle", "no frame change registered from the section's frames to '" +
                              target.name + "'");
}

Section continue_section(const Section& s, const LocalFrame& frame, const std::string& overlap) {
    const Manifold* m = s.bundle()->base();
    if (!m->subset_contains(frame.domain, overlap) && frame.domain != overlap)
        throw Error("bundle", "overlap '" + overlap + "' is not inside the frame domain");
    std::vector<ScalarField> converted = section_change_frame(s, frame);
    Section out = s;
    // canonical well-definedness: the converted expressions serve verbatim on
    // the frame's whole domain
    out.comps_[&frame] = std::move(converted);
    return out;
}

FiberVector section_at(const Section& s, const Point& p, const LocalFrame& frame) {
    const Manifold* m = s.bundle()->base();
    if (!m->subset_contains(frame.domain, p.chart->domain) &&
        !m->subsets_overlap(frame.domain, p.chart->domain))
        throw Error("bundle", "point lies outside the frame domain");
    std::vector<ScalarField> c = s.has_frame(frame) ? s.comps(frame) : section_change_frame(s, frame);
    std::map<std::string, Expr> repl;
    for (size_t i = 0; i < p.chart->coords.size(); ++i) repl[p.chart->coords[i]] = p.coords[i];
    FiberVector v;
    v.bundle = s.bundle();
    v.point = p;
    v.frame = &frame;
    for (const ScalarField& f : c)
        v.comps.push_back(substitute(field_expr_on(f, *p.chart), repl));
    return v;
}

Section section_add(const Section& a, const Section& b) {
    if (a.bundle() != b.bundle()) throw Error("bundle", "sections on different bundles");
    Section out(a.bundle(), a.name() + "+" + b.name());
    std::vector<const LocalFrame*> frames = a.frames();
    for (const LocalFrame* f : b.frames())
        if (std::find(frames.begin(), frames.end(), f) == frames.end()) frames.push_back(f);
    for (const LocalFrame* f : frames) {
        std::vector<ScalarField> ca = a.has_frame(*f) ? a.comps(*f) : section_change_frame(a, *f);
        std::vector<ScalarField> cb = b.has_frame(*f) ? b.comps(*f) : section_change_frame(b, *f);
        for (int i = 0; i < a.bundle()->rank(); ++i) {
            // add on each chart populated by either side
            std::map<const Chart*, bool> charts;
            for (auto& [ch, e] : ca[static_cast<size_t>(i)].exprs()) charts[ch] = true;
            for (auto& [ch, e] : cb[static_cast<size_t>(i)].exprs()) charts[ch] = true;
            for (auto& [ch, unused] : charts) {
                Expr ea = field_expr_on(ca[static_cast<size_t>(i)], *ch);
                Expr eb = field_expr_on(cb[static_cast<size_t>(i)], *ch);
                out.set_comp(*f, *ch, i, ea + eb);
            }
        }
    }
    return out;
}

Section section_scale(const ScalarField& f, const Section& s) {
    Section out(s.bundle(), f.name() + "*" + s.name());
    for (const LocalFrame* fr : s.frames()) {
        const std::vector<ScalarField>& c = s.comps(*fr);
        for (int i = 0; i < s.bundle()->rank(); ++i) {
            for (auto& [ch, e] : c[static_cast<size_t>(i)].exprs())
                out.set_comp(*fr, *ch, i, field_expr_on(f, *ch) * e);
        }
    }
    return out;
}

} // namespace cw
