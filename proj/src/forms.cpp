#include "cw/forms.hpp"
#include "cw/calculus.hpp"
#include "cw/canon.hpp"
#include "cw/error.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace cw {

int normalize_tuple(IndexTuple& idx) {
    int sign = 1;
    for (size_t i = 1; i < idx.size(); ++i) {
        size_t j = i;
        while (j > 0 && idx[j - 1] > idx[j]) {
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
            --j;
        }
    }
    for (size_t i = 1; i < idx.size(); ++i)
        if (idx[i] == idx[i - 1]) return 0;
    return sign;
}

static std::vector<IndexTuple> increasing_tuples(int n, int k) {
    std::vector<IndexTuple> out;
    if (k == 0) {
        out.push_back({});
        return out;
    }
    if (k > n) return out;
    IndexTuple idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    return out;
}

// ---------------------------------------------------------------- DiffForm

DiffForm::DiffForm(const Manifold* m, int degree, std::string name)
    : manifold_(m), degree_(degree), name_(std::move(name)) {
    if (degree < 0) throw Error("forms", "negative degree");
}

void DiffForm::set_comp(const CoframeDef* cf, IndexTuple idx, Expr value) {
    if (static_cast<int>(idx.size()) != degree_)
        throw Error("forms", "index tuple length must equal the degree");
    if (degree_ > manifold_->dim()) return; // identically zero
    for (int i : idx)
        if (i < 0 || i >= manifold_->dim()) throw Error("forms", "index out of range");
    int sign = normalize_tuple(idx);
    if (sign == 0) return;
    Expr v = canonicalize(sign == 1 ? value : num(-1) * value);
    auto& m = comps_[cf];
    if (v.is_zero()) m.erase(idx);
    else m[idx] = std::move(v);
}

Expr DiffForm::comp(const CoframeDef* cf, IndexTuple idx) const {
    int sign = normalize_tuple(idx);
    if (sign == 0) return num(0);
    auto it = comps_.find(cf);
    if (it == comps_.end()) return num(0);
    auto jt = it->second.find(idx);
    if (jt == it->second.end()) return num(0);
    return sign == 1 ? jt->second : canonicalize(num(-1) * jt->second);
}

const std::map<IndexTuple, Expr>& DiffForm::comps(const CoframeDef* cf) const {
    static const std::map<IndexTuple, Expr> empty;
    auto it = comps_.find(cf);
    return it == comps_.end() ? empty : it->second;
}

std::vector<const CoframeDef*> DiffForm::coframes() const {
    std::vector<const CoframeDef*> out;
    for (auto& [cf, m] : comps_)
        if (!m.empty()) out.push_back(cf);
    return out;
}

bool DiffForm::is_zero_on(const CoframeDef* cf) const { return comps(cf).empty(); }

DiffForm DiffForm::from_scalar(const Manifold* m, const CoframeDef* cf, Expr value) {
    DiffForm f(m, 0);
    f.set_comp(cf, {}, std::move(value));
    return f;
}

// ------------------------------------------------------------ conversions

ExprMat coframe_covector_matrix(const CoframeDef* src, const CoframeDef* tgt) {
    if (src == tgt) return expr_mat_identity(static_cast<size_t>(src->chart->coords.size()));
    if (src->chart != tgt->chart)
        throw Error("forms", "coframes live on different charts; use pullback_to_chart");
    if (src->is_coordinate && !tgt->is_coordinate) return tgt->frame_matrix;
    if (!src->is_coordinate && tgt->is_coordinate) return src->inverse_matrix;
    // abstract to abstract
    return expr_mat_mul(src->inverse_matrix, tgt->frame_matrix);
}

namespace {

ExprMat covector_matrix(const CoframeDef* src, const CoframeDef* tgt) {
    return coframe_covector_matrix(src, tgt);
}

std::map<IndexTuple, Expr> transform_comps(const std::map<IndexTuple, Expr>& in, int degree,
                                           int n, const ExprMat& M,
                                           const std::function<Expr(const Expr&)>& map_scalar) {
    std::map<IndexTuple, Expr> out;
    for (const IndexTuple& J : increasing_tuples(n, degree)) {
        Expr acc = num(0);
        for (auto& [I, a] : in) {
            Expr minor_det = expr_mat_minor_det(M, I, J);
            if (minor_det.is_zero()) continue;
            acc = acc + map_scalar(a) * minor_det;
        }
        if (!acc.is_zero()) out[J] = acc;
    }
    return out;
}

} // namespace

DiffForm change_coframe(const DiffForm& a, const CoframeDef* target) {
    DiffForm out(a.manifold(), a.degree(), a.name());
    if (a.has_coframe(target)) {
        for (auto& [idx, v] : a.comps(target)) out.set_comp(target, idx, v);
        return out;
    }
    for (const CoframeDef* src : a.coframes()) {
        if (src->chart != target->chart) continue;
        if (a.degree() == 0) {
            out.set_comp(target, {}, a.comps(src).begin()->second);
            return out;
        }
        ExprMat M = covector_matrix(src, target);
        auto t = transform_comps(a.comps(src), a.degree(), a.manifold()->dim(), M,
                                 [](const Expr& e) { return e; });
        for (auto& [idx, v] : t) out.set_comp(target, idx, v);
        return out;
    }
    throw Error("forms", "missing linking matrix for the requested coframe change");
}

DiffForm pullback_to_chart(const DiffForm& a, const Chart& target) {
    const Manifold* m = a.manifold();
    const CoframeDef* tgt = m->coordinate_coframe(target);
    if (a.has_coframe(tgt)) {
        DiffForm out(m, a.degree(), a.name());
        for (auto& [idx, v] : a.comps(tgt)) out.set_comp(tgt, idx, v);
        return out;
    }
    // prefer a source on the same chart (pure linear change)
    for (const CoframeDef* src : a.coframes())
        if (src->chart == &target) return change_coframe(a, tgt);

    for (const CoframeDef* src : a.coframes()) {
        const TransitionMap* t = m->transition(*src->chart, target);
        if (!t) continue;
        DiffForm coord = src->is_coordinate ? a : change_coframe(a, m->coordinate_coframe(*src->chart));
        const CoframeDef* scf = m->coordinate_coframe(*src->chart);
        // source coordinates as functions of target coordinates
        std::map<std::string, Expr> repl;
        for (size_t i = 0; i < src->chart->coords.size(); ++i)
            repl[src->chart->coords[i]] = t->inverse[i];
        auto map_scalar = [&](const Expr& e) { return substitute(e, repl); };
        DiffForm out(m, a.degree(), a.name());
        if (a.degree() == 0) {
            out.set_comp(tgt, {}, map_scalar(coord.comps(scf).begin()->second));
            return out;
        }
        int n = m->dim();
        ExprMat jac(static_cast<size_t>(n), std::vector<Expr>(static_cast<size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                jac[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    differentiate(t->inverse[static_cast<size_t>(i)],
                                  target.coords[static_cast<size_t>(j)]);
        auto tc = transform_comps(coord.comps(scf), a.degree(), n, jac, map_scalar);
        for (auto& [idx, v] : tc) out.set_comp(tgt, idx, v);
        return out;
    }
    throw Error("forms", "no path to express the form on chart '" + target.name + "'");
}

namespace {

// makes `f` available on coframe cf, converting if required; false if impossible
bool obtain_on(const DiffForm& f, const CoframeDef* cf, DiffForm& out) {
    if (f.has_coframe(cf)) {
        out = f;
        return true;
    }
    if (f.coframes().empty()) {
        out = f; // zero form is zero everywhere
        return true;
    }
    try {
        for (const CoframeDef* src : f.coframes()) {
            if (src->chart == cf->chart) {
                out = change_coframe(f, cf);
                return true;
            }
        }
        DiffForm pulled = pullback_to_chart(f, *cf->chart);
        out = cf->is_coordinate ? pulled : change_coframe(pulled, cf);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::vector<const CoframeDef*> alignment_targets(const DiffForm& a, const DiffForm& b) {
    std::vector<const CoframeDef*> common;
    for (const CoframeDef* cf : a.coframes())
        if (b.has_coframe(cf)) common.push_back(cf);
    if (!common.empty()) return common;
    if (a.coframes().empty()) return b.coframes();
    if (b.coframes().empty()) return a.coframes();
    // fall back to conversion targets
    for (const CoframeDef* cf : a.coframes()) common.push_back(cf);
    return common;
}

} // namespace

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
    if (a.manifold() != b.manifold()) throw Error("forms", "wedge across different manifolds");
    const Manifold* m = a.manifold();
    int deg = a.degree() + b.degree();
    DiffForm out(m, deg);
    if (deg > m->dim()) return out;
    bool any = false;
    for (const CoframeDef* cf : alignment_targets(a, b)) {
        DiffForm fa, fb;
        if (!obtain_on(a, cf, fa) || !obtain_on(b, cf, fb)) continue;
        any = true;
        for (auto& [I, va] : fa.comps(cf)) {
            for (auto& [J, vb] : fb.comps(cf)) {
                IndexTuple merged;
                merged.reserve(I.size() + J.size());
                merged.insert(merged.end(), I.begin(), I.end());
                merged.insert(merged.end(), J.begin(), J.end());
                int sign = normalize_tuple(merged);
                if (sign == 0) continue;
                Expr cur = out.comp(cf, merged);
                out.set_comp(cf, merged,
                             cur + (sign == 1 ? va * vb : num(-1) * va * vb));
            }
        }
    }
    if (!any && !(a.coframes().empty() || b.coframes().empty()))
        throw Error("forms", "no common coframe/domain for wedge");
    return out;
}

DiffForm exterior_derivative(const DiffForm& a) {
    const Manifold* m = a.manifold();
    DiffForm out(m, a.degree() + 1);
    if (a.degree() + 1 > m->dim()) return out;
    std::vector<const Chart*> done;
    for (const CoframeDef* cf : a.coframes()) {
        const Chart* chart = cf->chart;
        if (std::find(done.begin(), done.end(), chart) != done.end()) continue;
        done.push_back(chart);
        const CoframeDef* ccf = m->coordinate_coframe(*chart);
        DiffForm coord = cf->is_coordinate ? a : change_coframe(a, ccf);
        for (auto& [I, f] : coord.comps(ccf)) {
            for (int j = 0; j < m->dim(); ++j) {
                Expr df = differentiate(f, chart->coords[static_cast<size_t>(j)]);
                if (df.is_zero()) continue;
                IndexTuple idx;
                idx.push_back(j);
                idx.insert(idx.end(), I.begin(), I.end());
                int sign = normalize_tuple(idx);
                if (sign == 0) continue;
                Expr cur = out.comp(ccf, idx);
                out.set_comp(ccf, idx, cur + (sign == 1 ? df : num(-1) * df));
            }
        }
    }
    return out;
}

DiffForm form_add(const DiffForm& a, const DiffForm& b) {
    if (a.degree() != b.degree()) throw Error("forms", "adding forms of different degree");
    const Manifold* m = a.manifold();
    DiffForm out(m, a.degree());
    for (const CoframeDef* cf : alignment_targets(a, b)) {
        DiffForm fa, fb;
        if (!obtain_on(a, cf, fa) || !obtain_on(b, cf, fb)) continue;
        for (const IndexTuple& idx : increasing_tuples(m->dim(), a.degree())) {
            Expr v = fa.comp(cf, idx) + fb.comp(cf, idx);
            out.set_comp(cf, IndexTuple(idx), v);
        }
    }
    return out;
}

DiffForm form_scale(const Expr& s, const DiffForm& a) {
    DiffForm out(a.manifold(), a.degree(), a.name());
    for (const CoframeDef* cf : a.coframes())
        for (auto& [idx, v] : a.comps(cf)) out.set_comp(cf, IndexTuple(idx), s * v);
    return out;
}

DiffForm form_neg(const DiffForm& a) { return form_scale(num(-1), a); }

bool form_is_zero(const DiffForm& a) { return a.coframes().empty(); }

bool obtain_form_on(const DiffForm& f, const CoframeDef* cf, DiffForm& out) {
    return obtain_on(f, cf, out);
}

bool forms_equal(const DiffForm& a, const DiffForm& b) {
    if (a.degree() != b.degree()) return false;
    if (form_is_zero(a) && form_is_zero(b)) return true;
    bool compared = false;
    for (const CoframeDef* cf : alignment_targets(a, b)) {
        DiffForm fa, fb;
        if (!obtain_on(a, cf, fa) || !obtain_on(b, cf, fb)) continue;
        compared = true;
        if (fa.comps(cf) != fb.comps(cf)) return false;
    }
    if (!compared) throw Error("forms", "forms share no coframe to compare on");
    return true;
}

// ---------------------------------------------------------------- MixedForm

MixedForm::MixedForm(const Manifold* m, std::string name) : manifold_(m), name_(std::move(name)) {
    parts_.reserve(static_cast<size_t>(m->dim()) + 1);
    for (int k = 0; k <= m->dim(); ++k) parts_.emplace_back(m, k);
}

void MixedForm::set_part(int k, DiffForm f) {
    if (f.degree() != k) throw Error("forms", "component degree mismatch");
    parts_.at(static_cast<size_t>(k)) = std::move(f);
}

MixedForm MixedForm::zero(const Manifold* m) { return MixedForm(m); }

MixedForm MixedForm::one(const Manifold* m, const CoframeDef* cf) {
    MixedForm r(m);
    r.parts_[0] = DiffForm::from_scalar(m, cf, num(1));
    return r;
}

MixedForm MixedForm::from_form(DiffForm f) {
    MixedForm r(f.manifold());
    int k = f.degree();
    r.set_part(k, std::move(f));
    return r;
}

MixedForm MixedForm::from_scalar(const Manifold* m, const CoframeDef* cf, Expr value) {
    MixedForm r(m);
    r.parts_[0] = DiffForm::from_scalar(m, cf, std::move(value));
    return r;
}

MixedForm mixed_mul(const MixedForm& a, const MixedForm& b) {
    const Manifold* m = a.manifold();
    MixedForm r(m);
    for (int k = 0; k <= m->dim(); ++k) {
        DiffForm acc(m, k);
        for (int j = 0; j <= k; ++j) {
            const DiffForm& fa = a[j];
            const DiffForm& fb = b[k - j];
            if (form_is_zero(fa) || form_is_zero(fb)) continue;
            acc = form_add(acc, wedge(fa, fb));
        }
        r.set_part(k, std::move(acc));
    }
    return r;
}

MixedForm mixed_add(const MixedForm& a, const MixedForm& b) {
    const Manifold* m = a.manifold();
    MixedForm r(m);
    for (int k = 0; k <= m->dim(); ++k) {
        if (form_is_zero(a[k])) r.set_part(k, b[k]);
        else if (form_is_zero(b[k])) r.set_part(k, a[k]);
        else r.set_part(k, form_add(a[k], b[k]));
    }
    return r;
}

MixedForm mixed_scale(const Expr& s, const MixedForm& a) {
    MixedForm r(a.manifold());
    for (int k = 0; k <= a.manifold()->dim(); ++k) r.set_part(k, form_scale(s, a[k]));
    return r;
}

MixedForm mixed_exterior_derivative(const MixedForm& a) {
    const Manifold* m = a.manifold();
    MixedForm r(m);
    for (int k = 0; k < m->dim(); ++k) {
        if (form_is_zero(a[k])) continue;
        DiffForm d = exterior_derivative(a[k]);
        r.set_part(k + 1, form_is_zero(r[k + 1]) ? std::move(d) : form_add(r[k + 1], d));
    }
    return r;
}

bool mixed_is_zero(const MixedForm& a) {
    for (int k = 0; k <= a.manifold()->dim(); ++k)
        if (!form_is_zero(a[k])) return false;
    return true;
}

bool mixed_equal(const MixedForm& a, const MixedForm& b) {
    for (int k = 0; k <= a.manifold()->dim(); ++k) {
        const DiffForm& fa = a[k];
        const DiffForm& fb = b[k];
        if (form_is_zero(fa) && form_is_zero(fb)) continue;
        if (form_is_zero(fa) != form_is_zero(fb)) return false;
        if (!forms_equal(fa, fb)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- display

std::string display_form(const DiffForm& f, const CoframeDef* prefer) {
    const CoframeDef* cf = nullptr;
    if (prefer && f.has_coframe(prefer)) cf = prefer;
    else if (!f.coframes().empty()) cf = f.coframes().front();
    if (!cf) return "0";
    DiffForm g = f;
    if (prefer && cf != prefer) {
        DiffForm converted;
        if (obtain_on(f, prefer, converted)) {
            g = std::move(converted);
            cf = prefer;
        }
    }
    const CoframeDef* use = cf;
    std::ostringstream os;
    bool first = true;
    for (auto& [idx, v] : g.comps(use)) {
        if (!first) os << " + ";
        first = false;
        if (idx.empty()) {
            os << to_text(v);
            continue;
        }
        os << "(" << to_text(v) << ") ";
        for (size_t i = 0; i < idx.size(); ++i) {
            if (i) os << "∧";
            os << use->covector_symbol(idx[static_cast<size_t>(i)]);
        }
    }
    if (first) return "0";
    return os.str();
}

std::string display_expansion(const MixedForm& a, const CoframeDef* prefer) {
    std::ostringstream os;
    if (!a.name().empty()) os << a.name() << " = ";
    for (int k = 0; k <= a.manifold()->dim(); ++k) {
        if (k) os << " + ";
        os << "[" << display_form(a[k], prefer) << "]_" << k;
    }
    return os.str();
}

} // namespace cw
