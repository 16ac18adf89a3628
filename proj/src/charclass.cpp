#include "cw/charclass.hpp"
#include "cw/calculus.hpp"
#include "cw/canon.hpp"
#include "cw/error.hpp"
#include "cw/numeric.hpp"
#include "cw/parse.hpp"

#include <algorithm>
#include <future>
#include <random>

namespace cw {

// ------------------------------------------------------------ matrix ring

MixedMat mixed_mat_identity(const Manifold* m, int n, const CoframeDef* cf) {
    MixedMat r(static_cast<size_t>(n), std::vector<MixedForm>(static_cast<size_t>(n), MixedForm::zero(m)));
    for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)][static_cast<size_t>(i)] = MixedForm::one(m, cf);
    return r;
}

MixedMat mixed_mat_mul(const MixedMat& a, const MixedMat& b) {
    size_t n = a.size();
    const Manifold* m = a[0][0].manifold();
    MixedMat r(n, std::vector<MixedForm>(n, MixedForm::zero(m)));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            if (mixed_is_zero(a[i][k])) continue;
            for (size_t j = 0; j < n; ++j) {
                if (mixed_is_zero(b[k][j])) continue;
                r[i][j] = mixed_add(r[i][j], mixed_mul(a[i][k], b[k][j]));
            }
        }
    return r;
}

MixedMat mixed_mat_add(const MixedMat& a, const MixedMat& b) {
    MixedMat r = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j) r[i][j] = mixed_add(a[i][j], b[i][j]);
    return r;
}

MixedMat mixed_mat_scale(const Expr& s, const MixedMat& a) {
    MixedMat r = a;
    for (auto& row : r)
        for (auto& f : row) f = mixed_scale(s, f);
    return r;
}

// ------------------------------------------------------------ functional calculus

namespace {

const CoframeDef* curvature_coframe(const CurvatureMatrix& omega) {
    for (auto& row : omega.entries)
        for (auto& f : row)
            if (!form_is_zero(f)) return f.coframes().front();
    if (omega.frame && omega.frame->coframe) return omega.frame->coframe;
    // zero curvature on a frame without a coframe link: fall back to the
    // first chart of the base manifold
    const Manifold* m = omega.entries[0][0].manifold();
    return m->coordinate_coframe(*m->charts().front());
}

} // namespace

MixedMat functional_calculus(const std::vector<Expr>& coeffs, const CurvatureMatrix& omega,
                             const Expr& eps) {
    size_t n = omega.entries.size();
    const Manifold* m = omega.entries[0][0].manifold();
    const CoframeDef* cf = curvature_coframe(omega);
    Expr scale = num(1) / (num(2) * pi_const() * eps);

    // X = Omega / (2 pi eps) embedded in the mixed-form ring
    MixedMat X(n, std::vector<MixedForm>(n, MixedForm::zero(m)));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!form_is_zero(omega.entries[i][j]))
                X[i][j] = MixedForm::from_form(form_scale(scale, omega.entries[i][j]));

    size_t kmax = std::min(coeffs.size() - 1, static_cast<size_t>(m->dim() / 2));
    MixedMat acc(n, std::vector<MixedForm>(n, MixedForm::zero(m)));
    // Horner evaluation in the matrix variable
    for (size_t k = kmax + 1; k-- > 0;) {
        acc = mixed_mat_mul(acc, X);
        if (!coeffs[k].is_zero()) {
            MixedMat c = mixed_mat_scale(coeffs[k], mixed_mat_identity(m, static_cast<int>(n), cf));
            acc = mixed_mat_add(acc, c);
        }
    }
    return acc;
}

// ------------------------------------------------------------ invariants

namespace {

MixedForm det_cofactor(const MixedMat& a) {
    size_t n = a.size();
    const Manifold* m = a[0][0].manifold();
    if (n == 1) return a[0][0];
    if (n == 2)
        return mixed_add(mixed_mul(a[0][0], a[1][1]), mixed_scale(num(-1), mixed_mul(a[0][1], a[1][0])));
    MixedForm det = MixedForm::zero(m);
    for (size_t j = 0; j < n; ++j) {
        if (mixed_is_zero(a[0][j])) continue;
        MixedMat minor(n - 1, std::vector<MixedForm>(n - 1, MixedForm::zero(m)));
        for (size_t r = 1; r < n; ++r) {
            size_t cc = 0;
            for (size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor[r - 1][cc++] = a[r][c];
            }
        }
        MixedForm term = mixed_mul(a[0][j], det_cofactor(minor));
        det = mixed_add(det, j % 2 ? mixed_scale(num(-1), term) : term);
    }
    return det;
}

// Samuelson-Berkowitz: division-free characteristic polynomial; the
// determinant is the monic-normalized constant coefficient times (-1)^n.
MixedForm det_berkowitz(const MixedMat& a) {
    size_t n = a.size();
    const Manifold* m = a[0][0].manifold();
    const CoframeDef* cf = nullptr;
    for (auto& row : a)
        for (auto& f : row)
            for (int k = 0; k <= m->dim() && !cf; ++k)
                if (!form_is_zero(f[k])) cf = f[k].coframes().front();
    if (!cf) return MixedForm::zero(m);
    MixedForm one = MixedForm::one(m, cf);
    MixedForm minus_one = mixed_scale(num(-1), one);

    std::vector<MixedForm> V = {minus_one, a[0][0]};
    for (size_t k = 2; k <= n; ++k) {
        // column C = A[0..k-2][k-1], row R = A[k-1][0..k-2], corner = A[k-1][k-1]
        std::vector<MixedForm> toeplitz; // first column of T_k, length k+1
        toeplitz.push_back(minus_one);
        toeplitz.push_back(a[k - 1][k - 1]);
        std::vector<MixedForm> w(k - 1);
        for (size_t i = 0; i < k - 1; ++i) w[i] = a[i][k - 1];
        for (size_t j = 2; j <= k; ++j) {
            // R * w
            MixedForm rv = MixedForm::zero(m);
            for (size_t i = 0; i < k - 1; ++i)
                rv = mixed_add(rv, mixed_mul(a[k - 1][i], w[i]));
            toeplitz.push_back(rv);
            if (j < k) {
                // w <- M * w with M the principal (k-1)x(k-1) block
                std::vector<MixedForm> nw(k - 1, MixedForm::zero(m));
                for (size_t i = 0; i < k - 1; ++i)
                    for (size_t l = 0; l < k - 1; ++l)
                        nw[i] = mixed_add(nw[i], mixed_mul(a[i][l], w[l]));
                w = std::move(nw);
            }
        }
        std::vector<MixedForm> nv(k + 1, MixedForm::zero(m));
        for (size_t i = 0; i <= k; ++i)
            for (size_t j = 0; j < V.size() && j <= i; ++j)
                nv[i] = mixed_add(nv[i], mixed_mul(toeplitz[i - j], V[j]));
        V = std::move(nv);
    }
    // V[0] = ±1; normalize monic, then det = (-1)^n * constant coefficient
    bool negate_all = false;
    {
        const MixedForm& head = V[0];
        Expr c0 = form_is_zero(head[0]) ? num(0) : head[0].comps(head[0].coframes().front()).begin()->second;
        Rational r;
        if (as_rational_constant(c0, &r) && r == Rational(-1)) negate_all = true;
    }
    MixedForm det = V[n];
    if (negate_all) det = mixed_scale(num(-1), det);
    if (n % 2 == 1) det = mixed_scale(num(-1), det);
    return det;
}

} // namespace

MixedForm invariant_det(const MixedMat& m) {
    if (m.empty()) throw Error("charclass", "determinant of an empty matrix");
    if (m.size() <= 4) return det_cofactor(m);
    return det_berkowitz(m);
}

MixedForm invariant_trace(const MixedMat& m) {
    if (m.empty()) throw Error("charclass", "trace of an empty matrix");
    MixedForm t = MixedForm::zero(m[0][0].manifold());
    for (size_t i = 0; i < m.size(); ++i) t = mixed_add(t, m[i][i]);
    return t;
}

namespace {

bool mixed_mat_is_skew(const MixedMat& m) {
    size_t n = m.size();
    for (size_t i = 0; i < n; ++i) {
        if (!mixed_is_zero(m[i][i])) return false;
        for (size_t j = i + 1; j < n; ++j) {
            MixedForm s = mixed_add(m[i][j], m[j][i]);
            if (!mixed_is_zero(s)) return false;
        }
    }
    return true;
}

MixedForm pf_recursive(const MixedMat& m, std::vector<size_t> idx) {
    const Manifold* mf = m[0][0].manifold();
    if (idx.empty()) throw Error("charclass", "empty index set in Pfaffian recursion");
    if (idx.size() == 2) return m[idx[0]][idx[1]];
    size_t i0 = idx[0];
    MixedForm acc = MixedForm::zero(mf);
    for (size_t t = 1; t < idx.size(); ++t) {
        std::vector<size_t> rest;
        for (size_t s = 1; s < idx.size(); ++s)
            if (s != t) rest.push_back(idx[s]);
        MixedForm term = mixed_mul(m[i0][idx[t]], pf_recursive(m, rest));
        acc = mixed_add(acc, (t % 2 == 1) ? term : mixed_scale(num(-1), term));
    }
    return acc;
}

} // namespace

MixedForm invariant_pfaffian(const MixedMat& m) {
    size_t n = m.size();
    if (n == 0 || n % 2 != 0)
        throw Error("charclass", "Pfaffian requires an even-dimensional matrix");
    if (!mixed_mat_is_skew(m))
        throw Error("charclass", "Pfaffian input must be canonically skew-symmetric");
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    return pf_recursive(m, idx);
}

Expr epsilon_for(ClassType type) {
    return type == ClassType::Pfaffian ? num(1) : imag_unit();
}

// ------------------------------------------------------------ CharClass

namespace {

struct Registry {
    std::mutex mu;
    std::vector<std::shared_ptr<CharClass>> classes;
};

Registry& registry() {
    static Registry r;
    return r;
}

} // namespace

CharClass::CharClass(const VectorBundle* bundle, ClassType type, Expr g, std::string name)
    : bundle_(bundle), type_(type), g_(canonicalize(g)), name_(std::move(name)) {
    std::vector<std::string> vars = free_variables(g_);
    if (vars.size() > 1)
        throw Error("charclass", "base function must be univariate");
    series_var_ = vars.empty() ? "x" : vars.front();
    if (type_ == ClassType::Pfaffian) {
        if (bundle_->field() != FieldKind::Real)
            throw Error("charclass", "Pfaffian classes require a real vector bundle");
        if (bundle_->rank() % 2 != 0)
            throw Error("charclass", "Pfaffian classes require even rank");
    }
}

std::shared_ptr<CharClass> CharClass::get(const VectorBundle* bundle, ClassType type, Expr g,
                                          const std::string& name) {
    Expr gc = canonicalize(g);
    Registry& r = registry();
    std::lock_guard lock(r.mu);
    for (auto& c : r.classes) {
        if (c->bundle_ == bundle && c->type_ == type && c->name_ == name &&
            canonically_equal(c->g_, gc))
            return c;
    }
    auto fresh = std::shared_ptr<CharClass>(new CharClass(bundle, type, gc, name));
    r.classes.push_back(fresh);
    return fresh;
}

std::shared_ptr<CharClass> CharClass::predefined(const std::string& keyword,
                                                 const VectorBundle* bundle) {
    struct Row {
        const char* key;
        const char* fn;
        ClassType type;
        FieldKind field;
        const char* name;
    };
    static const Row table[] = {
        {"Chern", "1+x", ClassType::Multiplicative, FieldKind::Complex, "c"},
        {"ChernChar", "exp(x)", ClassType::Additive, FieldKind::Complex, "ch"},
        {"Todd", "x/(1-exp(-x))", ClassType::Multiplicative, FieldKind::Complex, "Td"},
        {"Pontryagin", "1+x", ClassType::Multiplicative, FieldKind::Real, "p"},
        {"AHat", "sqrt(x)/(2*sinh(sqrt(x)/2))", ClassType::Multiplicative, FieldKind::Real, "A^"},
        {"Hirzebruch", "sqrt(x)/tanh(sqrt(x))", ClassType::Multiplicative, FieldKind::Real, "L"},
        {"Euler", "x", ClassType::Pfaffian, FieldKind::Real, "e"},
    };
    for (const Row& row : table) {
        if (keyword != row.key) continue;
        if (bundle->field() != row.field)
            throw Error("charclass", std::string(row.key) + " requires a " +
                                         (row.field == FieldKind::Complex ? "complex" : "real") +
                                         " vector bundle");
        SymbolTable st;
        return get(bundle, row.type, parse_expr(row.fn, &st), row.name);
    }
    throw Error("charclass", "unknown predefined class '" + keyword + "'");
}

std::vector<Expr> CharClass::coefficients(int order) const {
    {
        std::lock_guard lock(mu_);
        auto it = coeff_cache_.find(order);
        if (it != coeff_cache_.end()) return it->second;
    }
    FieldTag field = bundle_->field() == FieldKind::Complex ? FieldTag::Complex : FieldTag::Real;
    std::vector<Expr> out;
    if (field == FieldTag::Complex || type_ == ClassType::Pfaffian) {
        PowerSeries s = taylor(g_, series_var_, order);
        out = transform_series(s, type_, field, order);
    } else {
        PowerSeries z = taylor_in_z_allowing_sqrt(g_, series_var_, (order + 1) / 2);
        out = transform_series(z, type_, field, order);
    }
    std::lock_guard lock(mu_);
    coeff_cache_[order] = out;
    return out;
}

namespace {

// sampled sign of the orientation determinant on the overlap; 0 when mixed
int sampled_sign(const Expr& det, const Chart& chart, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    int sign = 0;
    int found = 0;
    for (int t = 0; t < 64 && found < 8; ++t) {
        EvalContext ctx;
        ctx.pole_floor = 1e-8;
        for (const std::string& c : chart.coords) ctx.bind(c, dist(rng));
        double v;
        try {
            v = eval_numeric(det, ctx).real();
        } catch (const EvalError&) {
            continue;
        }
        if (std::abs(v) < 1e-9) continue;
        int s = v > 0 ? 1 : -1;
        if (found == 0) sign = s;
        else if (s != sign) return 0;
        ++found;
    }
    return found ? sign : 0;
}

// orientation sign relating two frames on their overlap, for the Pfaffian
// gluing rule; 0 when undetermined
int frame_relation_sign(const VectorBundle* vb, const LocalFrame* f1, const LocalFrame* f2) {
    if (const FrameChange* fc = vb->frame_change(*f1, *f2)) {
        for (auto& [chart, mat] : fc->g) {
            return sampled_sign(expr_mat_det(mat), *chart, 99);
        }
    }
    // tangent chart frames: the Jacobian of the coordinate change
    if (f1->coframe && f2->coframe && f1->coframe->is_coordinate && f2->coframe->is_coordinate) {
        const Chart* c1 = f1->coframe->chart;
        const Chart* c2 = f2->coframe->chart;
        const TransitionMap* t = c1->manifold->transition(*c1, *c2);
        if (!t) return 0;
        int n = c1->manifold->dim();
        ExprMat jac(static_cast<size_t>(n), std::vector<Expr>(static_cast<size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                jac[static_cast<size_t>(i)][static_cast<size_t>(j)] = differentiate(
                    t->inverse[static_cast<size_t>(i)], c2->coords[static_cast<size_t>(j)]);
        return sampled_sign(expr_mat_det(jac), *c2, 99);
    }
    return 0;
}

bool glue_compatible(const MixedForm& a, const MixedForm& b, int orientation_sign) {
    const Manifold* m = a.manifold();
    for (int k = 0; k <= m->dim(); ++k) {
        const DiffForm& fa = a[k];
        const DiffForm& fb = b[k];
        if (form_is_zero(fa) && form_is_zero(fb)) continue;
        // compare on b's charts after transporting a
        for (const CoframeDef* cf : fb.coframes()) {
            DiffForm pulled;
            try {
                pulled = pullback_to_chart(fa, *cf->chart);
            } catch (const Error&) {
                continue;
            }
            DiffForm fb_coord = pullback_to_chart(fb, *cf->chart);
            DiffForm expect = (orientation_sign == -1 && k == m->dim()) ? form_neg(fb_coord) : fb_coord;
            if (forms_equal(pulled, expect)) continue;
            // canonical comparison failed; probabilistic fallback
            const CoframeDef* ccf = m->coordinate_coframe(*cf->chart);
            bool ok = true;
            for (auto& [idx, v] : expect.comps(ccf)) {
                if (!equal_sym(pulled.comp(ccf, IndexTuple(idx)), v, 12, 1e-7)) ok = false;
            }
            for (auto& [idx, v] : pulled.comps(ccf)) {
                if (!equal_sym(expect.comp(ccf, IndexTuple(idx)), v, 12, 1e-7)) ok = false;
            }
            if (!ok) return false;
        }
    }
    return true;
}

} // namespace

MixedForm CharClass::get_form(const BundleConnection& conn,
                              const std::map<const LocalFrame*, CurvatureMatrix>* override_m) const {
    {
        std::lock_guard lock(mu_);
        auto it = form_cache_.find(&conn);
        if (it != form_cache_.end() && !override_m) return it->second;
    }
    const Manifold* m = bundle_->base();
    std::vector<const LocalFrame*> frames;
    if (override_m) {
        for (auto& [f, omega] : *override_m) frames.push_back(f);
    } else {
        frames = conn.frames();
    }
    if (frames.empty()) throw Error("charclass", "no frames supplied for the characteristic form");

    int order = m->dim() / 2;
    std::vector<Expr> coeffs = coefficients(order);
    Expr eps = epsilon_for(type_);

    auto one_frame = [&](const LocalFrame* f) {
        CurvatureMatrix omega;
        if (override_m) omega = override_m->at(f);
        else omega = curvature_from_connection(conn, *f);
        if (type_ == ClassType::Pfaffian && !omega.is_skew())
            throw Error("charclass",
                        "Pfaffian class needs a skew-symmetric curvature matrix on frame '" +
                            f->name + "' (supply skew matrices by hand)");
        MixedMat fc = functional_calculus(coeffs, omega, eps);
        switch (type_) {
            case ClassType::Multiplicative: return invariant_det(fc);
            case ClassType::Additive: return invariant_trace(fc);
            case ClassType::Pfaffian: return invariant_pfaffian(fc);
        }
        throw Error("charclass", "unknown class type");
    };

    std::vector<MixedForm> per_frame;
    if (frames.size() > 1 && std::thread::hardware_concurrency() > 1) {
        std::vector<std::future<MixedForm>> futs;
        for (const LocalFrame* f : frames)
            futs.push_back(std::async(std::launch::async, one_frame, f));
        for (auto& fu : futs) per_frame.push_back(fu.get());
    } else {
        for (const LocalFrame* f : frames) per_frame.push_back(one_frame(f));
    }

    // gluing: conflict detection on overlapping frames
    for (size_t i = 0; i < frames.size(); ++i) {
        for (size_t j = i + 1; j < frames.size(); ++j) {
            if (!m->subsets_overlap(frames[i]->domain, frames[j]->domain)) continue;
            int sign = 1;
            if (type_ == ClassType::Pfaffian) {
                sign = frame_relation_sign(bundle_, frames[i], frames[j]);
                if (sign == 0) sign = 1;
            }
            if (!glue_compatible(per_frame[i], per_frame[j], sign))
                throw Error("charclass", "gluing conflict: frames '" + frames[i]->name +
                                             "' and '" + frames[j]->name +
                                             "' give canonically different forms on their overlap");
        }
    }

    // restriction assignment: collect all per-frame components
    MixedForm glued(m, name_ + "(" + bundle_->name() + ")");
    for (const MixedForm& part : per_frame) {
        for (int k = 0; k <= m->dim(); ++k) {
            if (form_is_zero(part[k])) continue;
            DiffForm merged = glued[k];
            for (const CoframeDef* cf : part[k].coframes())
                for (auto& [idx, v] : part[k].comps(cf)) merged.set_comp(cf, IndexTuple(idx), v);
            glued.set_part(k, std::move(merged));
        }
    }

    if (!override_m) {
        std::lock_guard lock(mu_);
        form_cache_.emplace(&conn, glued);
    }
    return glued;
}

} // namespace cw
