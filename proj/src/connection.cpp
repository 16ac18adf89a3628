#include "cw/connection.hpp"
#include "cw/calculus.hpp"
#include "cw/canon.hpp"
#include "cw/error.hpp"

#include <future>

namespace cw {

FormMat form_mat_zero(const Manifold* m, int n, int degree) {
    return FormMat(static_cast<size_t>(n),
                   std::vector<DiffForm>(static_cast<size_t>(n), DiffForm(m, degree)));
}

FormMat form_mat_add(const FormMat& a, const FormMat& b) {
    FormMat r = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j) {
            if (form_is_zero(b[i][j])) continue;
            r[i][j] = form_is_zero(a[i][j]) ? b[i][j] : form_add(a[i][j], b[i][j]);
        }
    return r;
}

FormMat form_mat_wedge(const FormMat& a, const FormMat& b) {
    size_t n = a.size();
    const Manifold* m = a[0][0].manifold();
    FormMat r(n, std::vector<DiffForm>(n));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            DiffForm acc;
            bool started = false;
            for (size_t k = 0; k < n; ++k) {
                if (form_is_zero(a[i][k]) || form_is_zero(b[k][j])) continue;
                DiffForm t = wedge(a[i][k], b[k][j]);
                acc = started ? form_add(acc, t) : std::move(t);
                started = true;
            }
            if (!started) acc = DiffForm(m, a[i][0].degree() + b[0][j].degree());
            r[i][j] = std::move(acc);
        }
    }
    return r;
}

// ---------------------------------------------------------------- connection

BundleConnection::BundleConnection(const VectorBundle* bundle, std::string name)
    : bundle_(bundle), name_(std::move(name)) {}

void BundleConnection::set_form(const LocalFrame& frame, int i, int j, DiffForm omega) {
    if (omega.degree() != 1 && !form_is_zero(omega))
        throw Error("connection", "connection form entries must have degree 1");
    auto it = omega_.find(&frame);
    if (it == omega_.end()) {
        it = omega_.emplace(&frame, form_mat_zero(bundle_->base(), bundle_->rank(), 1)).first;
    }
    it->second.at(static_cast<size_t>(i)).at(static_cast<size_t>(j)) = std::move(omega);
}

DiffForm BundleConnection::form(const LocalFrame& frame, int i, int j) const {
    auto it = omega_.find(&frame);
    if (it == omega_.end()) return DiffForm(bundle_->base(), 1);
    return it->second.at(static_cast<size_t>(i)).at(static_cast<size_t>(j));
}

std::vector<const LocalFrame*> BundleConnection::frames() const {
    std::vector<const LocalFrame*> out;
    for (auto& [f, m] : omega_) out.push_back(f);
    return out;
}

bool CurvatureMatrix::is_skew() const {
    size_t n = entries.size();
    for (size_t i = 0; i < n; ++i) {
        if (!form_is_zero(entries[i][i])) return false;
        for (size_t j = i + 1; j < n; ++j) {
            if (form_is_zero(entries[i][j]) && form_is_zero(entries[j][i])) continue;
            if (!forms_equal(entries[i][j], form_neg(entries[j][i]))) return false;
        }
    }
    return true;
}

CurvatureMatrix curvature_from_connection(const BundleConnection& conn, const LocalFrame& frame) {
    int n = conn.bundle()->rank();
    const Manifold* m = conn.bundle()->base();
    CurvatureMatrix out;
    out.frame = &frame;
    out.entries = form_mat_zero(m, n, 2);

    auto entry = [&](int i, int j) {
        DiffForm acc = exterior_derivative(conn.form(frame, i, j));
        for (int k = 0; k < n; ++k) {
            const DiffForm a = conn.form(frame, i, k);
            const DiffForm b = conn.form(frame, k, j);
            if (form_is_zero(a) || form_is_zero(b)) continue;
            DiffForm w = wedge(a, b);
            acc = form_is_zero(acc) ? std::move(w) : form_add(acc, w);
        }
        return acc;
    };

    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads > 1 && n > 1) {
        std::vector<std::future<DiffForm>> futs;
        futs.reserve(static_cast<size_t>(n) * static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                futs.push_back(std::async(std::launch::async, entry, i, j));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    futs[static_cast<size_t>(i * n + j)].get();
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = entry(i, j);
    }
    return out;
}

FormMat connection_change_frame(const BundleConnection& conn, const LocalFrame& source,
                                const LocalFrame& target) {
    const VectorBundle* vb = conn.bundle();
    int n = vb->rank();
    const Manifold* m = vb->base();
    // e_target = e_source * g is stored as FrameChange(target, source)
    const FrameChange* fc = vb->frame_change(target, source);
    if (!fc)
        throw Error("connection", "no frame change registered between '" + source.name +
                                      "' and '" + target.name + "'");
    FormMat out = form_mat_zero(m, n, 1);
    for (auto& [chart, g] : fc->g) {
        const CoframeDef* cf = m->coordinate_coframe(*chart);
        ExprMat ginv = expr_mat_inverse(g);
        // scalar-form views of g and g^-1
        FormMat gform(static_cast<size_t>(n), std::vector<DiffForm>(static_cast<size_t>(n)));
        FormMat ginvform(static_cast<size_t>(n), std::vector<DiffForm>(static_cast<size_t>(n)));
        FormMat dg(static_cast<size_t>(n), std::vector<DiffForm>(static_cast<size_t>(n)));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                gform[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    DiffForm::from_scalar(m, cf, g[static_cast<size_t>(i)][static_cast<size_t>(j)]);
                ginvform[static_cast<size_t>(i)][static_cast<size_t>(j)] = DiffForm::from_scalar(
                    m, cf, ginv[static_cast<size_t>(i)][static_cast<size_t>(j)]);
                dg[static_cast<size_t>(i)][static_cast<size_t>(j)] = exterior_derivative(
                    gform[static_cast<size_t>(i)][static_cast<size_t>(j)]);
            }
        }
        FormMat omega(static_cast<size_t>(n), std::vector<DiffForm>(static_cast<size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                omega[static_cast<size_t>(i)][static_cast<size_t>(j)] = conn.form(source, i, j);
        FormMat part1 = form_mat_wedge(ginvform, dg);
        FormMat part2 = form_mat_wedge(ginvform, form_mat_wedge(omega, gform));
        out = form_mat_add(out, form_mat_add(part1, part2));
        break; // one chart determines the forms; others agree on overlaps
    }
    return out;
}

// ---------------------------------------------------------------- metric

void Metric::set_comps(const CoframeDef* cf, ExprMat g) {
    size_t n = static_cast<size_t>(manifold_->dim());
    if (g.size() != n) throw Error("connection", "metric matrix size must equal the dimension");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            g[i][j] = canonicalize(g[i][j]);
            g[j][i] = canonicalize(g[j][i]);
            if (!canonically_equal(g[i][j], g[j][i]))
                throw Error("connection", "metric matrix must be symmetric");
        }
    if (expr_mat_det(g).is_zero())
        throw Error("connection", "metric is canonically singular");
    comps_[cf] = std::move(g);
}

const ExprMat& Metric::comps(const CoframeDef* cf) const {
    auto it = comps_.find(cf);
    if (it == comps_.end())
        throw Error("connection", "metric '" + name_ + "' has no components on that coframe");
    return it->second;
}

std::vector<const CoframeDef*> Metric::coframes() const {
    std::vector<const CoframeDef*> out;
    for (auto& [cf, g] : comps_) out.push_back(cf);
    return out;
}

ExprMat Metric::comps_on(const CoframeDef* target) const {
    if (has_coframe(target)) return comps(target);
    for (auto& [src, g] : comps_) {
        if (src->chart != target->chart) continue;
        // sigma^i = M[i][j] tau^j  =>  g_tau = M^T g_sigma M
        ExprMat M = coframe_covector_matrix(src, target);
        return expr_mat_mul(expr_mat_transpose(M), expr_mat_mul(g, M));
    }
    throw Error("connection", "metric '" + name_ + "' cannot be expressed on that coframe");
}

ExprMat Metric::inverse_comps_on(const CoframeDef* target) const {
    if (has_coframe(target)) return expr_mat_inverse(comps(target));
    for (auto& [src, g] : comps_) {
        if (src->chart != target->chart) continue;
        // g_tau = M^T g_sigma M, so g_tau^-1 = M^-1 g_sigma^-1 M^-T; for the
        // covector matrix M both M and M^-1 are already on hand
        ExprMat M = coframe_covector_matrix(src, target);
        ExprMat Minv = coframe_covector_matrix(target, src);
        ExprMat hinv = expr_mat_inverse(g);
        return expr_mat_mul(Minv, expr_mat_mul(hinv, expr_mat_transpose(Minv)));
    }
    throw Error("connection", "metric '" + name_ + "' cannot be expressed on that coframe");
}

// ---------------------------------------------------------------- smooth map

void SmoothMap::set_exprs(const Chart& src_chart, const Chart& dst_chart,
                          std::vector<Expr> exprs) {
    if (static_cast<int>(exprs.size()) != dst_->dim())
        throw Error("connection", "map expression count must match the target dimension");
    for (Expr& e : exprs) e = canonicalize(e);
    exprs_[{&src_chart, &dst_chart}] = std::move(exprs);
}

const std::vector<Expr>* SmoothMap::exprs(const Chart& src_chart, const Chart& dst_chart) const {
    auto it = exprs_.find({&src_chart, &dst_chart});
    return it == exprs_.end() ? nullptr : &it->second;
}

Metric pullback_metric(const Metric& h, const SmoothMap& f, Signature sig) {
    const Manifold* src = f.source();
    Metric g(src, sig, "pullback(" + h.name() + ")");
    int n = src->dim();
    int nd = f.target()->dim();
    bool any = false;
    for (auto& [charts, exprs] : f.all()) {
        const Chart* sc = charts.first;
        const Chart* dc = charts.second;
        const CoframeDef* dst_cf = f.target()->coordinate_coframe(*dc);
        if (!h.has_coframe(dst_cf)) continue;
        const ExprMat& H = h.comps(dst_cf);
        any = true;
        // substitute the map into the target components
        std::map<std::string, Expr> repl;
        for (int a = 0; a < nd; ++a) repl[dc->coords[static_cast<size_t>(a)]] = exprs[static_cast<size_t>(a)];
        ExprMat Hs(static_cast<size_t>(nd), std::vector<Expr>(static_cast<size_t>(nd)));
        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b)
                Hs[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                    substitute(H[static_cast<size_t>(a)][static_cast<size_t>(b)], repl);
        // Jacobian d f^a / d x^i
        ExprMat J(static_cast<size_t>(nd), std::vector<Expr>(static_cast<size_t>(n)));
        for (int a = 0; a < nd; ++a)
            for (int i = 0; i < n; ++i)
                J[static_cast<size_t>(a)][static_cast<size_t>(i)] =
                    differentiate(exprs[static_cast<size_t>(a)], sc->coords[static_cast<size_t>(i)]);
        ExprMat G = expr_mat_mul(expr_mat_transpose(J), expr_mat_mul(Hs, J));
        // trig parametrizations are common here; the rewrite set keeps the
        // components in the rational fragment when possible
        CanonOptions opts;
        opts.trig_rewrite = true;
        for (auto& row : G)
            for (Expr& e : row) e = canonicalize(e, opts);
        g.set_comps(src->coordinate_coframe(*sc), std::move(G));
    }
    if (!any) throw Error("connection", "no chart pair with metric components available");
    return g;
}

// ---------------------------------------------------------------- Levi-Civita

std::unique_ptr<BundleConnection> levi_civita(const Metric& g, const VectorBundle& tangent) {
    const Manifold* m = g.manifold();
    if (tangent.base() != m) throw Error("connection", "tangent bundle base mismatch");
    int n = m->dim();
    auto conn = std::make_unique<BundleConnection>(&tangent, "nabla_" + g.name());

    // charts where metric components are obtainable
    std::vector<const Chart*> done;
    for (const CoframeDef* cf : g.coframes()) {
        const Chart* chart = cf->chart;
        if (std::find(done.begin(), done.end(), chart) != done.end()) continue;
        done.push_back(chart);
        const CoframeDef* ccf = m->coordinate_coframe(*chart);
        ExprMat G = g.comps_on(ccf);
        ExprMat Ginv = g.inverse_comps_on(ccf);

        // dG[k][i][j] = d g_ij / d x^k
        std::vector<ExprMat> dG(static_cast<size_t>(n),
                                ExprMat(static_cast<size_t>(n), std::vector<Expr>(static_cast<size_t>(n))));
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    Expr d = differentiate(G[static_cast<size_t>(i)][static_cast<size_t>(j)],
                                           chart->coords[static_cast<size_t>(k)]);
                    dG[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
                    dG[static_cast<size_t>(k)][static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
                }

        // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
        const LocalFrame* frame = nullptr;
        for (const LocalFrame* f : tangent.frames())
            if (f->coframe == ccf) frame = f;
        if (!frame)
            throw Error("connection", "tangent bundle has no frame for chart '" + chart->name + "'");

        std::vector<std::vector<std::vector<Expr>>> Gamma(
            static_cast<size_t>(n),
            std::vector<std::vector<Expr>>(static_cast<size_t>(n),
                                           std::vector<Expr>(static_cast<size_t>(n), num(0))));
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                // first-kind symbols for the pair (i,j)
                std::vector<Expr> first(static_cast<size_t>(n));
                for (int l = 0; l < n; ++l) {
                    first[static_cast<size_t>(l)] =
                        (dG[static_cast<size_t>(i)][static_cast<size_t>(j)][static_cast<size_t>(l)] +
                         dG[static_cast<size_t>(j)][static_cast<size_t>(i)][static_cast<size_t>(l)] -
                         dG[static_cast<size_t>(l)][static_cast<size_t>(i)][static_cast<size_t>(j)]) *
                        num(1, 2);
                }
                for (int k = 0; k < n; ++k) {
                    Expr acc = num(0);
                    for (int l = 0; l < n; ++l)
                        acc = acc + Ginv[static_cast<size_t>(k)][static_cast<size_t>(l)] *
                                        first[static_cast<size_t>(l)];
                    Gamma[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
                    Gamma[static_cast<size_t>(k)][static_cast<size_t>(j)][static_cast<size_t>(i)] = acc;
                }
            }
        }

        // omega^j_i = Gamma^j_{ki} dx^k
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                DiffForm w(m, 1);
                for (int k = 0; k < n; ++k)
                    w.set_comp(ccf, {k},
                               Gamma[static_cast<size_t>(j)][static_cast<size_t>(k)][static_cast<size_t>(i)]);
                if (!form_is_zero(w)) conn->set_form(*frame, j, i, std::move(w));
            }
        }
    }
    return conn;
}

} // namespace cw
