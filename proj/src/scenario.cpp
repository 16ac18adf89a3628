#include "cw/scenario.hpp"
#include "cw/canon.hpp"
#include "cw/numeric.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cw {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// splits on the separator at parenthesis depth zero
std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("scenario", "cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

Scenario Scenario::parse_text(const std::string& text, const std::string& filename) {
    Scenario sc;
    sc.file_ = filename;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    Section* current = nullptr;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ScenarioError("malformed section header", filename, lineno);
            std::string inner = trim(t.substr(1, t.size() - 2));
            if (inner.empty()) throw ScenarioError("empty section header", filename, lineno);
            Section s;
            auto dot = inner.find('.');
            s.kind = dot == std::string::npos ? inner : inner.substr(0, dot);
            s.name = dot == std::string::npos ? "" : inner.substr(dot + 1);
            s.line = lineno;
            sc.sections_.push_back(std::move(s));
            current = &sc.sections_.back();
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("expected 'key = value'", filename, lineno);
        if (!current) throw ScenarioError("key outside of any section", filename, lineno);
        Entry e;
        e.key = trim(t.substr(0, eq));
        e.value = trim(t.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty()) throw ScenarioError("empty key", filename, lineno);
        current->entries.push_back(std::move(e));
    }
    return sc;
}

VectorBundle* Scenario::bundle(const std::string& name) {
    auto it = bundles_.find(name);
    return it == bundles_.end() ? nullptr : it->second.get();
}

BundleConnection* Scenario::connection(const std::string& name) {
    auto it = connections_.find(name);
    return it == connections_.end() ? nullptr : it->second.get();
}

// ------------------------------------------------------------ execution

struct ScenarioExec {
    Scenario& sc;
    const ScenarioOptions& opts;
    RunResult out;
    std::map<std::string, size_t> by_name; // index into out.forms
    std::map<std::string, std::unique_ptr<cw::Section>> sections_store_;

    using Section = Scenario::Section;
    using Entry = Scenario::Entry;

    ScenarioError err(const Section& s, const std::string& msg, int line = 0) {
        return ScenarioError("[" + s.kind + (s.name.empty() ? "" : "." + s.name) + "] " + msg,
                             sc.file_, line ? line : s.line);
    }

    const Entry* find(const Section& s, const std::string& key) {
        for (const Entry& e : s.entries)
            if (e.key == key) return &e;
        return nullptr;
    }

    std::string need(const Section& s, const std::string& key) {
        const Entry* e = find(s, key);
        if (!e) throw err(s, "missing key '" + key + "'");
        return e->value;
    }

    std::string get_or(const Section& s, const std::string& key, const std::string& dflt) {
        const Entry* e = find(s, key);
        return e ? e->value : dflt;
    }

    Expr expr(const Section& s, const std::string& text, int line) {
        try {
            return parse_expr(text, &sc.symbols_);
        } catch (const SyntaxError& e) {
            throw err(s, std::string("bad expression: ") + e.what(), line);
        } catch (const Error& e) {
            throw err(s, e.what(), line);
        }
    }

    std::vector<Expr> expr_list(const Section& s, const std::string& text, int line) {
        std::vector<Expr> out;
        for (const std::string& part : split_top_level(text, ','))
            out.push_back(expr(s, part, line));
        return out;
    }

    std::vector<Restriction> restrictions(const Section& s, const std::string& text, int line) {
        std::vector<Restriction> out;
        for (const std::string& part : split_top_level(text, ';')) {
            Restriction r;
            size_t pos;
            if ((pos = part.find("!=")) != std::string::npos) r.rel = Restriction::NotEqual;
            else if ((pos = part.find('>')) != std::string::npos) r.rel = Restriction::Greater;
            else if ((pos = part.find('<')) != std::string::npos) r.rel = Restriction::Less;
            else throw err(s, "restriction needs one of !=, >, <", line);
            std::string lhs = trim(part.substr(0, pos));
            std::string rhs = trim(part.substr(pos + (r.rel == Restriction::NotEqual ? 2 : 1)));
            r.lhs = expr(s, lhs, line) - expr(s, rhs, line);
            out.push_back(std::move(r));
        }
        return out;
    }

    const Chart* need_chart(const Section& s, const std::string& name, int line = 0) {
        const Chart* c = sc.manifold_ ? sc.manifold_->chart(name) : nullptr;
        if (!c) throw err(s, "unknown chart '" + name + "'", line);
        return c;
    }

    // ---------------------------------------------------------- sections

    void run() {
        for (const Section& s : sc.sections_) {
            if (s.kind == "manifold") do_manifold(s);
            else if (s.kind == "subset") do_subset(s);
            else if (s.kind == "union") do_union(s);
            else if (s.kind == "intersection") do_intersection(s);
            else if (s.kind == "chart") do_chart(s);
            else if (s.kind == "transition") do_transition(s);
            else if (s.kind == "coframe") do_coframe(s);
            else if (s.kind == "bundle") do_bundle(s);
            else if (s.kind == "frame") do_frame(s);
            else if (s.kind == "frame_change") do_frame_change(s);
            else if (s.kind == "section") do_section(s);
            else if (s.kind == "metric") do_metric(s);
            else if (s.kind == "connection") do_connection(s);
            else if (s.kind == "class") do_class(s);
            else if (s.kind == "compute") do_compute(s);
            else if (s.kind == "integrate") do_integrate(s);
            else throw err(s, "unknown section kind '" + s.kind + "'");
        }
        if (!opts.integrate_form.empty()) run_cli_integral();
        render();
    }

    void do_manifold(const Section& s) {
        if (sc.manifold_) throw err(s, "manifold already declared");
        int dim = 0;
        try {
            dim = std::stoi(need(s, "dim"));
        } catch (...) {
            throw err(s, "bad dimension");
        }
        sc.manifold_ = std::make_unique<Manifold>(need(s, "name"), dim);
    }

    void require_manifold(const Section& s) {
        if (!sc.manifold_) throw err(s, "no [manifold] declared yet");
    }

    void do_subset(const Section& s) {
        require_manifold(s);
        sc.manifold_->declare_subset(s.name, get_or(s, "parent", ""));
    }

    void do_union(const Section& s) {
        require_manifold(s);
        std::vector<std::string> parts = split_top_level(need(s, "parts"), ',');
        sc.manifold_->declare_union(get_or(s, "parent", ""), parts);
    }

    void do_intersection(const Section& s) {
        require_manifold(s);
        std::vector<std::string> of = split_top_level(need(s, "of"), ',');
        if (of.size() != 2) throw err(s, "'of' needs exactly two subsets");
        sc.manifold_->declare_intersection(of[0], of[1], s.name);
    }

    void do_chart(const Section& s) {
        require_manifold(s);
        std::vector<std::string> coords = split_top_level(need(s, "coords"), ',');
        std::vector<Restriction> rs;
        if (const Entry* e = find(s, "restrictions")) rs = restrictions(s, e->value, e->line);
        try {
            sc.manifold_->add_chart(s.name, get_or(s, "domain", ""), coords, rs);
        } catch (const Error& e) {
            throw err(s, e.what());
        }
    }

    void do_transition(const Section& s) {
        require_manifold(s);
        const Chart* from = need_chart(s, need(s, "from"));
        const Chart* to = need_chart(s, need(s, "to"));
        const Entry* f = find(s, "forward");
        const Entry* i = find(s, "inverse");
        if (!f || !i) throw err(s, "transition needs 'forward' and 'inverse'");
        try {
            sc.manifold_->add_transition(*from, *to, expr_list(s, f->value, f->line),
                                         expr_list(s, i->value, i->line));
        } catch (const Error& e) {
            throw err(s, e.what());
        }
    }

    void do_coframe(const Section& s) {
        require_manifold(s);
        const Chart* chart = need_chart(s, need(s, "chart"));
        int n = sc.manifold_->dim();
        ExprMat P(static_cast<size_t>(n), std::vector<Expr>(static_cast<size_t>(n), num(0)));
        for (int r = 0; r < n; ++r) {
            const Entry* e = find(s, "row." + std::to_string(r));
            if (!e) throw err(s, "missing row." + std::to_string(r));
            std::vector<Expr> row = expr_list(s, e->value, e->line);
            if (static_cast<int>(row.size()) != n) throw err(s, "row length mismatch", e->line);
            for (int c = 0; c < n; ++c) P[static_cast<size_t>(r)][static_cast<size_t>(c)] = row[static_cast<size_t>(c)];
        }
        try {
            sc.manifold_->register_coframe(s.name, *chart, std::move(P), get_or(s, "domain", ""));
        } catch (const Error& e) {
            throw err(s, e.what());
        }
    }

    void do_bundle(const Section& s) {
        require_manifold(s);
        std::string name = get_or(s, "name", s.name);
        if (get_or(s, "tangent", "false") == "true") {
            auto tb = VectorBundle::tangent(*sc.manifold_);
            // abstract coframes become frames linked to their chart frame
            for (const Section& cs : sc.sections_) {
                if (cs.kind != "coframe") continue;
                const CoframeDef* cf = sc.manifold_->coframe(cs.name);
                if (!cf) continue;
                const LocalFrame& abs = tb->add_frame(cs.name, cf->domain, cf);
                const LocalFrame* chart_frame = tb->frame(cf->chart->name);
                if (chart_frame) {
                    std::map<const Chart*, ExprMat> g;
                    g[cf->chart] = cf->frame_matrix;
                    // e_abs = e_chart * P
                    tb->set_frame_change(abs, *chart_frame, g);
                }
            }
            sc.bundles_[name.empty() ? tb->name() : name] = std::move(tb);
            return;
        }
        int rank = 0;
        try {
            rank = std::stoi(need(s, "rank"));
        } catch (...) {
            throw err(s, "bad rank");
        }
        std::string field = get_or(s, "field", "real");
        if (field != "real" && field != "complex") throw err(s, "field must be real or complex");
        sc.bundles_[name] = std::make_unique<VectorBundle>(
            sc.manifold_.get(), rank, field == "complex" ? FieldKind::Complex : FieldKind::Real,
            name);
    }

    VectorBundle* need_bundle(const Section& s, const std::string& name) {
        VectorBundle* b = sc.bundle(name);
        if (!b) throw err(s, "unknown bundle '" + name + "'");
        return b;
    }

    void do_frame(const Section& s) {
        VectorBundle* b = need_bundle(s, need(s, "bundle"));
        const CoframeDef* cf = nullptr;
        if (const Entry* e = find(s, "coframe")) {
            cf = sc.manifold_->coframe(e->value);
            if (!cf) {
                const Chart* c = sc.manifold_->chart(e->value);
                if (c) cf = sc.manifold_->coordinate_coframe(*c);
            }
            if (!cf) throw err(s, "unknown coframe '" + e->value + "'", e->line);
        }
        b->add_frame(s.name, get_or(s, "domain", ""), cf);
    }

    const LocalFrame* need_frame(const Section& s, const VectorBundle* b, const std::string& name,
                                 int line = 0) {
        const LocalFrame* f = b->frame(name);
        if (!f) throw err(s, "unknown frame '" + name + "'", line);
        return f;
    }

    void do_frame_change(const Section& s) {
        VectorBundle* b = need_bundle(s, need(s, "bundle"));
        const LocalFrame* from = need_frame(s, b, need(s, "from"));
        const LocalFrame* to = need_frame(s, b, need(s, "to"));
        std::map<const Chart*, ExprMat> g;
        for (const Entry& e : s.entries) {
            if (e.key.rfind("entry.", 0) != 0) continue;
            // entry.<i>.<j>@<chart>
            std::string rest = e.key.substr(6);
            auto at = rest.find('@');
            if (at == std::string::npos) throw err(s, "entry key needs @chart", e.line);
            std::string ij = rest.substr(0, at);
            const Chart* chart = need_chart(s, rest.substr(at + 1), e.line);
            auto dot = ij.find('.');
            if (dot == std::string::npos) throw err(s, "entry key needs i.j indices", e.line);
            int i = std::stoi(ij.substr(0, dot));
            int j = std::stoi(ij.substr(dot + 1));
            auto& mat = g[chart];
            if (mat.empty())
                mat.assign(static_cast<size_t>(b->rank()),
                           std::vector<Expr>(static_cast<size_t>(b->rank()), num(0)));
            mat.at(static_cast<size_t>(i)).at(static_cast<size_t>(j)) = expr(s, e.value, e.line);
        }
        if (g.empty()) throw err(s, "no entries given");
        try {
            b->set_frame_change(*from, *to, g);
        } catch (const Error& e) {
            throw err(s, e.what());
        }
    }

    void do_section(const Section& s) {
        VectorBundle* b = need_bundle(s, need(s, "bundle"));
        const LocalFrame* frame = need_frame(s, b, need(s, "frame"));
        const Chart* chart = need_chart(s, need(s, "chart"));
        const Entry* comps = find(s, "comps");
        if (!comps) throw err(s, "missing comps");
        std::vector<Expr> values = expr_list(s, comps->value, comps->line);
        if (static_cast<int>(values.size()) != b->rank())
            throw err(s, "component count must equal the rank", comps->line);
        auto sect = std::make_unique<cw::Section>(b, s.name);
        for (int i = 0; i < b->rank(); ++i) sect->set_comp(*frame, *chart, i, values[static_cast<size_t>(i)]);
        sections_store_[s.name] = std::move(sect);
    }

    void do_metric(const Section& s) {
        require_manifold(s);
        std::string sig = get_or(s, "signature", "riemannian");
        auto metric = std::make_unique<Metric>(
            sc.manifold_.get(), sig == "lorentzian" ? Signature::Lorentzian : Signature::Riemannian,
            s.name);
        // group entries by coframe: entry.<i>.<j>@<coframe> = expr; the
        // coframe may also be given once with 'coframe = NAME'
        std::string default_cf = get_or(s, "coframe", "");
        std::map<const CoframeDef*, ExprMat> mats;
        int n = sc.manifold_->dim();
        auto cf_of = [&](const std::string& name, int line) -> const CoframeDef* {
            const CoframeDef* cf = sc.manifold_->coframe(name);
            if (!cf) {
                const Chart* c = sc.manifold_->chart(name);
                if (c) cf = sc.manifold_->coordinate_coframe(*c);
            }
            if (!cf) throw err(s, "unknown coframe '" + name + "'", line);
            return cf;
        };
        for (const Entry& e : s.entries) {
            if (e.key.rfind("entry.", 0) != 0) continue;
            std::string rest = e.key.substr(6);
            std::string cfname = default_cf;
            auto at = rest.find('@');
            if (at != std::string::npos) {
                cfname = rest.substr(at + 1);
                rest = rest.substr(0, at);
            }
            if (cfname.empty()) throw err(s, "no coframe for entry", e.line);
            auto dot = rest.find('.');
            int i = std::stoi(rest.substr(0, dot));
            int j = std::stoi(rest.substr(dot + 1));
            const CoframeDef* cf = cf_of(cfname, e.line);
            auto& mat = mats[cf];
            if (mat.empty())
                mat.assign(static_cast<size_t>(n), std::vector<Expr>(static_cast<size_t>(n), num(0)));
            Expr v = expr(s, e.value, e.line);
            mat.at(static_cast<size_t>(i)).at(static_cast<size_t>(j)) = v;
            mat.at(static_cast<size_t>(j)).at(static_cast<size_t>(i)) = v;
        }
        if (mats.empty()) throw err(s, "metric has no entries");
        for (auto& [cf, mat] : mats) {
            try {
                metric->set_comps(cf, mat);
            } catch (const Error& e) {
                throw err(s, e.what());
            }
        }
        sc.metrics_[s.name] = std::move(metric);
    }

    void do_connection(const Section& s) {
        if (const Entry* me = find(s, "metric")) {
            auto it = sc.metrics_.find(me->value);
            if (it == sc.metrics_.end()) throw err(s, "unknown metric '" + me->value + "'", me->line);
            VectorBundle* tb = need_bundle(s, need(s, "bundle"));
            try {
                auto conn = levi_civita(*it->second, *tb);
                sc.connections_[s.name] = std::move(conn);
            } catch (const Error& e) {
                throw err(s, e.what());
            }
            return;
        }
        VectorBundle* b = need_bundle(s, need(s, "bundle"));
        const LocalFrame* frame = need_frame(s, b, need(s, "frame"));
        const Chart* chart = need_chart(s, need(s, "chart"));
        const CoframeDef* cf = sc.manifold_->coordinate_coframe(*chart);
        auto conn = std::make_unique<BundleConnection>(b, s.name);
        bool any = false;
        for (const Entry& e : s.entries) {
            if (e.key.rfind("omega.", 0) != 0) continue;
            std::string rest = e.key.substr(6);
            auto dot = rest.find('.');
            if (dot == std::string::npos) throw err(s, "omega key needs i.j indices", e.line);
            int i = std::stoi(rest.substr(0, dot));
            int j = std::stoi(rest.substr(dot + 1));
            std::vector<Expr> coeffs = expr_list(s, e.value, e.line);
            if (static_cast<int>(coeffs.size()) != sc.manifold_->dim())
                throw err(s, "need one coefficient per coordinate differential", e.line);
            DiffForm w(sc.manifold_.get(), 1);
            for (int k = 0; k < sc.manifold_->dim(); ++k)
                w.set_comp(cf, {k}, coeffs[static_cast<size_t>(k)]);
            conn->set_form(*frame, i, j, std::move(w));
            any = true;
        }
        if (!any) {
            // an explicitly flat connection still marks the frame
            conn->set_form(*frame, 0, 0, DiffForm(sc.manifold_.get(), 1));
        }
        sc.connections_[s.name] = std::move(conn);
    }

    void do_class(const Section& s) {
        VectorBundle* b = need_bundle(s, need(s, "bundle"));
        try {
            if (const Entry* p = find(s, "predefined")) {
                sc.classes_[s.name] = CharClass::predefined(p->value, b);
                return;
            }
            std::string type = need(s, "type");
            ClassType t;
            if (type == "multiplicative") t = ClassType::Multiplicative;
            else if (type == "additive") t = ClassType::Additive;
            else if (type == "pfaffian") t = ClassType::Pfaffian;
            else throw err(s, "type must be multiplicative, additive or pfaffian");
            const Entry* g = find(s, "g");
            if (!g) throw err(s, "custom class needs g = <expression>");
            sc.classes_[s.name] = CharClass::get(b, t, expr(s, g->value, g->line), s.name);
        } catch (const ScenarioError&) {
            throw;
        } catch (const Error& e) {
            throw err(s, e.what());
        }
    }

    void do_compute(const Section& s) {
        if (get_or(s, "long", "false") == "true" && !opts.long_mode) {
            ComputedForm skipped;
            skipped.name = s.name;
            skipped.class_name = get_or(s, "class", "");
            skipped.skipped_long = true;
            skipped.form = MixedForm(sc.manifold_.get(), s.name);
            out.forms.push_back(std::move(skipped));
            by_name[s.name] = out.forms.size() - 1;
            return;
        }
        auto cit = sc.classes_.find(need(s, "class"));
        if (cit == sc.classes_.end()) throw err(s, "unknown class");
        auto nit = sc.connections_.find(need(s, "connection"));
        if (nit == sc.connections_.end()) throw err(s, "unknown connection");
        const CharClass& cls = *cit->second;
        BundleConnection& conn = *nit->second;

        std::vector<const LocalFrame*> frames;
        if (const Entry* fe = find(s, "frames")) {
            for (const std::string& fn : split_top_level(fe->value, ','))
                frames.push_back(need_frame(s, cls.bundle(), fn, fe->line));
        }

        const CoframeDef* display = nullptr;
        if (const Entry* de = find(s, "display_coframe")) {
            display = sc.manifold_->coframe(de->value);
            if (!display) {
                const Chart* c = sc.manifold_->chart(de->value);
                if (c) display = sc.manifold_->coordinate_coframe(*c);
            }
            if (!display) throw err(s, "unknown display coframe", de->line);
        }

        try {
            MixedForm form;
            if (!frames.empty()) {
                // a frame list routes curvature matrices through the
                // explicit-dictionary entry point
                std::map<const LocalFrame*, CurvatureMatrix> ov;
                for (const LocalFrame* f : frames) ov[f] = curvature_from_connection(conn, *f);
                form = cls.get_form(conn, &ov);
            } else {
                form = cls.get_form(conn);
            }
            form.rename(s.name);
            ComputedForm cf;
            cf.name = s.name;
            cf.class_name = cit->first;
            cf.form = std::move(form);
            cf.display = display;
            out.forms.push_back(std::move(cf));
            by_name[s.name] = out.forms.size() - 1;
        } catch (const Error& e) {
            throw Error("scenario", "[compute." + s.name + "] " + e.what());
        }
    }

    AxisBounds parse_bounds(const Section& s, const std::string& text, int line) {
        std::string t = trim(text);
        if (t == "inf" || t == "-inf..inf") return AxisBounds::whole_line();
        auto dots = t.find("..");
        if (dots == std::string::npos) throw err(s, "bounds must be lo..hi or inf", line);
        std::string lo = trim(t.substr(0, dots));
        std::string hi = trim(t.substr(dots + 2));
        AxisBounds b;
        if (lo == "-inf") b.lo_infinite = true;
        else b.lo = std::stod(lo);
        if (hi == "inf") b.hi_infinite = true;
        else b.hi = std::stod(hi);
        return b;
    }

    void do_integrate(const Section& s) {
        std::string formname = need(s, "compute");
        auto it = by_name.find(formname);
        if (it == by_name.end()) throw err(s, "unknown computed form '" + formname + "'");
        const ComputedForm& src = out.forms[it->second];
        if (src.skipped_long) return;
        const Chart* chart = need_chart(s, need(s, "chart"));
        const Entry* be = find(s, "bounds");
        if (!be) throw err(s, "missing bounds");
        std::vector<AxisBounds> bounds;
        for (const std::string& part : split_top_level(be->value, ','))
            bounds.push_back(parse_bounds(s, part, be->line));
        int degree = sc.manifold_->dim();
        if (const Entry* de = find(s, "degree")) degree = std::stoi(de->value);

        IntegrationTask task;
        task.form = src.form[degree];
        task.chart = chart;
        task.bounds = std::move(bounds);
        task.tolerance = opts.tolerance > 0 ? opts.tolerance
                                            : std::stod(get_or(s, "tolerance", "1e-4"));
        try {
            ComputedIntegral ci;
            ci.name = s.name;
            ci.form_name = formname;
            ci.degree = degree;
            ci.result = integrate_top_form(task);
            out.integrals.push_back(std::move(ci));
        } catch (const Error& e) {
            throw Error("scenario", "[integrate." + s.name + "] " + e.what());
        }
    }

    void run_cli_integral() {
        auto it = by_name.find(opts.integrate_form);
        if (it == by_name.end())
            throw Error("scenario", "--integrate: unknown computed form '" + opts.integrate_form + "'");
        const ComputedForm& src = out.forms[it->second];
        const Chart* chart = sc.manifold_->chart(opts.integrate_chart);
        if (!chart)
            throw Error("scenario", "--integrate: unknown chart '" + opts.integrate_chart + "'");
        std::vector<AxisBounds> bounds(static_cast<size_t>(sc.manifold_->dim()),
                                       AxisBounds::whole_line());
        for (const std::string& spec : opts.integrate_bounds) {
            auto eq = spec.find('=');
            if (eq == std::string::npos)
                throw Error("scenario", "--bounds needs axis=lo..hi or axis=inf");
            std::string axis = trim(spec.substr(0, eq));
            std::string range = trim(spec.substr(eq + 1));
            int idx = chart->index_of(axis);
            if (range == "inf") {
                bounds[static_cast<size_t>(idx)] = AxisBounds::whole_line();
            } else {
                auto dots = range.find("..");
                if (dots == std::string::npos)
                    throw Error("scenario", "--bounds needs axis=lo..hi or axis=inf");
                AxisBounds b;
                std::string lo = range.substr(0, dots), hi = range.substr(dots + 2);
                if (lo == "-inf") b.lo_infinite = true;
                else b.lo = std::stod(lo);
                if (hi == "inf") b.hi_infinite = true;
                else b.hi = std::stod(hi);
                bounds[static_cast<size_t>(idx)] = b;
            }
        }
        IntegrationTask task;
        task.form = src.form[sc.manifold_->dim()];
        task.chart = chart;
        task.bounds = std::move(bounds);
        task.tolerance = opts.tolerance > 0 ? opts.tolerance : 1e-4;
        ComputedIntegral ci;
        ci.name = opts.integrate_form;
        ci.form_name = opts.integrate_form;
        ci.degree = sc.manifold_->dim();
        ci.result = integrate_top_form(task);
        out.integrals.push_back(std::move(ci));
    }

    // ---------------------------------------------------------- rendering

    void render() {
        if (opts.output == "json") render_json();
        else if (opts.output == "latex") render_latex();
        else render_text();
    }

    void render_text() {
        std::ostringstream os;
        for (const ComputedForm& f : out.forms) {
            if (f.skipped_long) {
                os << f.name << ": skipped (enable with --long)\n";
                continue;
            }
            os << display_expansion(f.form, f.display) << "\n";
        }
        for (const ComputedIntegral& i : out.integrals) {
            os << "integral " << i.name << " = " << fmt_double(i.result.value) << " ± "
               << fmt_double(i.result.error_estimate) << "\n";
        }
        out.rendered = os.str();
    }

    void render_json() {
        nlohmann::ordered_json doc;
        doc["computes"] = nlohmann::ordered_json::array();
        for (const ComputedForm& f : out.forms) {
            nlohmann::ordered_json jf;
            jf["name"] = f.name;
            jf["class"] = f.class_name;
            if (f.skipped_long) {
                jf["skipped"] = true;
                doc["computes"].push_back(jf);
                continue;
            }
            nlohmann::ordered_json degrees;
            const Manifold* m = f.form.manifold();
            for (int k = 0; k <= m->dim(); ++k) {
                nlohmann::ordered_json comp;
                DiffForm part = f.form[k];
                const CoframeDef* cf = nullptr;
                if (f.display && !form_is_zero(part)) {
                    DiffForm converted;
                    if (obtain_form_on(part, f.display, converted)) {
                        part = std::move(converted);
                        cf = f.display;
                    }
                }
                if (!cf && !part.coframes().empty()) cf = part.coframes().front();
                if (cf) {
                    for (auto& [idx, v] : part.comps(cf)) {
                        std::string key;
                        for (size_t i = 0; i < idx.size(); ++i) {
                            if (i) key += ",";
                            key += std::to_string(idx[i]);
                        }
                        if (idx.empty()) key = "scalar";
                        comp[key] = to_text(v);
                    }
                    comp["coframe"] = cf->name;
                }
                degrees[std::to_string(k)] = comp;
            }
            jf["expansion"] = degrees;
            doc["computes"].push_back(jf);
        }
        doc["integrals"] = nlohmann::ordered_json::array();
        for (const ComputedIntegral& i : out.integrals) {
            nlohmann::ordered_json ji;
            ji["name"] = i.name;
            ji["form"] = i.form_name;
            ji["degree"] = i.degree;
            ji["value"] = fmt_double(i.result.value);
            ji["error_estimate"] = fmt_double(i.result.error_estimate);
            doc["integrals"].push_back(ji);
        }
        out.rendered = doc.dump(2) + "\n";
    }

    void render_latex() {
        std::ostringstream os;
        for (const ComputedForm& f : out.forms) {
            if (f.skipped_long) continue;
            os << "\\[" << f.name << " = ";
            const Manifold* m = f.form.manifold();
            for (int k = 0; k <= m->dim(); ++k) {
                if (k) os << " + ";
                DiffForm part = f.form[k];
                const CoframeDef* cf = nullptr;
                if (f.display && !form_is_zero(part)) {
                    DiffForm converted;
                    if (obtain_form_on(part, f.display, converted)) {
                        part = std::move(converted);
                        cf = f.display;
                    }
                }
                if (!cf && !part.coframes().empty()) cf = part.coframes().front();
                os << "\\left[";
                if (!cf) {
                    os << "0";
                } else {
                    bool first = true;
                    for (auto& [idx, v] : part.comps(cf)) {
                        if (!first) os << " + ";
                        first = false;
                        if (idx.empty()) {
                            os << to_latex(v);
                            continue;
                        }
                        os << "\\left(" << to_latex(v) << "\\right) ";
                        for (size_t i = 0; i < idx.size(); ++i) {
                            if (i) os << "\\wedge ";
                            std::string sym = cf->covector_symbol(idx[i]);
                            if (!sym.empty() && sym[0] == 'd')
                                os << "\\mathrm{d}" << sym.substr(1) << " ";
                            else
                                os << sym << " ";
                        }
                    }
                    if (first) os << "0";
                }
                os << "\\right]_{" << k << "}";
            }
            os << "\\]\n";
        }
        for (const ComputedIntegral& i : out.integrals) {
            os << "\\[\\int " << i.form_name << " = " << fmt_double(i.result.value) << " \\pm "
               << fmt_double(i.result.error_estimate) << "\\]\n";
        }
        out.rendered = os.str();
    }
};

RunResult Scenario::run(const ScenarioOptions& opts) {
    set_default_sampling_seed(opts.seed);
    ScenarioExec exec{*this, opts, {}, {}};
    exec.run();
    return std::move(exec.out);
}

} // namespace cw
