// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion.
#include "cw/bundle.hpp"
#include "cw/canon.hpp"
#include "cw/charclass.hpp"
#include "cw/numeric.hpp"
#include "cw/scenario.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>

using namespace cw;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& label, bool pass, const std::string& detail = "") {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << label;
    if (!detail.empty()) std::cout << " — " << detail;
    std::cout << "\n" << std::flush;
    if (!pass) ++g_failures;
}

Expr P(const std::string& s) {
    SymbolTable st;
    return parse_expr(s, &st);
}

std::string scn(const std::string& name) { return std::string(SCENARIO_DIR) + "/" + name; }

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ------------------------------------------------------------ criteria

void criterion_1() {
    auto t0 = Clock::now();
    Scenario sc = Scenario::load(scn("minkowski_ch.scn"));
    RunResult r = sc.run();
    const MixedForm& form = r.forms.at(0).form;
    const Manifold* m = form.manifold();
    const CoframeDef* cf = m->coordinate_coframe(*m->chart("X"));
    bool ok = canonically_equal(form[0].comp(cf, {}), num(1)) && form_is_zero(form[1]) &&
              canonically_equal(form[2].comp(cf, {0, 1}), P("A'(t)/(2*pi)"));
    double secs = seconds_since(t0);
    report("criterion 1: Minkowski Chern character matches 1 + (A'(t)/2pi) dt^dx",
           ok && secs < 1.0,
           "runtime " + std::to_string(secs) + " s (budget 1 s)");
}

void criterion_2() {
    auto t0 = Clock::now();
    Scenario sc = Scenario::load(scn("taut_c1.scn"));
    RunResult r = sc.run();
    const MixedForm& form = r.forms.at(0).form;
    const Manifold* m = form.manifold();
    const CoframeDef* cf = m->coordinate_coframe(*m->chart("comp"));
    bool form_ok = canonically_equal(form[2].comp(cf, {0, 1}), P("I/(2*pi*(1+z*zbar)^2)"));
    double integral = r.integrals.at(0).result.value;
    bool int_ok = std::abs(integral - 1.0) <= 1e-3;
    double secs = seconds_since(t0);
    report("criterion 2: tautological line bundle c1 form and integral = 1 ± 1e-3",
           form_ok && int_ok && secs < 30.0,
           "integral " + std::to_string(integral) + ", runtime " + std::to_string(secs) +
               " s (budget 30 s)");
}

void criterion_3() {
    auto t0 = Clock::now();
    Scenario sc = Scenario::load(scn("s2_euler.scn"));
    RunResult r = sc.run();

    // curvature check straight from the library path
    Manifold* m = sc.manifold();
    const Chart* N = m->chart("N");
    const CoframeDef* cf = m->coordinate_coframe(*N);

    Metric g(m, Signature::Riemannian, "g");
    Expr lam = P("4/(1+x^2+y^2)^2");
    g.set_comps(cf, {{lam, num(0)}, {num(0), lam}});
    auto tb = VectorBundle::tangent(*m);
    auto conn = levi_civita(g, *tb);
    CurvatureMatrix omega = curvature_from_connection(*conn, *tb->frame("N"));
    bool curv_ok = canonically_equal(omega.entries[0][1].comp(cf, {0, 1}), P("4/(1+x^2+y^2)^2")) &&
                   forms_equal(omega.entries[1][0], form_neg(omega.entries[0][1]));

    const MixedForm& form = r.forms.at(0).form;
    bool top_ok = canonically_equal(form[2].comp(cf, {0, 1}), P("2/(pi*(1+x^2+y^2)^2)"));
    double integral = r.integrals.at(0).result.value;
    bool int_ok = std::abs(integral - 2.0) <= 1e-3;
    double secs = seconds_since(t0);
    report("criterion 3: S^2 Euler form (curvature, top component, integral = 2 ± 1e-3)",
           curv_ok && top_ok && int_ok && secs < 60.0,
           "integral " + std::to_string(integral) + ", runtime " + std::to_string(secs) +
               " s (budget 60 s)");
}

void criterion_4() {
    Scenario sc = Scenario::load(scn("s2_euler_conformal.scn"));
    RunResult r = sc.run();
    double integral = r.integrals.at(0).result.value;
    report("criterion 4: conformally perturbed metric keeps the Euler integral = 2 ± 1e-2",
           std::abs(integral - 2.0) <= 1e-2, "integral " + std::to_string(integral));
}

void criterion_5() {
    auto t0 = Clock::now();
    ScenarioOptions opts;
    opts.long_mode = true;
    Scenario sc = Scenario::load(scn("berger_ahat.scn"));
    RunResult r = sc.run(opts);
    const MixedForm& form = r.forms.at(0).form;
    const Manifold* m = form.manifold();
    const CoframeDef* eps = m->coframe("eps");
    DiffForm top = change_coframe(form[4], eps);
    Expr coeff = top.comp(eps, {0, 1, 2, 3});
    Expr paper = P("(4*(a(t)^3 - a(t))*a'(t) - a'(t)*a''(t))/(24*pi^2)");

    EvalContext ctx;
    ctx.implement("a", 0, [](const std::vector<Complex>& v) { return 2.0 + std::sin(v[0]); });
    ctx.implement("a", 1, [](const std::vector<Complex>& v) { return std::cos(v[0]); });
    ctx.implement("a", 2, [](const std::vector<Complex>& v) { return -std::sin(v[0]); });
    EqualResult eq = equal_sym(coeff, paper, 20, 1e-8, 20260808, &ctx);
    double secs = seconds_since(t0);
    report("criterion 5 (correctness): Berger A-hat degree-4 coefficient matches the closed form",
           eq.equal, std::string(eq.exact ? "canonically equal" : "probabilistic at 1e-8") +
                         ", runtime " + std::to_string(secs) + " s");
    report("criterion 5 (performance): within the 15 min budget", secs < 900.0,
           std::to_string(secs) + " s");
    // closedness of the A-hat form rides along
    report("criterion 5 (closedness): d(A-hat form) = 0",
           mixed_is_zero(mixed_exterior_derivative(form)));
}

void criterion_6() {
    std::mt19937_64 rng(616);
    std::uniform_int_distribution<long long> numo(-99, 99);
    Manifold m("W", 2);
    const Chart& chart = m.add_chart("C", "", {"u0", "u1"});
    const CoframeDef* cf = m.coordinate_coframe(chart);

    auto embed = [&](const ExprMat& a) {
        MixedMat r(a.size(), std::vector<MixedForm>(a.size(), MixedForm::zero(&m)));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < a.size(); ++j) r[i][j] = MixedForm::from_scalar(&m, cf, a[i][j]);
        return r;
    };
    auto scalar_of = [&](const MixedForm& f) {
        return form_is_zero(f[0]) ? 0.0
                                  : eval_numeric(f[0].comp(cf, {}), EvalContext{}).real();
    };

    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        for (int n : {4, 6}) {
            ExprMat X(static_cast<size_t>(n), std::vector<Expr>(static_cast<size_t>(n), num(0)));
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    Expr v = num(Rational(numo(rng), 16));
                    X[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
                    X[static_cast<size_t>(j)][static_cast<size_t>(i)] = num(-1) * v;
                }
            double pf = scalar_of(invariant_pfaffian(embed(X)));
            double det = scalar_of(invariant_det(embed(X)));
            double scale = std::max({1.0, std::abs(det)});
            if (std::abs(pf * pf - det) > 1e-9 * scale) ok = false;

            // Pf(h X h^T) = det(h) Pf(X)
            ExprMat h(static_cast<size_t>(n), std::vector<Expr>(static_cast<size_t>(n)));
            for (auto& row : h)
                for (auto& e : row) e = num(Rational(numo(rng), 32));
            ExprMat hxht = expr_mat_mul(h, expr_mat_mul(X, expr_mat_transpose(h)));
            double lhs = scalar_of(invariant_pfaffian(embed(hxht)));
            double rhs = eval_numeric(expr_mat_det(h), EvalContext{}).real() * pf;
            double s2 = std::max({1.0, std::abs(lhs), std::abs(rhs)});
            if (std::abs(lhs - rhs) > 1e-9 * s2) ok = false;
        }
    }

    // symbolic matching-oracle equality for sizes 2 and 4
    {
        auto a = [&](int i, int j) { return var("s" + std::to_string(i) + std::to_string(j)); };
        ExprMat X2 = {{num(0), a(0, 1)}, {num(-1) * a(0, 1), num(0)}};
        MixedForm pf2 = invariant_pfaffian(embed(X2));
        if (!canonically_equal(pf2[0].comp(cf, {}), a(0, 1))) ok = false;

        ExprMat X4(4, std::vector<Expr>(4, num(0)));
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                X4[static_cast<size_t>(i)][static_cast<size_t>(j)] = a(i, j);
                X4[static_cast<size_t>(j)][static_cast<size_t>(i)] = num(-1) * a(i, j);
            }
        MixedForm pf4 = invariant_pfaffian(embed(X4));
        // independent oracle: the three perfect matchings of {0,1,2,3} with
        // their crossing signs
        Expr oracle = a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
        if (!canonically_equal(pf4[0].comp(cf, {}), oracle)) ok = false;
    }
    report("criterion 6: Pfaffian laws Pf^2 = det and Pf(hXh^T) = det(h) Pf(X)", ok);
}

void criterion_7() {
    std::mt19937_64 rng(71717);
    std::uniform_int_distribution<int> coef(-3, 3);
    bool ok = true;
    int pairs = 0;

    auto run_dim = [&](int n, int target_pairs) {
        Manifold m("R", n);
        std::vector<std::string> coords;
        for (int i = 0; i < n; ++i) coords.push_back("q" + std::to_string(n * 10 + i));
        const Chart& chart = m.add_chart("C", "", coords);
        const CoframeDef* cf = m.coordinate_coframe(chart);
        auto rand_poly = [&]() {
            Expr e = num(coef(rng));
            for (const std::string& c : coords) {
                e = e + num(coef(rng)) * var(c) + num(coef(rng)) * var(c) * var(coords[0]);
            }
            return e;
        };
        auto rand_form = [&](int k) {
            DiffForm f(&m, k);
            std::function<void(IndexTuple&, int)> rec = [&](IndexTuple& idx, int start) {
                if (static_cast<int>(idx.size()) == k) {
                    f.set_comp(cf, IndexTuple(idx), rand_poly());
                    return;
                }
                for (int i = start; i < n; ++i) {
                    idx.push_back(i);
                    rec(idx, i + 1);
                    idx.pop_back();
                }
            };
            IndexTuple idx;
            if (k == 0) f.set_comp(cf, {}, rand_poly());
            else rec(idx, 0);
            return f;
        };
        for (int t = 0; t < target_pairs && ok; ++t) {
            int k = t % std::min(2, n);
            int l = 1;
            DiffForm alpha = rand_form(k);
            DiffForm beta = rand_form(l);
            // graded commutativity
            DiffForm ab = wedge(alpha, beta);
            DiffForm ba = wedge(beta, alpha);
            if (!forms_equal(ab, (k * l) % 2 ? form_neg(ba) : ba)) ok = false;
            // d∘d = 0
            if (!form_is_zero(exterior_derivative(exterior_derivative(alpha)))) ok = false;
            // graded Leibniz
            DiffForm lhs = exterior_derivative(ab);
            DiffForm rhs = form_add(wedge(exterior_derivative(alpha), beta),
                                    k % 2 ? form_neg(wedge(alpha, exterior_derivative(beta)))
                                          : wedge(alpha, exterior_derivative(beta)));
            if (!forms_equal(lhs, rhs)) ok = false;
            ++pairs;
        }
    };
    run_dim(2, 200);
    run_dim(3, 200);
    report("criterion 7: exterior-calculus property suite (d∘d, commutativity, Leibniz)", ok,
           std::to_string(pairs) + " random pairs per manifold family");
}

void criterion_8() {
    // Todd coefficients against the independent reciprocal-series oracle
    oracle::RSeries base(6);
    Rational fact(1);
    for (int k = 0; k <= 5; ++k) {
        fact = fact * Rational(1, k + 1);
        base[static_cast<size_t>(k)] = (k % 2 == 0) ? fact : -fact;
    }
    oracle::RSeries todd_expect = oracle::rs_reciprocal(base, 4);
    PowerSeries todd = taylor(P("x/(1-exp(-x))"), "x", 4);
    bool ok = true;
    Rational expect_vals[5] = {Rational(1), Rational(1, 2), Rational(1, 12), Rational(0),
                               Rational(-1, 720)};
    for (int k = 0; k <= 4; ++k) {
        if (todd.rational_coeff(k) != todd_expect[static_cast<size_t>(k)]) ok = false;
        if (todd.rational_coeff(k) != expect_vals[k]) ok = false;
    }

    // A-hat z-series against sinh(u)/u reciprocal oracle
    oracle::RSeries sinc(3, Rational(0));
    Rational f(1);
    for (int k = 0; k <= 2; ++k) {
        if (k > 0) f = f * Rational(1, (2 * k) * (2 * k + 1));
        sinc[static_cast<size_t>(k)] = f * Rational(BigInt(1), BigInt(4).pow(static_cast<uint64_t>(k)));
    }
    oracle::RSeries ahat_expect = oracle::rs_reciprocal(sinc, 2);
    PowerSeries ahat = taylor_in_z_allowing_sqrt(P("sqrt(x)/(2*sinh(sqrt(x)/2))"), "x", 2);
    Rational ahat_vals[3] = {Rational(1), Rational(-1, 24), Rational(7, 5760)};
    for (int k = 0; k <= 2; ++k) {
        if (ahat.rational_coeff(k) != ahat_expect[static_cast<size_t>(k)]) ok = false;
        if (ahat.rational_coeff(k) != ahat_vals[k]) ok = false;
    }
    report("criterion 8: Todd and A-hat series match the brute-force oracle exactly", ok);
}

void criterion_9() {
    Manifold m("RP1", 1);
    m.declare_subset("U");
    m.declare_subset("V");
    m.declare_union("RP1", {"U", "V"});
    Chart& hu = m.add_chart("hu", "U", {"u"}, {{P("u"), Restriction::NotEqual}});
    Chart& hv = m.add_chart("hv", "V", {"v"}, {{P("v"), Restriction::NotEqual}});
    m.declare_intersection("U", "V", "W");
    m.add_transition(hu, hv, {P("1/u")}, {P("1/v")});
    VectorBundle E(&m, 1, FieldKind::Real, "E");
    const LocalFrame& eU = E.add_frame("eU", "U");
    const LocalFrame& eV = E.add_frame("eV", "V");
    std::map<const Chart*, ExprMat> g;
    g[&hu] = {{P("u")}};
    g[&hv] = {{P("1/v")}};
    E.set_frame_change(eU, eV, g);

    Section sigma(&E, "sigma");
    sigma.set_comp(eU, hu, 0, P("(1-u)/(1+u^2)"));
    Section tau(&E, "tau");
    tau.set_comp(eV, hv, 0, P("(3-v^2)/(1+v^4)"));
    Section tau_u = continue_section(tau, eU, "W");

    // frame-change round trip is exact
    std::vector<ScalarField> to_v = section_change_frame(sigma, eV);
    Section sigma_v(&E, "sv");
    sigma_v.set_comp(eV, hv, 0, to_v[0].expr(hv));
    std::vector<ScalarField> back = section_change_frame(sigma_v, eU);
    bool round = canonically_equal(back[0].expr(hu), P("(1-u)/(1+u^2)"));

    Point p = Point::make(hu, {num(-1)});
    Expr s_at = section_at(sigma, p, eU).comps[0];
    Expr t_at = section_at(tau_u, p, eU).comps[0];
    Expr sum_at = section_at(section_add(sigma, tau_u), p, eU).comps[0];
    bool values = canonically_equal(s_at, num(1)) && canonically_equal(t_at, num(-1)) &&
                  sum_at.is_zero();
    report("criterion 9: Moebius section frame changes and evaluation at u = -1", round && values);
}

void criterion_10() {
    bool ok = true;
    {
        Scenario sc = Scenario::load(scn("minkowski_ch.scn"));
        RunResult r = sc.run();
        if (!mixed_is_zero(mixed_exterior_derivative(r.forms.at(0).form))) ok = false;
    }
    {
        Scenario sc = Scenario::load(scn("taut_c1.scn"));
        RunResult r = sc.run();
        if (!mixed_is_zero(mixed_exterior_derivative(r.forms.at(0).form))) ok = false;
    }
    {
        Scenario sc = Scenario::load(scn("s2_euler.scn"));
        RunResult r = sc.run();
        if (!mixed_is_zero(mixed_exterior_derivative(r.forms.at(0).form))) ok = false;
    }
    report("criterion 10: computed characteristic forms are closed", ok);
}

} // namespace

int main(int argc, char** argv) {
    bool long_mode = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--long") == 0) long_mode = true;
        else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }

    struct Item {
        int n;
        std::function<void()> fn;
        bool needs_long;
    };
    std::vector<Item> items = {
        {1, criterion_1, false}, {2, criterion_2, false}, {3, criterion_3, false},
        {4, criterion_4, false}, {5, criterion_5, true},  {6, criterion_6, false},
        {7, criterion_7, false}, {8, criterion_8, false}, {9, criterion_9, false},
        {10, criterion_10, false},
    };

    for (const Item& item : items) {
        if (only && item.n != only) continue;
        if (item.needs_long && !long_mode) {
            std::cout << "[SKIP] criterion " << item.n << ": long test (enable with --long)\n";
            continue;
        }
        try {
            item.fn();
        } catch (const std::exception& e) {
            report("criterion " + std::to_string(item.n), false, std::string("exception: ") + e.what());
        }
    }

    if (g_failures) {
        std::cout << g_failures << " criterion check(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
