#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cw/canon.hpp"
#include "cw/error.hpp"
#include "cw/forms.hpp"
#include "cw/parse.hpp"

#include "oracles.hpp"

#include <random>

using namespace cw;

static Expr P(const std::string& s) {
    SymbolTable st;
    return parse_expr(s, &st);
}

namespace {

struct Plane {
    std::unique_ptr<Manifold> m;
    const Chart* chart;
    const CoframeDef* cf;

    Plane() {
        m = std::make_unique<Manifold>("R2", 2);
        chart = &m->add_chart("X", "", {"x", "y"});
        cf = m->coordinate_coframe(*chart);
    }
};

struct Space {
    std::unique_ptr<Manifold> m;
    const Chart* chart;
    const CoframeDef* cf;

    Space() {
        m = std::make_unique<Manifold>("R3", 3);
        chart = &m->add_chart("X", "", {"x", "y", "z"});
        cf = m->coordinate_coframe(*chart);
    }
};

DiffForm one_form(const Plane& p, const Expr& cx, const Expr& cy) {
    DiffForm f(p.m.get(), 1);
    f.set_comp(p.cf, {0}, cx);
    f.set_comp(p.cf, {1}, cy);
    return f;
}

std::mt19937_64 g_rng(424242);

Expr rand_poly2() {
    std::uniform_int_distribution<int> coef(-3, 3);
    return P(std::to_string(coef(g_rng))) + num(coef(g_rng)) * var("x") +
           num(coef(g_rng)) * var("y") + num(coef(g_rng)) * var("x") * var("y") +
           num(coef(g_rng)) * pow_int(var("x"), 2);
}

Expr rand_poly3() {
    std::uniform_int_distribution<int> coef(-3, 3);
    return num(coef(g_rng)) + num(coef(g_rng)) * var("x") + num(coef(g_rng)) * var("y") +
           num(coef(g_rng)) * var("z") + num(coef(g_rng)) * var("x") * var("z");
}

template <typename M>
DiffForm rand_form(const M& sp, int n, int k, const std::function<Expr()>& gen) {
    DiffForm f(sp.m.get(), k);
    std::vector<IndexTuple> tuples;
    IndexTuple idx(static_cast<size_t>(k));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            tuples.push_back(idx);
            return;
        }
        for (int i = start; i < n; ++i) {
            idx[static_cast<size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    for (auto& t : tuples) f.set_comp(sp.cf, IndexTuple(t), gen());
    return f;
}

template <typename M>
oracle::DenseForm to_dense(const M& sp, const DiffForm& f, int n) {
    oracle::DenseForm d;
    d.n = n;
    d.k = f.degree();
    size_t total = 1;
    for (int i = 0; i < d.k; ++i) total *= static_cast<size_t>(n);
    d.a.assign(std::max<size_t>(total, 1), num(0));
    std::vector<int> idx(static_cast<size_t>(d.k), 0);
    std::function<void(int)> rec = [&](int depth) {
        if (depth == d.k) {
            d.a[oracle::DenseForm::flat(idx, n)] = f.comp(sp.cf, IndexTuple(idx.begin(), idx.end()));
            return;
        }
        for (int i = 0; i < n; ++i) {
            idx[static_cast<size_t>(depth)] = i;
            rec(depth + 1);
        }
    };
    if (d.k == 0) d.a[0] = f.comp(sp.cf, {});
    else rec(0);
    return d;
}

} // namespace

TEST_CASE("wedge: antisymmetry and the paper's cross term") {
    Plane p;
    DiffForm dx(p.m.get(), 1);
    dx.set_comp(p.cf, {0}, num(1));
    CHECK(form_is_zero(wedge(dx, dx)));

    // (y dx + 2x dy) ∧ (x dx + y dy) = (y^2 - 2x^2) dx∧dy
    DiffForm a = one_form(p, P("y"), P("2*x"));
    DiffForm b = one_form(p, P("x"), P("y"));
    DiffForm w = wedge(a, b);
    CHECK(canonically_equal(w.comp(p.cf, {0, 1}), P("y^2 - 2*x^2")));
}

TEST_CASE("wedge equals the dense antisymmetrization oracle on R^3") {
    Space sp;
    for (int trial = 0; trial < 12; ++trial) {
        DiffForm a = rand_form(sp, 3, 1, rand_poly3);
        DiffForm b = rand_form(sp, 3, trial % 2 ? 2 : 1, rand_poly3);
        DiffForm w = wedge(a, b);
        oracle::DenseForm dw = oracle::dense_wedge(to_dense(sp, a, 3), to_dense(sp, b, 3));
        std::vector<IndexTuple> tuples;
        if (w.degree() == 2) tuples = {{0, 1}, {0, 2}, {1, 2}};
        else tuples = {{0, 1, 2}};
        for (auto& t : tuples) {
            std::vector<int> ti(t.begin(), t.end());
            CHECK(canonically_equal(w.comp(sp.cf, IndexTuple(t)), dw.at(ti)));
        }
    }
}

TEST_CASE("exterior derivative: paper examples and d∘d = 0") {
    Plane p;
    // d(x^2) = 2x dx
    DiffForm f = DiffForm::from_scalar(p.m.get(), p.cf, P("x^2"));
    DiffForm df = exterior_derivative(f);
    CHECK(canonically_equal(df.comp(p.cf, {0}), P("2*x")));
    CHECK(df.comp(p.cf, {1}).is_zero());

    // d(y dx + 2x dy) = dx∧dy
    DiffForm a = one_form(p, P("y"), P("2*x"));
    DiffForm da = exterior_derivative(a);
    CHECK(canonically_equal(da.comp(p.cf, {0, 1}), num(1)));

    for (int trial = 0; trial < 25; ++trial) {
        DiffForm g = DiffForm::from_scalar(p.m.get(), p.cf, rand_poly2());
        CHECK(form_is_zero(exterior_derivative(exterior_derivative(g))));
    }
}

TEST_CASE("property: d∘d = 0, graded commutativity, Leibniz over R^2 and R^3") {
    Plane p2;
    Space p3;
    int checks = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // R^2
        {
            DiffForm a = rand_form(p2, 2, trial % 2, rand_poly2);
            DiffForm b = rand_form(p2, 2, 1, rand_poly2);
            int k = a.degree(), l = b.degree();
            DiffForm ab = wedge(a, b);
            DiffForm ba = wedge(b, a);
            DiffForm sign = (k * l) % 2 ? form_neg(ba) : ba;
            CHECK(forms_equal(ab, sign));
            CHECK(form_is_zero(exterior_derivative(exterior_derivative(a))));
            DiffForm lhs = exterior_derivative(ab);
            DiffForm rhs = form_add(wedge(exterior_derivative(a), b),
                                    k % 2 ? form_neg(wedge(a, exterior_derivative(b)))
                                          : wedge(a, exterior_derivative(b)));
            CHECK(forms_equal(lhs, rhs));
        }
        // R^3
        {
            DiffForm a = rand_form(p3, 3, 1 + trial % 2, rand_poly3);
            DiffForm b = rand_form(p3, 3, 1, rand_poly3);
            int k = a.degree(), l = b.degree();
            DiffForm ab = wedge(a, b);
            DiffForm ba = wedge(b, a);
            DiffForm sign = (k * l) % 2 ? form_neg(ba) : ba;
            CHECK(forms_equal(ab, sign));
            DiffForm lhs = exterior_derivative(ab);
            DiffForm rhs = form_add(wedge(exterior_derivative(a), b),
                                    k % 2 ? form_neg(wedge(a, exterior_derivative(b)))
                                          : wedge(a, exterior_derivative(b)));
            CHECK(forms_equal(lhs, rhs));
        }
        checks += 2;
    }
    CHECK(checks == 200);
}

static MixedForm paper_A(const Plane& p) {
    MixedForm A(p.m.get(), "A");
    A.set_part(0, DiffForm::from_scalar(p.m.get(), p.cf, P("x^2")));
    DiffForm w1(p.m.get(), 1);
    w1.set_comp(p.cf, {0}, P("y"));
    w1.set_comp(p.cf, {1}, P("2*x"));
    A.set_part(1, std::move(w1));
    DiffForm w2(p.m.get(), 2);
    w2.set_comp(p.cf, {0, 1}, P("4*x^3"));
    A.set_part(2, std::move(w2));
    return A;
}

static MixedForm paper_B(const Plane& p) {
    MixedForm B(p.m.get(), "B");
    B.set_part(0, DiffForm::from_scalar(p.m.get(), p.cf, num(2)));
    DiffForm eta(p.m.get(), 1);
    eta.set_comp(p.cf, {0}, P("x"));
    eta.set_comp(p.cf, {1}, P("y"));
    B.set_part(1, std::move(eta));
    return B;
}

TEST_CASE("mixed forms reproduce the worked A*B example") {
    Plane p;
    MixedForm A = paper_A(p);
    MixedForm B = paper_B(p);

    MixedForm AB = mixed_mul(A, B);
    CHECK(canonically_equal(AB[0].comp(p.cf, {}), P("2*x^2")));
    CHECK(canonically_equal(AB[1].comp(p.cf, {0}), P("x^3 + 2*y")));
    CHECK(canonically_equal(AB[1].comp(p.cf, {1}), P("x^2*y + 4*x")));
    CHECK(canonically_equal(AB[2].comp(p.cf, {0, 1}), P("8*x^3 - 2*x^2 + y^2")));

    MixedForm BA = mixed_mul(B, A);
    CHECK(canonically_equal(BA[2].comp(p.cf, {0, 1}), P("8*x^3 + 2*x^2 - y^2")));

    MixedForm one = MixedForm::one(p.m.get(), p.cf);
    CHECK(mixed_equal(mixed_mul(A, one), A));

    MixedForm dA = mixed_exterior_derivative(A);
    CHECK(form_is_zero(dA[0]));
    CHECK(canonically_equal(dA[1].comp(p.cf, {0}), P("2*x")));
    CHECK(dA[1].comp(p.cf, {1}).is_zero());
    CHECK(canonically_equal(dA[2].comp(p.cf, {0, 1}), num(1)));
    CHECK(mixed_is_zero(mixed_exterior_derivative(dA)));

    CHECK(display_expansion(A) == "A = [x^2]_0 + [(y) dx + (2*x) dy]_1 + [(4*x^3) dx∧dy]_2");
}

TEST_CASE("mixed_mul satisfies the graded Leibniz rule degreewise") {
    Plane p;
    for (int trial = 0; trial < 20; ++trial) {
        MixedForm A(p.m.get());
        A.set_part(0, DiffForm::from_scalar(p.m.get(), p.cf, rand_poly2()));
        A.set_part(1, rand_form(p, 2, 1, rand_poly2));
        MixedForm B(p.m.get());
        B.set_part(1, rand_form(p, 2, 1, rand_poly2));
        B.set_part(2, rand_form(p, 2, 2, rand_poly2));

        // d(A∧B) = dA∧B + sum over homogeneous parts of (-1)^deg A∧dB
        MixedForm lhs = mixed_exterior_derivative(mixed_mul(A, B));
        MixedForm rhs = mixed_mul(mixed_exterior_derivative(A), B);
        for (int k = 0; k <= 2; ++k) {
            if (form_is_zero(A[k])) continue;
            MixedForm Ak = MixedForm::from_form(A[k]);
            MixedForm t = mixed_mul(Ak, mixed_exterior_derivative(B));
            rhs = mixed_add(rhs, k % 2 ? mixed_scale(num(-1), t) : t);
        }
        CHECK(mixed_equal(lhs, rhs));
    }
}

TEST_CASE("mixed_mul is associative on random triples") {
    Plane p;
    for (int trial = 0; trial < 15; ++trial) {
        MixedForm A(p.m.get()), B(p.m.get()), C(p.m.get());
        A.set_part(0, DiffForm::from_scalar(p.m.get(), p.cf, rand_poly2()));
        A.set_part(1, rand_form(p, 2, 1, rand_poly2));
        B.set_part(1, rand_form(p, 2, 1, rand_poly2));
        B.set_part(0, DiffForm::from_scalar(p.m.get(), p.cf, rand_poly2()));
        C.set_part(2, rand_form(p, 2, 2, rand_poly2));
        C.set_part(0, DiffForm::from_scalar(p.m.get(), p.cf, rand_poly2()));
        CHECK(mixed_equal(mixed_mul(mixed_mul(A, B), C), mixed_mul(A, mixed_mul(B, C))));
    }
}

TEST_CASE("change_coframe: identity, round trip, functoriality") {
    Plane p;
    // abstract coframe with an invertible polynomial linking matrix
    ExprMat P1 = {{P("1+x^2"), P("y")}, {P("0"), P("2")}};
    ExprMat P2 = {{P("1"), P("x")}, {P("x"), P("1+x^2")}}; // det = 1 everywhere... det = 1
    const CoframeDef* e1 = p.m->register_coframe("E1", *p.chart, P1, "");
    const CoframeDef* e2 = p.m->register_coframe("E2", *p.chart, P2, "");

    for (int trial = 0; trial < 10; ++trial) {
        DiffForm a = rand_form(p, 2, 1 + trial % 2, rand_poly2);
        // identity: converting to its own coframe changes nothing
        CHECK(forms_equal(change_coframe(a, p.cf), a));
        // round trip through E1
        DiffForm through = change_coframe(change_coframe(a, e1), p.cf);
        CHECK(forms_equal(through, a));
        // functoriality: X -> E1 -> E2 equals X -> E2
        DiffForm via = change_coframe(change_coframe(a, e1), e2);
        DiffForm direct = change_coframe(a, e2);
        CHECK(via.comps(e2) == direct.comps(e2));
    }
}

TEST_CASE("change_coframe preserves top-degree pairing with the frame determinant") {
    Plane p;
    ExprMat M = {{P("2"), P("x")}, {P("1"), P("1+x^2")}};
    const CoframeDef* e = p.m->register_coframe("F", *p.chart, M, "");
    DiffForm top(p.m.get(), 2);
    top.set_comp(p.cf, {0, 1}, P("x+y"));
    DiffForm conv = change_coframe(top, e);
    // dx∧dy = det(M) F^0∧F^1
    CHECK(canonically_equal(conv.comp(e, {0, 1}), P("(x+y)*(2*(1+x^2) - x)")));
}

TEST_CASE("pullback to another chart transports forms correctly") {
    Manifold m("S2", 2);
    Chart& n = m.add_chart("N", "U", {"x", "y"});
    Chart& s = m.add_chart("S", "V", {"xp", "yp"});
    m.add_transition(n, s, {P("x/(x^2+y^2)"), P("y/(x^2+y^2)")},
                     {P("xp/(xp^2+yp^2)"), P("yp/(xp^2+yp^2)")});
    const CoframeDef* cn = m.coordinate_coframe(n);
    const CoframeDef* cs = m.coordinate_coframe(s);

    // the top form dx∧dy picks up the (orientation-reversing) Jacobian
    DiffForm top(&m, 2);
    top.set_comp(cn, {0, 1}, num(1));
    DiffForm pulled = pullback_to_chart(top, s);
    CHECK(canonically_equal(pulled.comp(cs, {0, 1}), P("-1/(xp^2+yp^2)^2")));

    // scalars transport by substitution
    DiffForm f = DiffForm::from_scalar(&m, cn, P("x^2+y^2"));
    DiffForm fp = pullback_to_chart(f, s);
    CHECK(canonically_equal(fp.comp(cs, {}), P("1/(xp^2+yp^2)")));
}

TEST_CASE("errors: abstract coframe without linking data, degree misuse") {
    Plane p;
    DiffForm f(p.m.get(), 1);
    CHECK_THROWS_AS(f.set_comp(p.cf, {0, 1}, num(1)), Error);
    DiffForm g(p.m.get(), 3); // degree beyond dim is identically zero
    g.set_comp(p.cf, {0, 1, 2}, num(0));
    CHECK(form_is_zero(g));
}
