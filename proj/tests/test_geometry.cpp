#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cw/canon.hpp"
#include "cw/error.hpp"
#include "cw/geometry.hpp"
#include "cw/parse.hpp"

using namespace cw;

static Expr P(const std::string& s) {
    SymbolTable st;
    return parse_expr(s, &st);
}

// RP^1 with the two inhomogeneous charts u and v, v = 1/u on the overlap
static std::unique_ptr<Manifold> make_rp1() {
    auto m = std::make_unique<Manifold>("RP1", 1);
    m->declare_subset("U");
    m->declare_subset("V");
    m->declare_union("RP1", {"U", "V"});
    Chart& hu = m->add_chart("hu", "U", {"u"}, {{P("u"), Restriction::NotEqual}});
    Chart& hv = m->add_chart("hv", "V", {"v"}, {{P("v"), Restriction::NotEqual}});
    m->declare_intersection("U", "V", "W");
    m->add_transition(hu, hv, {P("1/u")}, {P("1/v")});
    return m;
}

TEST_CASE("transition registration and round trips") {
    auto m = make_rp1();
    const Chart* hu = m->chart("hu");
    const Chart* hv = m->chart("hv");
    REQUIRE(hu);
    REQUIRE(hv);
    CHECK(m->transition(*hu, *hv) != nullptr);
    CHECK(m->transition(*hv, *hu) != nullptr);
    // round trip u -> v -> u is the identity (checked again explicitly)
    Expr back = scalar_to_chart(scalar_to_chart(var("u"), *hu, *hv), *hv, *hu);
    CHECK(canonically_equal(back, var("u")));
}

TEST_CASE("identity transition is trivially consistent") {
    Manifold m("M", 2);
    Chart& a = m.add_chart("A", "", {"x", "y"});
    Chart& b = m.add_chart("B", "", {"p", "q"});
    CHECK_NOTHROW(m.add_transition(a, b, {P("x"), P("y")}, {P("p"), P("q")}));
}

TEST_CASE("stereographic 3-sphere transition passes the round-trip check") {
    Manifold m("S3", 3);
    Chart& n = m.add_chart("N", "U", {"x", "y", "z"});
    Chart& s = m.add_chart("S", "V", {"xp", "yp", "zp"});
    std::vector<Expr> fwd = {P("x/(x^2+y^2+z^2)"), P("y/(x^2+y^2+z^2)"), P("z/(x^2+y^2+z^2)")};
    std::vector<Expr> inv = {P("xp/(xp^2+yp^2+zp^2)"), P("yp/(xp^2+yp^2+zp^2)"),
                             P("zp/(xp^2+yp^2+zp^2)")};
    CHECK_NOTHROW(m.add_transition(n, s, fwd, inv));
}

TEST_CASE("bad transitions are rejected") {
    Manifold m("M", 1);
    Chart& a = m.add_chart("A", "U", {"u"});
    Chart& b = m.add_chart("B", "V", {"v"});
    CHECK_THROWS_AS(m.add_transition(a, b, {P("u+1")}, {P("v+1")}), Error);
    CHECK_THROWS_AS(m.add_transition(a, b, {P("u"), P("u")}, {P("v")}), Error);
}

TEST_CASE("duplicate coordinate symbols are rejected manifold-wide") {
    Manifold m("M", 2);
    m.add_chart("A", "U", {"x", "y"});
    CHECK_THROWS_AS(m.add_chart("B", "V", {"x", "w"}), Error);
}

TEST_CASE("field_on_overlap substitutes the transition") {
    auto m = make_rp1();
    const Chart* hu = m->chart("hu");
    const Chart* hv = m->chart("hv");

    // scalar transport is substitution through the inverse coordinate change
    ScalarField f(m.get(), "f");
    f.set_expr(*hu, P("(1-u)/(1+u^2)"));
    Expr g = field_on_overlap(f, *hu, *hv);
    CHECK(canonically_equal(g, P("(v-1)*v/(v^2+1)")));

    // a constant field is the same constant in every chart
    ScalarField c(m.get(), "c");
    c.set_expr(*hu, num(3));
    CHECK(canonically_equal(field_on_overlap(c, *hu, *hv), num(3)));
}

TEST_CASE("field_on_overlap on the 2-sphere: r^2 becomes 1/r'^2") {
    Manifold m("S2", 2);
    Chart& n = m.add_chart("N", "U", {"x", "y"});
    Chart& s = m.add_chart("S", "V", {"xp", "yp"});
    m.add_transition(n, s, {P("x/(x^2+y^2)"), P("y/(x^2+y^2)")},
                     {P("xp/(xp^2+yp^2)"), P("yp/(xp^2+yp^2)")});
    ScalarField f(&m, "r2");
    f.set_expr(n, P("x^2+y^2"));
    CHECK(canonically_equal(field_on_overlap(f, n, s), P("1/(xp^2+yp^2)")));
}

TEST_CASE("scalar field validation across charts") {
    Manifold m("S2", 2);
    Chart& n = m.add_chart("N", "U", {"x", "y"});
    Chart& s = m.add_chart("S", "V", {"xp", "yp"});
    m.add_transition(n, s, {P("x/(x^2+y^2)"), P("y/(x^2+y^2)")},
                     {P("xp/(xp^2+yp^2)"), P("yp/(xp^2+yp^2)")});
    ScalarField good(&m, "g");
    good.set_expr(n, P("(x^2+y^2)/(1+x^2+y^2)"));
    good.set_expr(s, P("1/(1+xp^2+yp^2)"));
    CHECK(validate_scalar_field(good));

    ScalarField bad(&m, "b");
    bad.set_expr(n, P("x"));
    bad.set_expr(s, P("xp"));
    CHECK(!validate_scalar_field(bad));
}

TEST_CASE("subset containment and unions") {
    Manifold m("M", 1);
    m.declare_subset("U");
    m.declare_subset("V");
    m.declare_subset("W", "U");
    CHECK(m.subset_contains("M", "U"));
    CHECK(m.subset_contains("U", "W"));
    CHECK(!m.subset_contains("V", "W"));
    m.declare_union("M", {"U", "V"});
    CHECK(m.covers_whole({"U", "V"}));
    CHECK(!m.covers_whole({"U"}));
}

TEST_CASE("points respect chart restrictions") {
    auto m = make_rp1();
    const Chart* hu = m->chart("hu");
    CHECK_NOTHROW(Point::make(*hu, {num(-1)}));
    CHECK_THROWS_AS(Point::make(*hu, {num(0)}), Error);
}
