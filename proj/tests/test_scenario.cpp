#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cw/canon.hpp"
#include "cw/scenario.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace cw;

static Expr P(const std::string& s) {
    SymbolTable st;
    return parse_expr(s, &st);
}

static std::string scenario_path(const std::string& name) {
    return std::string(SCENARIO_DIR) + "/" + name;
}

TEST_CASE("parse errors carry file positions") {
    CHECK_THROWS_AS(Scenario::parse_text("key = 1\n", "t.scn"), ScenarioError);
    CHECK_THROWS_AS(Scenario::parse_text("[manifold\n", "t.scn"), ScenarioError);
    try {
        Scenario::parse_text("[manifold]\nname = M\ndim = 2\n\n[chart.X]\nbroken\n", "t.scn");
        CHECK(false);
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 6);
    }
}

TEST_CASE("malformed expressions are reported with their line") {
    std::string text =
        "[manifold]\nname = M\ndim = 2\n\n"
        "[chart.X]\ncoords = t, x\n\n"
        "[bundle]\nname = E\nrank = 1\nfield = complex\n\n"
        "[frame.e]\nbundle = E\n\n"
        "[connection.nabla]\nbundle = E\nframe = e\nchart = X\nomega.0.0 = 0, I*A(t\n";
    Scenario sc = Scenario::parse_text(text, "bad.scn");
    try {
        sc.run();
        CHECK(false);
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 20);
        CHECK(std::string(e.what()).find("bad.scn:20") != std::string::npos);
    }
}

TEST_CASE("unknown references name the failing section") {
    std::string text =
        "[manifold]\nname = M\ndim = 2\n\n[chart.X]\ncoords = t, x\n\n"
        "[bundle]\nname = E\nrank = 1\n\n[class.c]\nbundle = F\npredefined = Chern\n";
    Scenario sc = Scenario::parse_text(text, "t.scn");
    try {
        sc.run();
        CHECK(false);
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("class.c") != std::string::npos);
    }
}

TEST_CASE("minkowski scenario reproduces the Chern character") {
    Scenario sc = Scenario::load(scenario_path("minkowski_ch.scn"));
    RunResult r = sc.run();
    REQUIRE(r.forms.size() == 1);
    const MixedForm& form = r.forms[0].form;
    const Manifold* m = form.manifold();
    const CoframeDef* cf = m->coordinate_coframe(*m->chart("X"));
    CHECK(canonically_equal(form[0].comp(cf, {}), num(1)));
    CHECK(form_is_zero(form[1]));
    CHECK(canonically_equal(form[2].comp(cf, {0, 1}), P("A'(t)/(2*pi)")));
}

TEST_CASE("tautological bundle scenario: form and integral") {
    Scenario sc = Scenario::load(scenario_path("taut_c1.scn"));
    RunResult r = sc.run();
    REQUIRE(r.forms.size() == 1);
    REQUIRE(r.integrals.size() == 1);
    const MixedForm& form = r.forms[0].form;
    const Manifold* m = form.manifold();
    const CoframeDef* cf = m->coordinate_coframe(*m->chart("comp"));
    CHECK(canonically_equal(form[2].comp(cf, {0, 1}), P("I/(2*pi*(1+z*zbar)^2)")));
    CHECK(std::abs(r.integrals[0].result.value - 1.0) < 1e-3);
}

TEST_CASE("json output is byte-identical across runs and matches goldens") {
    ScenarioOptions opts;
    opts.output = "json";
    Scenario a = Scenario::load(scenario_path("minkowski_ch.scn"));
    Scenario b = Scenario::load(scenario_path("minkowski_ch.scn"));
    std::string ra = a.run(opts).rendered;
    std::string rb = b.run(opts).rendered;
    CHECK(ra == rb);

    // golden comparison is canonical: parse both expression strings
    std::ifstream gf(std::string(GOLDEN_DIR) + "/minkowski_ch.json");
    REQUIRE(gf.good());
    nlohmann::json golden = nlohmann::json::parse(gf);
    nlohmann::json got = nlohmann::json::parse(ra);
    for (auto& [name, comp] : golden["computes"].items()) {
        auto& gcomp = got["computes"][std::stoul(name)];
        for (auto& [deg, entries] : comp["expansion"].items()) {
            for (auto& [key, val] : entries.items()) {
                if (key == "coframe") {
                    CHECK(gcomp["expansion"][deg][key] == val);
                    continue;
                }
                CHECK(canonically_equal(P(val.get<std::string>()),
                                        P(gcomp["expansion"][deg][key].get<std::string>())));
            }
        }
    }
}

TEST_CASE("golden euler scenario compares canonically in text mode") {
    Scenario sc = Scenario::load(scenario_path("s2_euler.scn"));
    RunResult r = sc.run();
    // text-mode golden: the expected expressions, compared after parsing
    const MixedForm& form = r.forms[0].form;
    const Manifold* m = form.manifold();
    const CoframeDef* cn = m->coordinate_coframe(*m->chart("N"));
    const CoframeDef* cs = m->coordinate_coframe(*m->chart("S"));
    CHECK(canonically_equal(form[2].comp(cn, {0, 1}), P("2/(pi*(1+x^2+y^2)^2)")));
    CHECK(canonically_equal(form[2].comp(cs, {0, 1}), P("2/(pi*(1+xp^2+yp^2)^2)")));
    CHECK(std::abs(r.integrals[0].result.value - 2.0) < 1e-3);
}

TEST_CASE("cli --integrate flag and latex output") {
    Scenario sc = Scenario::load(scenario_path("minkowski_ch.scn"));
    ScenarioOptions opts;
    opts.output = "latex";
    RunResult r = sc.run(opts);
    CHECK(r.rendered.find("\\wedge") != std::string::npos);
    CHECK(r.rendered.find("\\frac{\\partial\\,A}{\\partial t}") != std::string::npos);
}

TEST_CASE("long-gated computes are skipped without --long") {
    std::string text =
        "[manifold]\nname = M\ndim = 2\n\n[chart.X]\ncoords = t, x\n\n"
        "[bundle]\nname = E\nrank = 1\nfield = complex\n\n[frame.e]\nbundle = E\n\n"
        "[connection.nabla]\nbundle = E\nframe = e\nchart = X\nomega.0.0 = 0, I*A(t)\n\n"
        "[class.ch]\nbundle = E\npredefined = ChernChar\n\n"
        "[compute.f]\nclass = ch\nconnection = nabla\nlong = true\n";
    Scenario sc = Scenario::parse_text(text, "t.scn");
    RunResult r = sc.run();
    REQUIRE(r.forms.size() == 1);
    CHECK(r.forms[0].skipped_long);
    ScenarioOptions opts;
    opts.long_mode = true;
    Scenario sc2 = Scenario::parse_text(text, "t.scn");
    RunResult r2 = sc2.run(opts);
    CHECK(!r2.forms[0].skipped_long);
}

#ifdef CLI_BIN
TEST_CASE("cli binary exit codes") {
    std::string ok = std::string(CLI_BIN) + " --scenario " + scenario_path("minkowski_ch.scn") +
                     " > /dev/null 2>&1";
    CHECK(std::system(ok.c_str()) == 0);

    std::string bad_path = "echo '[manifold\n' > /tmp/cw_bad.scn && " + std::string(CLI_BIN) +
                           " --scenario /tmp/cw_bad.scn > /dev/null 2>&1";
    int rc = std::system(bad_path.c_str());
    CHECK(WEXITSTATUS(rc) == 2);
}
#endif
