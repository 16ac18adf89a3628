#include "cw/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"chernweil — characteristic forms of vector bundles via the Chern-Weil method"};

    std::string scenario_path;
    cw::ScenarioOptions opts;
    app.add_option("-s,--scenario", scenario_path, "scenario file to execute")->required();
    app.add_option("-o,--output", opts.output, "output format: text, json or latex")
        ->check(CLI::IsMember({"text", "json", "latex"}))
        ->default_val("text");
    app.add_option("--integrate", opts.integrate_form,
                   "integrate the named computed form over a chart box");
    app.add_option("--chart", opts.integrate_chart, "chart for --integrate");
    app.add_option("--bounds", opts.integrate_bounds,
                   "per-axis bounds for --integrate: axis=lo..hi or axis=inf");
    app.add_option("--tolerance", opts.tolerance, "integration tolerance override");
    app.add_option("--seed", opts.seed, "seed for probabilistic equality sampling");
    app.add_flag("--long", opts.long_mode, "run compute sections marked long = true");

    CLI11_PARSE(app, argc, argv);

    if (!opts.integrate_form.empty() && opts.integrate_chart.empty()) {
        std::cerr << "error: --integrate requires --chart\n";
        return 2;
    }

    try {
        cw::Scenario scenario = cw::Scenario::load(scenario_path);
        cw::RunResult result = scenario.run(opts);
        std::fputs(result.rendered.c_str(), stdout);
        return 0;
    } catch (const cw::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cw::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
