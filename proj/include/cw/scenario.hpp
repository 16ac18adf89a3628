#pragma once

#include "cw/bundle.hpp"
#include "cw/charclass.hpp"
#include "cw/connection.hpp"
#include "cw/forms.hpp"
#include "cw/geometry.hpp"
#include "cw/parse.hpp"
#include "cw/quadrature.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cw {

/// Scenario parse/validation failure; carries the file position.
class ScenarioError : public Error {
public:
    ScenarioError(const std::string& what, const std::string& file, int line)
        : Error("scenario", file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct ScenarioOptions {
    std::string output = "text"; // text | json | latex
    double tolerance = 0.0;      // 0: use per-task tolerances
    uint64_t seed = 12345;
    bool long_mode = false; // enables sections marked long = true
    // ad-hoc integration request from the command line
    std::string integrate_form;
    std::string integrate_chart;
    std::vector<std::string> integrate_bounds; // "axis=lo..hi" or "axis=inf"
};

struct ComputedForm {
    std::string name;
    std::string class_name;
    MixedForm form;
    const CoframeDef* display = nullptr;
    bool skipped_long = false;
};

struct ComputedIntegral {
    std::string name;
    std::string form_name;
    int degree = 0;
    IntegralResult result;
};

struct RunResult {
    std::vector<ComputedForm> forms;
    std::vector<ComputedIntegral> integrals;
    std::string rendered; // in the requested output format
};

/// Declarative scenario: sectioned config with [section.name] headers and
/// key = value pairs; expression values use the engine grammar. Owns every
/// constructed object; results reference them, so keep the scenario alive.
class Scenario {
public:
    static Scenario load(const std::string& path);
    static Scenario parse_text(const std::string& text, const std::string& filename);

    /// Executes declarations in order and runs all compute/integrate
    /// directives. Throws ScenarioError on validation problems and Error on
    /// computation failures.
    RunResult run(const ScenarioOptions& opts = {});

    Manifold* manifold() { return manifold_.get(); }
    VectorBundle* bundle(const std::string& name);
    BundleConnection* connection(const std::string& name);

private:
    struct Entry {
        std::string key;
        std::string value;
        int line;
    };
    struct Section {
        std::string kind;
        std::string name;
        int line;
        std::vector<Entry> entries;
    };

    std::string file_;
    std::vector<Section> sections_;
    SymbolTable symbols_;

    std::unique_ptr<Manifold> manifold_;
    std::map<std::string, std::unique_ptr<VectorBundle>> bundles_;
    std::map<std::string, std::unique_ptr<Metric>> metrics_;
    std::map<std::string, std::unique_ptr<BundleConnection>> connections_;
    std::map<std::string, std::shared_ptr<CharClass>> classes_;

    friend struct ScenarioExec;
};

} // namespace cw
