#pragma once

#include "cw/forms.hpp"
#include "cw/numeric.hpp"

#include <optional>
#include <vector>

namespace cw {

struct AxisBounds {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_infinite = false;
    bool hi_infinite = false;

    static AxisBounds finite(double lo, double hi) { return {lo, hi, false, false}; }
    static AxisBounds whole_line() { return {0, 0, true, true}; }
};

enum class QuadMethod { TensorGaussLegendre, Adaptive };

struct IntegrationTask {
    DiffForm form; // top degree
    const Chart* chart = nullptr;
    std::vector<AxisBounds> bounds; // one per coordinate
    double tolerance = 1e-6;
    QuadMethod method = QuadMethod::TensorGaussLegendre;
    EvalContext context; // user-function implementations, if any
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Integral of the top-degree component over the coordinate box; infinite
/// bounds via the substitution x = tan(theta). Node counts double until two
/// successive estimates agree within the tolerance.
IntegralResult integrate_top_form(const IntegrationTask& task);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace cw
