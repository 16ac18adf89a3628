#include "cw/quadrature.hpp"
#include "cw/error.hpp"

#include <cmath>
#include <future>
#include <thread>

namespace cw {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<size_t>(n), 0.0);
    weights.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre polynomial by recurrence
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<size_t>(i)] = -x;
        nodes[static_cast<size_t>(n - 1 - i)] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[static_cast<size_t>(i)] = w;
        weights[static_cast<size_t>(n - 1 - i)] = w;
    }
}

namespace {

struct Axis {
    std::vector<double> points;  // coordinate values
    std::vector<double> factors; // weight * substitution jacobian
};

Axis build_axis(const AxisBounds& b, const std::vector<double>& nodes,
                const std::vector<double>& weights) {
    Axis a;
    size_t n = nodes.size();
    a.points.resize(n);
    a.factors.resize(n);
    if (b.lo_infinite && b.hi_infinite) {
        // x = tan(theta), theta in (-pi/2, pi/2)
        for (size_t i = 0; i < n; ++i) {
            double theta = nodes[i] * M_PI / 2.0;
            double t = std::tan(theta);
            a.points[i] = t;
            a.factors[i] = weights[i] * (M_PI / 2.0) * (1.0 + t * t);
        }
    } else if (!b.lo_infinite && b.hi_infinite) {
        // x = lo + tan(theta), theta in (0, pi/2)
        for (size_t i = 0; i < n; ++i) {
            double theta = (nodes[i] + 1.0) * M_PI / 4.0;
            double t = std::tan(theta);
            a.points[i] = b.lo + t;
            a.factors[i] = weights[i] * (M_PI / 4.0) * (1.0 + t * t);
        }
    } else if (b.lo_infinite && !b.hi_infinite) {
        for (size_t i = 0; i < n; ++i) {
            double theta = (nodes[i] + 1.0) * M_PI / 4.0;
            double t = std::tan(theta);
            a.points[i] = b.hi - t;
            a.factors[i] = weights[i] * (M_PI / 4.0) * (1.0 + t * t);
        }
    } else {
        if (!(b.lo < b.hi)) throw Error("quadrature", "bounds must satisfy lo < hi");
        double mid = (b.hi + b.lo) / 2.0, half = (b.hi - b.lo) / 2.0;
        for (size_t i = 0; i < n; ++i) {
            a.points[i] = mid + half * nodes[i];
            a.factors[i] = weights[i] * half;
        }
    }
    return a;
}

struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

double evaluate_grid(const Expr& integrand, const Chart& chart, const std::vector<Axis>& axes,
                     const EvalContext& base, double& max_imag) {
    size_t dim = axes.size();
    // split the outermost axis across threads; per-axis partial sums are
    // combined in index order so the result is schedule-independent
    size_t n0 = axes[0].points.size();
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    size_t chunk = std::max<size_t>(1, n0 / hw);

    std::vector<std::future<std::pair<double, double>>> futs;
    for (size_t start = 0; start < n0; start += chunk) {
        size_t end = std::min(n0, start + chunk);
        futs.push_back(std::async(std::launch::async, [&, start, end]() {
            Kahan acc;
            double imag = 0.0;
            EvalContext ctx = base;
            std::vector<size_t> idx(dim, 0);
            for (size_t i0 = start; i0 < end; ++i0) {
                idx.assign(dim, 0);
                idx[0] = i0;
                while (true) {
                    double factor = 1.0;
                    for (size_t d = 0; d < dim; ++d) {
                        ctx.vars[chart.coords[d]] = Complex(axes[d].points[idx[d]], 0.0);
                        factor *= axes[d].factors[idx[d]];
                    }
                    Complex v = eval_numeric(integrand, ctx);
                    imag = std::max(imag, std::abs(v.imag()) * std::abs(factor));
                    acc.add(v.real() * factor);
                    // advance inner indices [1..dim)
                    size_t d = dim - 1;
                    bool done = false;
                    while (true) {
                        if (d == 0) {
                            done = true;
                            break;
                        }
                        if (++idx[d] < axes[d].points.size()) break;
                        idx[d] = 0;
                        --d;
                    }
                    if (done) break;
                }
            }
            return std::make_pair(acc.sum, imag);
        }));
    }
    Kahan total;
    for (auto& f : futs) {
        auto [s, im] = f.get();
        total.add(s);
        max_imag = std::max(max_imag, im);
    }
    return total.sum;
}

} // namespace

IntegralResult integrate_top_form(const IntegrationTask& task) {
    const Manifold* m = task.form.manifold();
    if (task.form.degree() != m->dim())
        throw Error("quadrature", "only top-degree forms can be integrated");
    if (!task.chart) throw Error("quadrature", "no chart given");
    if (static_cast<int>(task.bounds.size()) != m->dim())
        throw Error("quadrature", "need one bounds entry per coordinate");

    const CoframeDef* ccf = m->coordinate_coframe(*task.chart);
    DiffForm coordinate_form =
        task.form.has_coframe(ccf) ? task.form : pullback_to_chart(task.form, *task.chart);
    IndexTuple top;
    for (int i = 0; i < m->dim(); ++i) top.push_back(i);
    Expr integrand = coordinate_form.comp(ccf, top);
    if (integrand.is_zero()) return {0.0, 0.0};

    EvalContext ctx = task.context;
    ctx.pole_floor = 1e-200;

    double prev = 0.0;
    bool have_prev = false;
    IntegralResult result;
    for (int n = 64; n <= 2048; n *= 2) {
        std::vector<double> nodes, weights;
        gauss_legendre(n, nodes, weights);
        std::vector<Axis> axes;
        for (const AxisBounds& b : task.bounds) axes.push_back(build_axis(b, nodes, weights));
        double max_imag = 0.0;
        double value = evaluate_grid(integrand, *task.chart, axes, ctx, max_imag);
        if (have_prev) {
            double err = std::abs(value - prev) + max_imag;
            result.value = value;
            result.error_estimate = err;
            if (err < task.tolerance) return result;
        }
        prev = value;
        have_prev = true;
    }
    throw Error("quadrature", "failed to converge within the refinement budget (error estimate " +
                                  std::to_string(result.error_estimate) + ")");
}

} // namespace cw
