#include "quadrature.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace sk::quadrature {

namespace {

constexpr double kPi = std::numbers::pi;

// Legendre P_n and P_n' at x by the three-term recurrence.
void legendre_eval(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

GaussRule gauss_legendre(int n) {
    if (n < 1) throw ConfigError("gauss_legendre: order must be >= 1");
    GaussRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
        return rule;
    }
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre_eval(n, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre_eval(n, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is in (0,1]; mirror for exact node symmetry.
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

Grid::Grid(double xi, int panels_per_unit, int order) : xi_(xi), order_(order) {
    if (!(xi > 0.0)) throw ConfigError("composite_grid: xi must be > 0");
    if (panels_per_unit < 1) throw ConfigError("composite_grid: panels_per_unit must be >= 1");
    if (order < 2) throw ConfigError("composite_grid: order must be >= 2");

    const double width = 1.0 / panels_per_unit;
    int full = static_cast<int>(std::floor(xi / width + 1e-12));
    double rest = xi - full * width;
    if (rest < 1e-12 * std::max(1.0, xi)) rest = 0.0;
    const int panels = full + (rest > 0.0 ? 1 : 0);

    const GaussRule rule = gauss_legendre(order);
    nodes_.reserve(static_cast<size_t>(panels) * order);
    weights_.reserve(static_cast<size_t>(panels) * order);
    panel_boundaries_.reserve(panels + 1);
    panel_boundaries_.push_back(0.0);
    for (int p = 0; p < panels; ++p) {
        const double a = p * width;
        const double b = (p == full) ? xi : (p + 1) * width;
        const double mid = 0.5 * (a + b);
        const double hlf = 0.5 * (b - a);
        for (int g = 0; g < order; ++g) {
            nodes_.push_back(mid + hlf * rule.nodes[g]);
            weights_.push_back(hlf * rule.weights[g]);
        }
        panel_boundaries_.push_back(b);
    }
}

Grid composite_grid(double xi, int panels_per_unit, int order) {
    return Grid(xi, panels_per_unit, order);
}

double sinc_kernel(double x) {
    const double u = kPi * x;
    if (std::abs(x) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

double sinc_integral(double x) {
    if (x == 0.0) return 0.0;
    if (x < 0.0) return -sinc_integral(-x);
    static const GaussRule rule = gauss_legendre(10);
    const int panels = std::max(1, static_cast<int>(std::ceil(x / 0.5 - 1e-12)));
    const double width = x / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        const double hlf = 0.5 * width;
        for (size_t g = 0; g < rule.nodes.size(); ++g)
            s += hlf * rule.weights[g] * sinc_kernel(mid + hlf * rule.nodes[g]);
    }
    return s;
}

}  // namespace sk::quadrature
