#pragma once

#include <vector>

namespace sk::quadrature {

// n-point Gauss-Legendre rule on [-1,1]; exact for polynomials of degree <= 2n-1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Composite Gauss-Legendre grid on [0, xi]: uniform panels of width
// 1/panels_per_unit, last panel possibly shorter.
class Grid {
public:
    Grid() = default;
    Grid(double xi, int panels_per_unit, int order);

    double xi() const { return xi_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int panel_count() const { return static_cast<int>(panel_boundaries_.size()) - 1; }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& panel_boundaries() const { return panel_boundaries_; }
    int panel_of(int node_index) const { return node_index / order_; }

private:
    double xi_ = 0.0;
    int order_ = 0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> panel_boundaries_;
};

Grid composite_grid(double xi, int panels_per_unit, int order);

// sin(pi x)/(pi x) with the removable singularity handled by a Taylor branch
// below |x| = 1e-4 (both branches accurate to < 1e-16 relative).
double sinc_kernel(double x);

// \int_0^x sin(pi s)/(pi s) ds by composite Gauss panels (width <= 0.5, order 10).
// Handles x < 0 by oddness.
double sinc_integral(double x);

}  // namespace sk::quadrature
