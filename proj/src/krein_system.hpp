#pragma once

#include <complex>
#include <vector>

#include "finite_section.hpp"

namespace sk::krein_system {

using Complex = std::complex<double>;

// Natural cubic spline on ascending knots, with exact piecewise integration.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> xs, std::vector<double> ys);

    double eval(double x) const;
    // \int_{xs.front()}^{x}
    double integral(double x) const;
    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }

private:
    int interval(double x) const;
    std::vector<double> xs_, y_, b_, c_, d_, cum_;
};

// Samples of B(x) = R_x(x, 0, mu) on the panel ladder, cubic interpolation in
// between. Drives every ODE integration in this module.
struct CoefficientTable {
    double mu = 0.0;
    double spacing = 0.0;
    std::vector<double> xs;
    std::vector<double> b;
    CubicSpline spline;

    double eval(double x) const { return spline.eval(x); }
    double cumulative_integral(double x) const { return spline.integral(x); }
    double x_max() const { return xs.back(); }
    // \int_lo^hi B^2 dx (trapezoид on a fine subsample of the interpolant).
    double square_integral(double lo, double hi) const;
};

CoefficientTable table_from_ladder(const finite_section::IncrementalLadder& ladder);
CoefficientTable sample_b(double mu, double x_max, double ladder_step, int order = 6);

// q1/q2 interpolants read off the same ladder (for the 2x2 canonical system).
struct QTables {
    CubicSpline q1;
    CubicSpline q2;
};

QTables q_tables_from_ladder(const finite_section::IncrementalLadder& ladder);

enum class InitKind { standard, hat };  // (1,1) or (1/2,-1/2)

struct Trajectory {
    Complex z;
    InitKind init = InitKind::standard;
    int coupling_sign = +1;
    std::vector<double> xs;
    std::vector<Complex> p;
    std::vector<Complex> p_star;

    Complex p_end() const { return p.back(); }
    Complex p_star_end() const { return p_star.back(); }
    // max over samples with x >= 1 of | |P|^2 - |P*|^2 | / x (zero for both inits).
    double conservation_defect() const;
};

// Classical fixed-step RK4 on dP/dx = (iz/2) P - s B(x) P*, dP*/dx = -s B(x) P,
// where s = coupling_sign. step = 0 picks min(0.02, spacing/4); an explicit
// larger step throws StepSizeError.
Trajectory integrate_krein(const CoefficientTable& table, Complex z, double x_max,
                           InitKind init = InitKind::standard, double step = 0.0,
                           int coupling_sign = +1);

// Closed-form Szego function of the two-level spectral density: Im z > 0 by
// the principal-branch log difference, real axis by the explicit limit
// formulas. Throws BranchError at |x| = 2 pi on the real axis.
Complex pi_closed(double mu, Complex z);

// Independent oracle: composite Gauss quadrature of the defining contour
// integral (Im z > 0 only). Never calls pi_closed.
Complex pi_by_quadrature(double mu, Complex z, int panels = 64, int order = 12);

// Weyl function: Im z > 0 closed form, real |x| < 2 pi by the limit formula.
// Throws PoleError at z = +-2 pi.
Complex weyl_v(double mu, Complex z);

Complex hat_pi_closed(double mu, Complex z);

// ODE-side spectral estimators. The coefficient orientation whose Szego
// limits reproduce the closed forms is the dual one (coupling_sign = -1,
// reciprocal association); see README. v_ode adds the elementary rational
// term of the Weyl normalization in closed form.
struct SpectralEstimates {
    Complex pi_ode;      // 1 / lim P*
    Complex m_ode;       // -i lim hatP* / lim P*  (Herglotz part)
    Complex v_ode;       // m_ode + 2 z mu / (4 pi^2 - z^2)
    Complex hat_pi_ode;  // i v_ode pi_ode
    double hat_p_end_abs;  // |hatP(x_max)|, must decay
};

SpectralEstimates spectral_estimates(const CoefficientTable& table, Complex z, double x_max,
                                     double step = 0.0);

struct Mat2 {
    Complex a, b, c, d;  // [[a,b],[c,d]]
};

struct CanonicalResult {
    Complex z;
    std::vector<double> xs;
    std::vector<Mat2> w;
    double max_system_residual;  // transformed first-order system
    double max_det_h;            // max |q1^2 q2^2 - 1/4|
    double max_rank1_defect;     // max |JH - T P T^{-1}|
};

CanonicalResult canonical_system(const finite_section::IncrementalLadder& ladder, Complex z,
                                 double x_max, double step = 0.0, double sample_dx = 0.5);

struct W21Result {
    Complex boundary_form;   // e^{iz xi} G(xi,z) - conj(G(xi, conj z))
    Complex direct_form;  // e^{iz xi} iz \int e^{-izx} (S^{-1} 1) dx (stable rearrangement)
    Complex g;            // G(xi, z) when representable, else NaN
};

W21Result w21_both(const finite_section::Section& section, Complex z);
W21Result w21_both_ladder(const finite_section::IncrementalLadder& ladder, int k, Complex z);

}  // namespace sk::krein_system
