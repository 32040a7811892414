#pragma once

#include <vector>

#include "finite_section.hpp"

namespace sk::asymptotics {

struct PainleveConstants {
    double a;  // log(1-mu)/pi
    double b;  // a^2/2
};

PainleveConstants painleve_constants(double mu);

// Per-t samples built from one incremental ladder on [0, 2(t_max+dt)]:
// diag = R_{2t}(2t,2t), corner = R_{2t}(2t,0), sigma = -2t*diag at x = 2 pi t.
struct AsymptoticsReport {
    double mu = 0.0;
    double dt = 0.0;
    double a = 0.0;
    double b = 0.0;
    std::vector<double> t;
    std::vector<double> diag;
    std::vector<double> corner;
    std::vector<double> sigma;
    std::vector<double> envelope;       // t * |corner(t)|
    std::vector<double> ode_residual;   // |d diag/dt - 2 corner^2|, NaN at ends
    std::vector<double> raw_dev;        // |diag + log(1-mu)|
    std::vector<double> corrected_dev;  // |diag + log(1-mu) + b/(2t)|

    double max_ode_residual(double t_lo, double t_hi) const;
    double raw_dev_at(double t_query) const;
    double corrected_dev_at(double t_query) const;
};

// dt must be half a reciprocal integer (the ladder spacing is 2*dt).
AsymptoticsReport run(double mu, double t_min, double t_max, double dt, int order = 4);

// Same, against a prebuilt ladder whose spacing equals 2*dt.
AsymptoticsReport run_from_ladder(const finite_section::IncrementalLadder& ladder,
                                  double t_min, double t_max, double dt);

struct PeakTable {
    std::vector<double> peak_t;
    std::vector<double> peak_height;  // refined local maxima of t |B(t)|
    std::vector<double> zero_t;       // refined zeros of B
    std::vector<double> zero_spacings;
    // sign of B at the first resolved extremum in the window; the amplitude
    // law leaves this orientation free, so it is recorded, not asserted
    int first_extremum_sign = 0;
};

// Local extrema of t|B(t)| by three-point scan plus parabolic refinement;
// zeros of B by sign-change bisection against fresh-section evaluations of
// R_x(x, 0) (never by extrapolating ladder samples).
PeakTable corner_envelope(const finite_section::IncrementalLadder& ladder, double t_lo,
                          double t_hi, finite_section::GridParams refine_params = {});

}  // namespace sk::asymptotics
