#pragma once

#include <vector>

#include "finite_section.hpp"
#include "linalg.hpp"

namespace sk::krein_factor {

// Lower-triangular V with positive diagonal and V^T V = A^{-1}.
struct TriangularFactor {
    linalg::LowerTriangular v;
    int size() const { return v.size(); }
};

// Direct build order: V = inv(chol(A)) by bordered recursion.
TriangularFactor reverse_cholesky(const linalg::Matrix& a);

// Cross-check build order operating on A^{-1} through the index-reversal
// permutation F: V = F * chol(F A^{-1} F)^T * F. Same factor by uniqueness.
TriangularFactor reverse_cholesky_via_flip(const linalg::Matrix& a);

// Reconstruction defect max|V^T V - A^{-1}| / max|A^{-1}|.
double reconstruction_defect(const TriangularFactor& f, const linalg::Matrix& a);

struct TriangularityReport {
    bool lower;
    double worst_violation;  // largest |entry| above the diagonal
    int first_cut;           // smallest projector cut that fails, -1 if none
};

// Discrete cut test: M is lower triangular iff Q_c M Q_c = M Q_c for every
// grid-aligned cut c, i.e. the strict upper triangle vanishes.
TriangularityReport is_lower_triangular(const linalg::Matrix& m, double tolerance);

struct KernelComparison {
    double max_rel_error;
    int pairs_checked;
    std::vector<double> row_positions;
};

// Unscale the strict lower triangle of V to kernel estimates
// V_ij / sqrt(w_i w_j) and compare with R_{s_i}(s_i, s_j) computed by fresh
// sub-sections on [0, s_i]. Only node pairs with s_i - s_j >= min_separation
// are compared (the diagonal region mixes identity and kernel at O(w)).
// The error is relative to the per-row kernel scale max_j |R|; the pointwise
// ratio is unbounded near the kernel zeros. check_rows <= 0 audits every row
// with s_i >= 2.
KernelComparison factor_vs_resolvent(const finite_section::Section& section,
                                     const TriangularFactor& factor,
                                     int check_rows = 0, double min_separation = 0.5);

struct QPair {
    std::vector<double> xs;
    std::vector<double> q1;
    std::vector<double> q2;
    double max_product_defect() const;  // max |q1 q2 - 1/2|
};

// One fresh section per sample x (used as the cross-check for ladder records).
QPair q_functions(double mu, const std::vector<double>& x_samples,
                  finite_section::GridParams params = {});

// Read the q pair off an incremental ladder (x = 0 record excluded).
QPair q_pair_from_ladder(const finite_section::IncrementalLadder& ladder);

struct ExponentialCheck {
    double max_deviation;   // max over ladder x of |q1(x) - exp int_0^x B|
    double tail_variation;  // max - min of the cumulative integral beyond x = 20
};

// q1(x) against exp(int_0^x B dt) with B integrated by the trapezoid rule on
// the ladder (the two pipelines share nothing past the resolvent solves).
ExponentialCheck krein_exponential_check(const finite_section::IncrementalLadder& ladder,
                                         double x_max);

struct FactorizationScalarRow {
    double xi;
    double m;        // M(xi) = int_0^xi (S_xi^{-1} 1)(x) dx
    double m_prime;  // central difference on the ladder
    double r;        // sqrt(M'(xi)), NaN when M' <= 0
    double m_consistency;  // |M(xi) - (xi - 2 int R_xi)/(1-mu)|
};

struct FactorizationScalarTable {
    std::vector<FactorizationScalarRow> rows;
    bool m_prime_positive;
};

// M, M', R = sqrt(M') along a ladder with spacing delta_xi (default 0.25).
// richardson combines the delta and 2*delta central stencils to fourth order.
FactorizationScalarTable factorization_scalars(const finite_section::IncrementalLadder& ladder,
                                   double xi_min, double xi_max, double delta_xi = 0.25,
                                   bool richardson = false);

}  // namespace sk::krein_factor
