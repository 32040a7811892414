#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "linalg.hpp"
#include "quadrature.hpp"

namespace sk::finite_section {

using quadrature::Grid;

// M(x) = 1/2 - mu * \int_0^x sin(pi s)/(pi s) ds
double m_function(double x, double mu);
// q(x) = M(x) - (1-mu)/2
double q_remainder(double x, double mu);

struct GridParams {
    int panels_per_unit = 2;
    int order = 10;
};

// Symmetrized Nystrom section of the half-line operator restricted to [0, xi]:
// A_ij = delta_ij - mu sqrt(w_i) h(s_i - s_j) sqrt(w_j), with cached Cholesky.
// mu = 0 is admitted for tests only (identity operator); callers facing users
// must enforce 0 < mu < 1 themselves.
class Section {
public:
    Section(double mu, double xi, GridParams params = {});

    double mu() const { return mu_; }
    double xi() const { return grid_.xi(); }
    int size() const { return grid_.size(); }
    const Grid& grid() const { return grid_; }

    double matrix_entry(int i, int j) const;
    linalg::Matrix dense_matrix() const;

    // (S_xi f)(s_i) for node samples f.
    std::vector<double> apply(std::span<const double> f) const;

    // Node samples of S_xi^{-1} f for node samples f.
    std::vector<double> apply_inverse(std::span<const double> f) const;

    // Nystrom extension of u = S_xi^{-1} f to arbitrary x in [0, xi]; needs f
    // evaluable off the nodes: u(x) = f(x) + mu \int h(x-t) u(t) dt.
    double inverse_extension(const std::function<double(double)>& f,
                             std::span<const double> u_nodes, double x) const;

    // Node samples of the resolvent column R_xi(s_i, t).
    std::vector<double> resolvent_column(double t) const;

    // Nystrom-extended resolvent value R_xi(x, t).
    double resolvent_point(double x, double t) const;

    // Extension in the first argument from a known column at nodes.
    double extend_resolvent(std::span<const double> column, double x, double t) const;

    // Max pointwise residual of (S_xi 1)(x) = M(x) + M(xi - x) over the nodes.
    double s_one_identity_residual() const;

    // Node samples of R_xi(x) = (S_xi^{-1} q)(x).
    std::vector<double> resolvent_of_q() const;

    // Eigenvalues of the section matrix (ascending), by Jacobi rotation.
    std::vector<double> eigenvalues() const;

    const linalg::CholeskyEngine& engine() const { return chol_; }

private:
    double mu_;
    Grid grid_;
    std::vector<double> sqrt_w_;
    linalg::CholeskyEngine chol_;
};

Section build_section(double mu, double xi, GridParams params = {});

// Resolvent samples at all node pairs plus the Nystrom evaluator.
class ResolventField {
public:
    explicit ResolventField(const Section& section);

    int size() const { return n_; }
    double at_nodes(int i, int j) const { return values_[static_cast<size_t>(i) * n_ + j]; }
    double eval(double x, double t) const { return section_->resolvent_point(x, t); }
    double symmetry_defect() const;
    const Section& section() const { return *section_; }

private:
    const Section* section_;
    int n_;
    std::vector<double> values_;
};

ResolventField resolvent_kernel(const Section& section);

// One record per ladder boundary x: the corner values of the section on [0,x]
// together with the q-pair read off the endpoint resolvent row.
struct CornerRecord {
    double x;
    double b;     // R_x(x, 0)
    double diag;  // R_x(x, x)
    double q1;    // 1 + \int_0^x R_x(x,t) dt
    double q2;    // M(x) + \int_0^x M(t) R_x(x,t) dt
};

// Grows one global grid on [0, x_max] along uniform panels of width
// 1/panels_per_unit; every section on a panel boundary is a leading principal
// submatrix of the global matrix, so one bordered Cholesky pass yields the
// whole family of corner values in O(N^3) total instead of O(N^4).
class IncrementalLadder {
public:
    IncrementalLadder(double mu, double x_max, int panels_per_unit, int order);

    double mu() const { return mu_; }
    double x_max() const { return grid_.xi(); }
    double step() const { return 1.0 / ppu_; }
    const Grid& grid() const { return grid_; }

    // records()[0] is the x = 0 limit {0, mu, mu, 1, 1/2}.
    const std::vector<CornerRecord>& records() const { return records_; }

    // Ladder index of boundary x (throws ConfigError when x is not a boundary).
    int index_of(double x) const;
    int nodes_at(int k) const { return counts_[k]; }

    // Services against the section prefix [0, x_k]:
    std::vector<double> solve_inverse(int k, std::span<const double> f_nodes) const;
    std::vector<double> solve_inverse_one(int k) const;      // S^{-1} 1
    std::vector<double> solve_resolvent_of_q(int k) const;   // S^{-1} q
    // L2(0, x_k) norm of node samples (prefix quadrature).
    double prefix_norm(int k, std::span<const double> samples) const;

    const std::vector<double>& m_at_nodes() const { return m_nodes_; }

private:
    double mu_;
    int ppu_;
    Grid grid_;
    std::vector<double> sqrt_w_;
    std::vector<double> m_nodes_;
    std::vector<double> q_nodes_;
    linalg::CholeskyEngine chol_;
    std::vector<CornerRecord> records_;
    std::vector<int> counts_;  // nodes in the prefix for ladder index k
};

}  // namespace sk::finite_section
