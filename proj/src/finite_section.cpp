#include "finite_section.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace sk::finite_section {

using quadrature::sinc_kernel;

double m_function(double x, double mu) {
    if (x < 0.0) throw ConfigError("m_function: x must be >= 0");
    return 0.5 - mu * quadrature::sinc_integral(x);
}

double q_remainder(double x, double mu) { return m_function(x, mu) - 0.5 * (1.0 - mu); }

namespace {

void check_mu(double mu) {
    if (!(mu >= 0.0) || !(mu < 1.0))
        throw ConfigError("coupling constant must satisfy 0 <= mu < 1 (mu = 0 test only)");
}

}  // namespace

Section::Section(double mu, double xi, GridParams params)
    : mu_(mu), grid_(xi, params.panels_per_unit, params.order), chol_(0) {
    check_mu(mu);
    const int n = grid_.size();
    sqrt_w_.resize(n);
    for (int i = 0; i < n; ++i) sqrt_w_[i] = std::sqrt(grid_.weights()[i]);

    chol_ = linalg::CholeskyEngine(n);
    std::vector<double> row(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) row[j] = matrix_entry(i, j);
        chol_.add_row(std::span<const double>(row.data(), i + 1));
    }
}

Section build_section(double mu, double xi, GridParams params) {
    return Section(mu, xi, params);
}

double Section::matrix_entry(int i, int j) const {
    // weight product first and |difference| keep the entry bit-symmetric in (i, j)
    const auto& s = grid_.nodes();
    return (i == j ? 1.0 : 0.0) -
           mu_ * (sqrt_w_[i] * sqrt_w_[j]) * sinc_kernel(std::abs(s[i] - s[j]));
}

linalg::Matrix Section::dense_matrix() const {
    const int n = size();
    linalg::Matrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.at(i, j) = matrix_entry(i, j);
    return a;
}

std::vector<double> Section::apply(std::span<const double> f) const {
    const int n = size();
    if (static_cast<int>(f.size()) != n) throw DimensionMismatch("Section::apply: length mismatch");
    const auto& s = grid_.nodes();
    const auto& w = grid_.weights();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += w[j] * sinc_kernel(s[i] - s[j]) * f[j];
        out[i] = f[i] - mu_ * acc;
    }
    return out;
}

std::vector<double> Section::apply_inverse(std::span<const double> f) const {
    const int n = size();
    if (static_cast<int>(f.size()) != n)
        throw DimensionMismatch("Section::apply_inverse: length mismatch");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = sqrt_w_[i] * f[i];
    chol_.solve(x);
    for (int i = 0; i < n; ++i) x[i] /= sqrt_w_[i];
    return x;
}

double Section::inverse_extension(const std::function<double(double)>& f,
                                  std::span<const double> u_nodes, double x) const {
    const auto& s = grid_.nodes();
    const auto& w = grid_.weights();
    double acc = 0.0;
    for (int j = 0; j < size(); ++j) acc += w[j] * sinc_kernel(x - s[j]) * u_nodes[j];
    return f(x) + mu_ * acc;
}

std::vector<double> Section::resolvent_column(double t) const {
    const int n = size();
    const auto& s = grid_.nodes();
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = mu_ * sqrt_w_[i] * sinc_kernel(s[i] - t);
    chol_.solve(c);
    for (int i = 0; i < n; ++i) c[i] /= sqrt_w_[i];
    return c;
}

double Section::extend_resolvent(std::span<const double> column, double x, double t) const {
    const auto& s = grid_.nodes();
    const auto& w = grid_.weights();
    double acc = 0.0;
    for (int j = 0; j < size(); ++j) acc += w[j] * sinc_kernel(x - s[j]) * column[j];
    return mu_ * sinc_kernel(x - t) + mu_ * acc;
}

double Section::resolvent_point(double x, double t) const {
    const auto c = resolvent_column(t);
    return extend_resolvent(c, x, t);
}

double Section::s_one_identity_residual() const {
    const int n = size();
    std::vector<double> ones(n, 1.0);
    const auto lhs = apply(ones);
    const auto& s = grid_.nodes();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double rhs = m_function(s[i], mu_) + m_function(xi() - s[i], mu_);
        worst = std::max(worst, std::abs(lhs[i] - rhs));
    }
    return worst;
}

std::vector<double> Section::resolvent_of_q() const {
    const int n = size();
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = q_remainder(grid_.nodes()[i], mu_);
    return apply_inverse(q);
}

std::vector<double> Section::eigenvalues() const {
    return linalg::jacobi_eigen(dense_matrix()).values;
}

ResolventField::ResolventField(const Section& section) : section_(&section), n_(section.size()) {
    values_.resize(static_cast<size_t>(n_) * n_);
    const auto& s = section.grid().nodes();
    for (int j = 0; j < n_; ++j) {
        const auto col = section.resolvent_column(s[j]);
        for (int i = 0; i < n_; ++i) values_[static_cast<size_t>(i) * n_ + j] = col[i];
    }
}

double ResolventField::symmetry_defect() const {
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            worst = std::max(worst, std::abs(at_nodes(i, j) - at_nodes(j, i)));
            scale = std::max(scale, std::abs(at_nodes(i, j)));
        }
    return scale > 0.0 ? worst / scale : 0.0;
}

ResolventField resolvent_kernel(const Section& section) { return ResolventField(section); }

IncrementalLadder::IncrementalLadder(double mu, double x_max, int panels_per_unit, int order)
    : mu_(mu), ppu_(panels_per_unit), grid_(x_max, panels_per_unit, order), chol_(0) {
    check_mu(mu);
    const double width = 1.0 / panels_per_unit;
    const int panels = grid_.panel_count();
    if (std::abs(grid_.panel_boundaries().back() - panels * width) > 1e-9)
        throw ConfigError("IncrementalLadder: x_max must be a multiple of the panel width");

    const int n = grid_.size();
    const auto& s = grid_.nodes();
    const auto& w = grid_.weights();
    sqrt_w_.resize(n);
    for (int i = 0; i < n; ++i) sqrt_w_[i] = std::sqrt(w[i]);
    m_nodes_.resize(n);
    q_nodes_.resize(n);
    for (int i = 0; i < n; ++i) {
        m_nodes_[i] = m_function(s[i], mu_);
        q_nodes_[i] = m_nodes_[i] - 0.5 * (1.0 - mu_);
    }

    chol_ = linalg::CholeskyEngine(n);
    records_.reserve(panels + 1);
    counts_.reserve(panels + 1);
    // x = 0 limits: R_0(x,t) = mu h(x-t).
    records_.push_back({0.0, mu_, mu_, 1.0, 0.5});
    counts_.push_back(0);

    std::vector<double> row(n), col0, colx;
    for (int p = 0; p < panels; ++p) {
        for (int i = p * order; i < (p + 1) * order; ++i) {
            for (int j = 0; j <= i; ++j)
                row[j] = (i == j ? 1.0 : 0.0) -
                         mu_ * (sqrt_w_[i] * sqrt_w_[j]) * sinc_kernel(std::abs(s[i] - s[j]));
            chol_.add_row(std::span<const double>(row.data(), i + 1));
        }
        const int m = (p + 1) * order;
        const double x = grid_.panel_boundaries()[p + 1];

        col0.resize(m);
        colx.resize(m);
        for (int i = 0; i < m; ++i) {
            col0[i] = mu_ * sqrt_w_[i] * sinc_kernel(s[i]);
            colx[i] = mu_ * sqrt_w_[i] * sinc_kernel(s[i] - x);
        }
        chol_.solve_prefix(m, col0);
        chol_.solve_prefix(m, colx);
        for (int i = 0; i < m; ++i) {
            col0[i] /= sqrt_w_[i];  // R_x(s_i, 0)
            colx[i] /= sqrt_w_[i];  // R_x(s_i, x)
        }

        double ext0 = 0.0, extx = 0.0, q1 = 0.0, q2 = 0.0;
        for (int i = 0; i < m; ++i) {
            const double hw = w[i] * sinc_kernel(x - s[i]);
            ext0 += hw * col0[i];
            extx += hw * colx[i];
            q1 += w[i] * colx[i];
            q2 += w[i] * m_nodes_[i] * colx[i];
        }
        CornerRecord rec;
        rec.x = x;
        rec.b = mu_ * sinc_kernel(x) + mu_ * ext0;
        rec.diag = mu_ + mu_ * extx;
        rec.q1 = 1.0 + q1;
        rec.q2 = m_function(x, mu_) + q2;
        records_.push_back(rec);
        counts_.push_back(m);
    }
}

int IncrementalLadder::index_of(double x) const {
    const double k = x * ppu_;
    const int ki = static_cast<int>(std::llround(k));
    if (std::abs(k - ki) > 1e-9 || ki < 0 || ki >= static_cast<int>(records_.size()))
        throw ConfigError("IncrementalLadder: requested x is not a ladder boundary");
    return ki;
}

std::vector<double> IncrementalLadder::solve_inverse(int k, std::span<const double> f_nodes) const {
    const int m = counts_[k];
    if (static_cast<int>(f_nodes.size()) != m)
        throw DimensionMismatch("IncrementalLadder::solve_inverse: length mismatch");
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = sqrt_w_[i] * f_nodes[i];
    chol_.solve_prefix(m, x);
    for (int i = 0; i < m; ++i) x[i] /= sqrt_w_[i];
    return x;
}

std::vector<double> IncrementalLadder::solve_inverse_one(int k) const {
    std::vector<double> ones(counts_[k], 1.0);
    return solve_inverse(k, ones);
}

std::vector<double> IncrementalLadder::solve_resolvent_of_q(int k) const {
    return solve_inverse(k, std::span<const double>(q_nodes_.data(), counts_[k]));
}

double IncrementalLadder::prefix_norm(int k, std::span<const double> samples) const {
    const auto& w = grid_.weights();
    double acc = 0.0;
    for (int j = 0; j < counts_[k]; ++j) acc += w[j] * samples[j] * samples[j];
    return std::sqrt(acc);
}

}  // namespace sk::finite_section
