#include "krein_factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "krein_system.hpp"

namespace sk::krein_factor {

using linalg::Matrix;

TriangularFactor reverse_cholesky(const Matrix& a) {
    return {linalg::invert_lower(linalg::cholesky(a))};
}

TriangularFactor reverse_cholesky_via_flip(const Matrix& a) {
    const int n = a.n;
    // A^{-1} column by column through the Cholesky factor of A.
    linalg::CholeskyEngine eng(n);
    {
        std::vector<double> row(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) row[j] = a.at(i, j);
            eng.add_row(std::span<const double>(row.data(), i + 1));
        }
    }
    Matrix inv(n);
    std::vector<double> col(n);
    for (int j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0;
        eng.solve(col);
        for (int i = 0; i < n; ++i) inv.at(i, j) = col[i];
    }
    const Matrix flipped = linalg::flip(inv);
    const linalg::LowerTriangular lf = linalg::cholesky(flipped);
    // V = F lf^T F: V(i,j) = lf(n-1-j, n-1-i).
    linalg::LowerTriangular v(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) v.at(i, j) = lf.at(n - 1 - j, n - 1 - i);
    return {v};
}

double reconstruction_defect(const TriangularFactor& f, const Matrix& a) {
    const int n = a.n;
    // A^{-1} by solves.
    linalg::LowerTriangular l = linalg::cholesky(a);
    linalg::CholeskyEngine eng(n);
    {
        std::vector<double> row(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) row[j] = a.at(i, j);
            eng.add_row(std::span<const double>(row.data(), i + 1));
        }
    }
    Matrix inv(n);
    std::vector<double> col(n);
    for (int j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0;
        eng.solve(col);
        for (int i = 0; i < n; ++i) inv.at(i, j) = col[i];
    }
    // V^T V.
    const Matrix vd = f.v.dense();
    const Matrix vtv = linalg::multiply(linalg::transpose(vd), vd);
    return linalg::max_abs_diff(vtv, inv) / std::max(1e-300, linalg::max_abs(inv));
}

TriangularityReport is_lower_triangular(const Matrix& m, double tolerance) {
    TriangularityReport rep{true, 0.0, -1};
    for (int i = 0; i < m.n; ++i) {
        for (int j = i + 1; j < m.n; ++j) {
            const double v = std::abs(m.at(i, j));
            if (v > rep.worst_violation) rep.worst_violation = v;
            if (v > tolerance && rep.lower) {
                rep.lower = false;
                rep.first_cut = i + 1;  // Q_c with c = i+1 exposes entry (i, j)
            }
        }
    }
    return rep;
}

KernelComparison factor_vs_resolvent(const finite_section::Section& section,
                                     const TriangularFactor& factor, int check_rows,
                                     double min_separation) {
    const auto& s = section.grid().nodes();
    const auto& w = section.grid().weights();
    const int n = section.size();
    const double xi = section.xi();
    const int ppu = static_cast<int>(std::lround(1.0 /
        (section.grid().panel_boundaries()[1] - section.grid().panel_boundaries()[0])));

    KernelComparison cmp{0.0, 0, {}};
    std::vector<int> rows;
    if (check_rows <= 0) {
        for (int i = 0; i < n; ++i)
            if (s[i] >= 2.0) rows.push_back(i);
    } else {
        for (int r = 0; r < check_rows; ++r) {
            const double target = 2.0 + (xi - 2.0) * (r + 1.0) / check_rows;
            int i = 0;
            while (i < n - 1 && s[i] < target) ++i;
            rows.push_back(i);
        }
    }
    // Each fresh sub-section on [0, s_i] supplies the whole row R_{s_i}(s_i, .)
    // through one endpoint column solve.
    for (int i : rows) {
        const double x = s[i];
        finite_section::Section sub(section.mu(), x, {ppu, section.grid().order()});
        const auto col = sub.resolvent_column(x);  // R_x(sigma_m, x)
        cmp.row_positions.push_back(x);
        double worst = 0.0, scale = 0.0;
        for (int j = 0; j < i; ++j) {
            if (x - s[j] < min_separation) continue;
            const double ref = sub.extend_resolvent(col, s[j], x);  // R_x(s_j, x) = R_x(x, s_j)
            const double est = factor.v.at(i, j) / std::sqrt(w[i] * w[j]);
            worst = std::max(worst, std::abs(est - ref));
            scale = std::max(scale, std::abs(ref));
            ++cmp.pairs_checked;
        }
        if (scale > 0.0)
            cmp.max_rel_error = std::max(cmp.max_rel_error, worst / scale);
    }
    return cmp;
}

double QPair::max_product_defect() const {
    double worst = 0.0;
    for (size_t i = 0; i < xs.size(); ++i)
        worst = std::max(worst, std::abs(q1[i] * q2[i] - 0.5));
    return worst;
}

QPair q_functions(double mu, const std::vector<double>& x_samples,
                  finite_section::GridParams params) {
    QPair out;
    for (double x : x_samples) {
        if (x <= 0.0) throw ConfigError("q_functions: samples must be positive");
        finite_section::Section sec(mu, x, params);
        const auto col = sec.resolvent_column(x);  // R_x(s_i, x)
        const auto& s = sec.grid().nodes();
        const auto& w = sec.grid().weights();
        double q1 = 0.0, q2 = 0.0;
        for (int i = 0; i < sec.size(); ++i) {
            q1 += w[i] * col[i];
            q2 += w[i] * finite_section::m_function(s[i], mu) * col[i];
        }
        out.xs.push_back(x);
        out.q1.push_back(1.0 + q1);
        out.q2.push_back(finite_section::m_function(x, mu) + q2);
    }
    return out;
}

QPair q_pair_from_ladder(const finite_section::IncrementalLadder& ladder) {
    QPair out;
    const auto& recs = ladder.records();
    for (size_t k = 1; k < recs.size(); ++k) {
        out.xs.push_back(recs[k].x);
        out.q1.push_back(recs[k].q1);
        out.q2.push_back(recs[k].q2);
    }
    return out;
}

ExponentialCheck krein_exponential_check(const finite_section::IncrementalLadder& ladder,
                                         double x_max) {
    const auto table = krein_system::table_from_ladder(ladder);
    const auto& recs = ladder.records();
    ExponentialCheck out{0.0, 0.0};
    double tail_min = 0.0, tail_max = 0.0;
    bool tail_seen = false;
    for (size_t k = 1; k < recs.size() && recs[k].x <= x_max + 1e-12; ++k) {
        const double integral = table.cumulative_integral(recs[k].x);
        out.max_deviation =
            std::max(out.max_deviation, std::abs(recs[k].q1 - std::exp(integral)));
        if (recs[k].x >= 20.0 - 1e-12) {
            if (!tail_seen) {
                tail_min = tail_max = integral;
                tail_seen = true;
            }
            tail_min = std::min(tail_min, integral);
            tail_max = std::max(tail_max, integral);
        }
    }
    out.tail_variation = tail_seen ? tail_max - tail_min : 0.0;
    return out;
}

FactorizationScalarTable factorization_scalars(const finite_section::IncrementalLadder& ladder,
                                   double xi_min, double xi_max, double delta_xi,
                                   bool richardson) {
    const double mu = ladder.mu();
    std::vector<double> xis, ms, int_r;
    for (double xi = xi_min; xi <= xi_max + 1e-9; xi += delta_xi) {
        const int k = ladder.index_of(xi);
        const auto u = ladder.solve_inverse_one(k);
        const auto rq = ladder.solve_resolvent_of_q(k);
        const auto& w = ladder.grid().weights();
        double m = 0.0, ir = 0.0;
        for (int j = 0; j < ladder.nodes_at(k); ++j) {
            m += w[j] * u[j];
            ir += w[j] * rq[j];
        }
        xis.push_back(xi);
        ms.push_back(m);
        int_r.push_back(ir);
    }
    FactorizationScalarTable table;
    table.m_prime_positive = true;
    for (size_t i = 0; i < xis.size(); ++i) {
        FactorizationScalarRow row;
        row.xi = xis[i];
        row.m = ms[i];
        const bool interior =
            richardson ? (i >= 2 && i + 2 < xis.size()) : (i >= 1 && i + 1 < xis.size());
        if (!interior) {
            row.m_prime = std::numeric_limits<double>::quiet_NaN();
            row.r = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double d1 = (ms[i + 1] - ms[i - 1]) / (2.0 * delta_xi);
            row.m_prime = d1;
            if (richardson) {
                const double d2 = (ms[i + 2] - ms[i - 2]) / (4.0 * delta_xi);
                row.m_prime = (4.0 * d1 - d2) / 3.0;
            }
            if (row.m_prime > 0.0) {
                row.r = std::sqrt(row.m_prime);
            } else {
                row.r = std::numeric_limits<double>::quiet_NaN();
                table.m_prime_positive = false;
            }
        }
        row.m_consistency = std::abs(row.m - (xis[i] - 2.0 * int_r[i]) / (1.0 - mu));
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace sk::krein_factor
