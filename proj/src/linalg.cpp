#include "linalg.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace sk::linalg {

Matrix identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix multiply(const Matrix& x, const Matrix& y) {
    if (x.n != y.n) throw DimensionMismatch("multiply: size mismatch");
    const int n = x.n;
    Matrix r(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double xik = x.at(i, k);
            if (xik == 0.0) continue;
            const double* yrow = y.a.data() + static_cast<size_t>(k) * n;
            double* rrow = r.a.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) rrow[j] += xik * yrow[j];
        }
    }
    return r;
}

Matrix transpose(const Matrix& x) {
    Matrix r(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r.at(j, i) = x.at(i, j);
    return r;
}

Matrix flip(const Matrix& x) {
    const int n = x.n;
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(i, j) = x.at(n - 1 - i, n - 1 - j);
    return r;
}

double max_abs_diff(const Matrix& x, const Matrix& y) {
    if (x.n != y.n) throw DimensionMismatch("max_abs_diff: size mismatch");
    double m = 0.0;
    for (size_t k = 0; k < x.a.size(); ++k) m = std::max(m, std::abs(x.a[k] - y.a[k]));
    return m;
}

double max_abs(const Matrix& x) {
    double m = 0.0;
    for (double v : x.a) m = std::max(m, std::abs(v));
    return m;
}

Matrix LowerTriangular::dense() const {
    Matrix m(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j <= i; ++j) m.at(i, j) = at(i, j);
    return m;
}

CholeskyEngine::CholeskyEngine(int capacity) : capacity_(capacity), l_(capacity) {}

void CholeskyEngine::add_row(std::span<const double> row) {
    const int i = n_;
    if (i >= capacity_) throw DimensionMismatch("CholeskyEngine: capacity exceeded");
    if (static_cast<int>(row.size()) != i + 1)
        throw DimensionMismatch("CholeskyEngine: bordering row has wrong length");

    double* li = l_.row(i);
    // Forward-substitute L[0:i,0:i] y = row[0:i]; y becomes the new off-diagonal row.
    for (int j = 0; j < i; ++j) {
        const double* lj = l_.row(j);
        double s = row[j];
        for (int k = 0; k < j; ++k) s -= lj[k] * li[k];
        li[j] = s / lj[j];
    }
    double d = row[i];
    for (int k = 0; k < i; ++k) d -= li[k] * li[k];
    if (!(d > 0.0) || !std::isfinite(d))
        throw NumericalError("Cholesky pivot not positive: matrix not positive definite "
                             "(quadrature too coarse or coupling out of range)");
    li[i] = std::sqrt(d);
    ++n_;
}

void CholeskyEngine::forward_prefix(int m, std::span<double> x) const {
    if (m > n_ || static_cast<int>(x.size()) != m)
        throw DimensionMismatch("forward_prefix: bad size");
    for (int i = 0; i < m; ++i) {
        const double* li = l_.row(i);
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= li[k] * x[k];
        x[i] = s / li[i];
    }
}

void CholeskyEngine::backward_prefix(int m, std::span<double> x) const {
    if (m > n_ || static_cast<int>(x.size()) != m)
        throw DimensionMismatch("backward_prefix: bad size");
    for (int i = m - 1; i >= 0; --i) {
        const double* li = l_.row(i);
        const double xi = x[i] / li[i];
        x[i] = xi;
        for (int k = 0; k < i; ++k) x[k] -= li[k] * xi;
    }
}

void CholeskyEngine::solve_prefix(int m, std::span<double> x) const {
    forward_prefix(m, x);
    backward_prefix(m, x);
}

LowerTriangular cholesky(const Matrix& a) {
    const int n = a.n;
    CholeskyEngine eng(n);
    std::vector<double> row;
    for (int i = 0; i < n; ++i) {
        row.assign(a.a.begin() + static_cast<size_t>(i) * n,
                   a.a.begin() + static_cast<size_t>(i) * n + i + 1);
        eng.add_row(row);
    }
    return eng.factor();
}

LowerTriangular invert_lower(const LowerTriangular& l) {
    const int n = l.size();
    LowerTriangular v(n);
    // Column j of V solves L v_j = e_j; v_j vanishes above j.
    std::vector<double> col(n);
    for (int j = 0; j < n; ++j) {
        col[j] = 1.0 / l.at(j, j);
        for (int i = j + 1; i < n; ++i) {
            const double* li = l.row(i);
            double s = 0.0;
            for (int k = j; k < i; ++k) s += li[k] * col[k];
            col[i] = -s / li[i];
        }
        for (int i = j; i < n; ++i) v.at(i, j) = col[i];
    }
    return v;
}

SymmetricEigen jacobi_eigen(const Matrix& a_in, int max_sweeps) {
    const int n = a_in.n;
    Matrix a = a_in;
    Matrix q = identity(n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
        if (off < 1e-26 * std::max(1.0, max_abs(a) * max_abs(a))) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int qi = p + 1; qi < n; ++qi) {
                const double apq = a.at(p, qi);
                if (std::abs(apq) < 1e-300) continue;
                const double app = a.at(p, p), aqq = a.at(qi, qi);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a.at(k, p), akq = a.at(k, qi);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, qi) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a.at(p, k), aqk = a.at(qi, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(qi, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double qkp = q.at(k, p), qkq = q.at(k, qi);
                    q.at(k, p) = c * qkp - s * qkq;
                    q.at(k, qi) = s * qkp + c * qkq;
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = a.at(i, i);
    out.vectors = q;
    // Sort ascending, permuting columns alongside.
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(),
              [&](int x, int y) { return out.values[x] < out.values[y]; });
    SymmetricEigen sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(n);
    for (int k = 0; k < n; ++k) {
        sorted.values[k] = out.values[perm[k]];
        for (int i = 0; i < n; ++i) sorted.vectors.at(i, k) = out.vectors.at(i, perm[k]);
    }
    return sorted;
}

Matrix symmetric_apply(const SymmetricEigen& eig, double (*f)(double)) {
    const int n = eig.vectors.n;
    Matrix r(n);
    for (int k = 0; k < n; ++k) {
        const double fk = f(eig.values[k]);
        for (int i = 0; i < n; ++i) {
            const double qik = eig.vectors.at(i, k) * fk;
            if (qik == 0.0) continue;
            for (int j = 0; j < n; ++j) r.at(i, j) += qik * eig.vectors.at(j, k);
        }
    }
    return r;
}

}  // namespace sk::linalg
