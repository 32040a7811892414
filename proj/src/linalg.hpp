#pragma once

#include <span>
#include <vector>

namespace sk::linalg {

// Dense square matrix, row-major.
struct Matrix {
    int n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(int size) : n(size), a(static_cast<size_t>(size) * size, 0.0) {}

    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

Matrix identity(int n);
Matrix multiply(const Matrix& x, const Matrix& y);
Matrix transpose(const Matrix& x);
// Reverse both row and column order (the index-reversal permutation F M F).
Matrix flip(const Matrix& x);
double max_abs_diff(const Matrix& x, const Matrix& y);
double max_abs(const Matrix& x);

// Lower-triangular matrix in packed row-major storage: row i holds i+1 entries.
class LowerTriangular {
public:
    LowerTriangular() = default;
    explicit LowerTriangular(int n) : n_(n), a_(static_cast<size_t>(n) * (n + 1) / 2, 0.0) {}

    int size() const { return n_; }
    double at(int i, int j) const { return a_[idx(i, j)]; }
    double& at(int i, int j) { return a_[idx(i, j)]; }
    const double* row(int i) const { return a_.data() + static_cast<size_t>(i) * (i + 1) / 2; }
    double* row(int i) { return a_.data() + static_cast<size_t>(i) * (i + 1) / 2; }

    Matrix dense() const;

private:
    static size_t idx(int i, int j) { return static_cast<size_t>(i) * (i + 1) / 2 + j; }
    int n_ = 0;
    std::vector<double> a_;
};

// Cholesky factor grown one bordering row at a time, so that after k rows the
// factor of the leading principal k x k submatrix is complete and reusable.
class CholeskyEngine {
public:
    CholeskyEngine() = default;
    explicit CholeskyEngine(int capacity);

    int size() const { return n_; }

    // Append row i = n of the symmetric matrix (entries A[n][0..n] inclusive).
    // Throws NumericalError when the pivot is not strictly positive.
    void add_row(std::span<const double> row);

    // Solve A[0:m,0:m] x = b in place against the stored factor prefix.
    void solve_prefix(int m, std::span<double> x) const;
    void solve(std::span<double> x) const { solve_prefix(n_, x); }

    void forward_prefix(int m, std::span<double> x) const;   // L y = b
    void backward_prefix(int m, std::span<double> x) const;  // L^T x = y

    const LowerTriangular& factor() const { return l_; }

private:
    int n_ = 0;
    int capacity_ = 0;
    LowerTriangular l_;
};

// Cholesky of a dense symmetric positive definite matrix (bordered recursion).
LowerTriangular cholesky(const Matrix& a);

// Inverse of a lower-triangular matrix (by forward substitution per column).
LowerTriangular invert_lower(const LowerTriangular& l);

// Cyclic-Jacobi eigendecomposition of a dense symmetric matrix.
// vectors column k (i.e. vectors.at(:,k)) is the eigenvector of values[k];
// eigenvalues ascending.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};

SymmetricEigen jacobi_eigen(const Matrix& a, int max_sweeps = 64);

// Symmetric functional calculus: Q f(Lambda) Q^T from a SymmetricEigen.
Matrix symmetric_apply(const SymmetricEigen& eig, double (*f)(double));

}  // namespace sk::linalg
