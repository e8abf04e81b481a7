#pragma once

#include <vector>

#include "lclt/errors.hpp"

namespace lclt {

// Dense row-major square matrix; the covariance work here never exceeds a
// handful of dimensions, so everything is plain O(n^3) with partial pivoting.
class Matrix {
  public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}
    static Matrix identity(int n);

    int dim() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator*(const Matrix& o) const;
    Matrix scaled(double s) const;
    Matrix transpose() const;

    double max_abs() const;
    bool is_symmetric(double tol) const;

    // Determinant of the leading r x r block via LU with partial pivoting.
    double leading_minor(int r) const;
    // Lower-triangular Cholesky factor; success flag false when a pivot is
    // not safely positive.
    bool cholesky(Matrix& lower, double pivot_tol = 0.0) const;
    // Gauss-Jordan inverse; throws on (numerically) singular input.
    Matrix inverse() const;
    double determinant() const { return leading_minor(n_); }

    // Largest eigenvalue of a symmetric matrix by power iteration with a
    // deterministic start vector; falls back to cyclic Jacobi if the
    // iteration stalls.
    double sym_eig_max() const;
    // All eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
    std::vector<double> sym_eigenvalues() const;

    const std::vector<double>& data() const { return a_; }

  private:
    int n_ = 0;
    std::vector<double> a_;
};

}  // namespace lclt
