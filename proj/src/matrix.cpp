#include "lclt/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace lclt {

Matrix Matrix::identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::operator+(const Matrix& o) const {
    Matrix r(n_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    Matrix r(n_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
    Matrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            double v = (*this)(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < n_; ++j) r(i, j) += v * o(k, j);
        }
    return r;
}

Matrix Matrix::scaled(double s) const {
    Matrix r(n_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
    return r;
}

Matrix Matrix::transpose() const {
    Matrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::is_symmetric(double tol) const {
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

double Matrix::leading_minor(int r) const {
    if (r < 1 || r > n_) throw std::invalid_argument("leading_minor: order out of range");
    std::vector<double> lu(static_cast<size_t>(r) * r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) lu[static_cast<size_t>(i) * r + j] = (*this)(i, j);
    double det = 1.0;
    for (int c = 0; c < r; ++c) {
        int piv = c;
        for (int i = c + 1; i < r; ++i)
            if (std::abs(lu[static_cast<size_t>(i) * r + c]) >
                std::abs(lu[static_cast<size_t>(piv) * r + c]))
                piv = i;
        if (piv != c) {
            for (int j = 0; j < r; ++j)
                std::swap(lu[static_cast<size_t>(piv) * r + j], lu[static_cast<size_t>(c) * r + j]);
            det = -det;
        }
        double d = lu[static_cast<size_t>(c) * r + c];
        det *= d;
        if (d == 0.0) return 0.0;
        for (int i = c + 1; i < r; ++i) {
            double f = lu[static_cast<size_t>(i) * r + c] / d;
            for (int j = c; j < r; ++j)
                lu[static_cast<size_t>(i) * r + j] -= f * lu[static_cast<size_t>(c) * r + j];
        }
    }
    return det;
}

bool Matrix::cholesky(Matrix& lower, double pivot_tol) const {
    Matrix L(n_);
    for (int j = 0; j < n_; ++j) {
        double d = (*this)(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > pivot_tol)) return false;
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n_; ++i) {
            double v = (*this)(i, j);
            for (int k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
            L(i, j) = v / L(j, j);
        }
    }
    lower = std::move(L);
    return true;
}

Matrix Matrix::inverse() const {
    int n = n_;
    std::vector<double> aug(static_cast<size_t>(n) * 2 * n, 0.0);
    auto at = [&](int i, int j) -> double& { return aug[static_cast<size_t>(i) * 2 * n + j]; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) at(i, j) = (*this)(i, j);
        at(i, n + i) = 1.0;
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (std::abs(at(i, c)) > std::abs(at(piv, c))) piv = i;
        if (std::abs(at(piv, c)) < 1e-300) throw std::invalid_argument("Matrix::inverse: singular");
        if (piv != c)
            for (int j = 0; j < 2 * n; ++j) std::swap(at(piv, j), at(c, j));
        double d = at(c, c);
        for (int j = 0; j < 2 * n; ++j) at(c, j) /= d;
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            double f = at(i, c);
            if (f == 0.0) continue;
            for (int j = 0; j < 2 * n; ++j) at(i, j) -= f * at(c, j);
        }
    }
    Matrix inv(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = at(i, n + j);
    return inv;
}

double Matrix::sym_eig_max() const {
    std::vector<double> v(n_, 1.0), w(n_);
    double prev = 0.0;
    for (int it = 0; it < 500; ++it) {
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
            w[i] = s;
        }
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        double ray = 0.0;
        for (int i = 0; i < n_; ++i) ray += v[i] * w[i];
        for (int i = 0; i < n_; ++i) v[i] = w[i] / norm;
        if (it > 4 && std::abs(ray - prev) <= 1e-14 * std::abs(ray)) return ray;
        prev = ray;
    }
    // Slow convergence (near-degenerate top eigenvalues): dense fallback.
    auto ev = sym_eigenvalues();
    return ev.back();
}

std::vector<double> Matrix::sym_eigenvalues() const {
    Matrix a = *this;
    int n = n_;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace lclt
