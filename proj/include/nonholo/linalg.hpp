#pragma once

// Small dense vectors/matrices templated on the scalar type, so the same
// assembly code runs on doubles and on (nested) dual numbers.  Double-precision
// factorizations (SVD, symmetric eigensolves) go through Eigen.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dual.hpp"

namespace nonholo {

template <class T> using Vec = std::vector<T>;

template <class T>
struct Mat {
    int rows = 0, cols = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, T(0)) {}

    T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    Vec<T> col(int j) const {
        Vec<T> v(rows);
        for (int i = 0; i < rows; ++i) v[i] = (*this)(i, j);
        return v;
    }
    Vec<T> row(int i) const {
        Vec<T> v(cols);
        for (int j = 0; j < cols; ++j) v[j] = (*this)(i, j);
        return v;
    }
    void set_col(int j, const Vec<T>& v) {
        for (int i = 0; i < rows; ++i) (*this)(i, j) = v[i];
    }

    Mat transposed() const {
        Mat m(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(j, i) = (*this)(i, j);
        return m;
    }
};

template <class T>
Mat<T> operator*(const Mat<T>& A, const Mat<T>& B) {
    if (A.cols != B.rows) throw std::invalid_argument("Mat::mul: dimension mismatch");
    Mat<T> C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int l = 0; l < A.cols; ++l) {
            const T& ail = A(i, l);
            for (int j = 0; j < B.cols; ++j) C(i, j) += ail * B(l, j);
        }
    return C;
}

template <class T>
Vec<T> operator*(const Mat<T>& A, const Vec<T>& x) {
    if (A.cols != static_cast<int>(x.size())) throw std::invalid_argument("Mat::apply: dimension mismatch");
    Vec<T> y(A.rows, T(0));
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) y[i] += A(i, j) * x[j];
    return y;
}

template <class T>
Mat<T> operator-(const Mat<T>& A, const Mat<T>& B) {
    Mat<T> C(A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.a[i] - B.a[i];
    return C;
}

template <class T>
Mat<T> operator+(const Mat<T>& A, const Mat<T>& B) {
    Mat<T> C(A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.a[i] + B.a[i];
    return C;
}

template <class T>
Mat<T> operator*(double s, const Mat<T>& A) {
    Mat<T> C(A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = s * A.a[i];
    return C;
}

template <class T>
T dot(const Vec<T>& x, const Vec<T>& y) {
    T s(0);
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

template <class T>
Vec<T> axpy(double alpha, const Vec<T>& x, const Vec<T>& y) {
    Vec<T> z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = alpha * x[i] + y[i];
    return z;
}

template <class T>
Vec<T> operator-(const Vec<T>& x, const Vec<T>& y) {
    Vec<T> z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
    return z;
}

template <class T>
Vec<T> operator+(const Vec<T>& x, const Vec<T>& y) {
    Vec<T> z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
}

template <class T>
Vec<T> operator*(double s, const Vec<T>& x) {
    Vec<T> z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = s * x[i];
    return z;
}

inline double norm_inf(const Vec<double>& x) {
    double m = 0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double norm_inf(const Mat<double>& A) {
    double m = 0;
    for (double v : A.a) m = std::max(m, std::abs(v));
    return m;
}

inline double norm2(const Vec<double>& x) {
    return std::sqrt(dot(x, x));
}

// Linear solve by Gaussian elimination with partial pivoting; pivot choice
// compares the value parts, so the selected elimination path is differentiated.
template <class T>
Vec<T> solve(Mat<T> A, Vec<T> b) {
    const int n = A.rows;
    if (A.cols != n || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve: dimension mismatch");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        double best = std::abs(value_of(A(c, c)));
        for (int r = c + 1; r < n; ++r) {
            double m = std::abs(value_of(A(r, c)));
            if (m > best) { best = m; piv = r; }
        }
        if (best == 0.0) throw std::runtime_error("solve: singular matrix");
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(A(c, j), A(piv, j));
            std::swap(b[c], b[piv]);
        }
        for (int r = c + 1; r < n; ++r) {
            T f = A(r, c) / A(c, c);
            A(r, c) = T(0);
            for (int j = c + 1; j < n; ++j) A(r, j) -= f * A(c, j);
            b[r] -= f * b[c];
        }
    }
    Vec<T> x(n, T(0));
    for (int i = n - 1; i >= 0; --i) {
        T s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

template <class T>
Mat<T> solve(const Mat<T>& A, const Mat<T>& B) {
    Mat<T> X(B.rows, B.cols);
    for (int j = 0; j < B.cols; ++j) X.set_col(j, solve(A, B.col(j)));
    return X;
}

// Cholesky solve for SPD systems; throws with the offending pivot when the
// matrix fails positive definiteness.
template <class T>
Vec<T> solve_spd(const Mat<T>& A, const Vec<T>& b) {
    const int n = A.rows;
    Mat<T> L(n, n);
    for (int j = 0; j < n; ++j) {
        T d = A(j, j);
        for (int l = 0; l < j; ++l) d -= L(j, l) * L(j, l);
        if (!(value_of(d) > 0.0))
            throw std::runtime_error("solve_spd: matrix not positive definite (pivot " +
                                     std::to_string(value_of(d)) + ")");
        using std::sqrt;
        L(j, j) = sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            T s = A(i, j);
            for (int l = 0; l < j; ++l) s -= L(i, l) * L(j, l);
            L(i, j) = s / L(j, j);
        }
    }
    Vec<T> y(n), x(n);
    for (int i = 0; i < n; ++i) {
        T s = b[i];
        for (int l = 0; l < i; ++l) s -= L(i, l) * y[l];
        y[i] = s / L(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        T s = y[i];
        for (int l = i + 1; l < n; ++l) s -= L(l, i) * x[l];
        x[i] = s / L(i, i);
    }
    return x;
}

template <class T>
Mat<T> solve_spd(const Mat<T>& A, const Mat<T>& B) {
    Mat<T> X(B.rows, B.cols);
    for (int j = 0; j < B.cols; ++j) X.set_col(j, solve_spd(A, B.col(j)));
    return X;
}

inline Eigen::MatrixXd to_eigen(const Mat<double>& A) {
    Eigen::MatrixXd M(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) M(i, j) = A(i, j);
    return M;
}

inline Mat<double> from_eigen(const Eigen::MatrixXd& M) {
    Mat<double> A(static_cast<int>(M.rows()), static_cast<int>(M.cols()));
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) A(i, j) = M(i, j);
    return A;
}

// Orthonormal basis of the nullspace of A (columns), smallest singular values
// last in V; takes the trailing `dim` right singular vectors.
inline Mat<double> nullspace(const Mat<double>& A, int dim) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(A), Eigen::ComputeFullV);
    Eigen::MatrixXd V = svd.matrixV();
    Mat<double> N(A.cols, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < A.cols; ++i) N(i, j) = V(i, V.cols() - dim + j);
    return N;
}

inline int numeric_rank(const Mat<double>& A, double tol = 1e-9) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(A));
    int r = 0;
    auto sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0)) ++r;
    return r;
}

inline double smallest_eigenvalue_sym(const Mat<double>& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(A));
    return es.eigenvalues().minCoeff();
}

} // namespace nonholo
