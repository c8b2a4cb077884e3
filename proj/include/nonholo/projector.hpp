#pragma once

// Eden projector gamma : T*Q -> M and the decomposition T*Q = M + D°.

#include <utility>

#include "frame.hpp"

namespace nonholo {

// Matrix acting on covector columns: (gamma p)_i = gamma^j_i p_j with
// gamma^j_i = g_ik E^kj, i.e. the matrix product g * E.
template <class T>
struct EdenProjectorT {
    Vec<T> q;
    Mat<T> gamma;    // n x n, p |-> gamma p
    Mat<T> eden_E;   // E^kj = e^k_a C^ab e^j_b, symmetric
    std::vector<Mat<double>> dgamma;  // dgamma[l](i,j) = d gamma(i,j) / dq^l (double path only)
};

using EdenProjectorAt = EdenProjectorT<double>;

template <class T>
std::pair<Mat<T>, Mat<T>> eden_matrices(const Model& model, const Vec<T>& q) {
    const int n = model.n, k = model.k;
    auto fr = adapted_frame(model, q);
    Mat<T> g = metric_at(model, q);
    Mat<T> Ed(n, k);
    for (int a = 0; a < k; ++a) Ed.set_col(a, fr.E.col(a));
    Mat<T> E = Ed * (fr.gram_D_inv * Ed.transposed());
    return {g * E, E};
}

// q -> flattened gamma matrix, used to differentiate the projector assembly.
inline SmoothMap gamma_map(const Model& model) {
    return SmoothMap::make(model.n, model.n * model.n, [model](const auto& q) {
        return eden_matrices(model, q).first.a;
    });
}

inline EdenProjectorAt eden_projector(const Model& model, const Vec<double>& q,
                                      bool with_derivative = true, const DiffConfig& cfg = {}) {
    EdenProjectorAt P;
    P.q = q;
    auto [gamma, E] = eden_matrices(model, q);
    P.gamma = std::move(gamma);
    P.eden_E = std::move(E);
    if (with_derivative) {
        const int n = model.n;
        Mat<double> J = jacobian(gamma_map(model), q, cfg);  // (n*n) x n
        P.dgamma.assign(n, Mat<double>(n, n));
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) P.dgamma[l](i, j) = J(i * n + j, l);
    }
    return P;
}

template <class T>
Vec<T> apply_gamma(const Model& model, const Vec<T>& q, const Vec<T>& p) {
    return eden_matrices(model, q).first * p;
}

// p = p_M + p_0 with p_M = gamma p in M_q and p_0 in D°_q.
inline std::pair<Vec<double>, Vec<double>> decompose_covector(const Model& model,
                                                             const Vec<double>& q,
                                                             const Vec<double>& p) {
    Vec<double> pM = apply_gamma(model, q, p);
    return {pM, p - pM};
}

// Pullback f |-> f∘gamma of a phase-space function, as a map on (q, p).
inline SmoothMap pullback_by_gamma(const Model& model, const SmoothMap& f) {
    const int n = model.n;
    auto body = [model, f, n](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        Vec<T> q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
        Vec<T> pM = apply_gamma(model, q, p);
        Vec<T> y(2 * n);
        for (int i = 0; i < n; ++i) { y[i] = q[i]; y[n + i] = pM[i]; }
        return f(y);
    };
    return f.has_dual() ? SmoothMap::make(2 * n, f.codomain_dim, body)
                        : SmoothMap::make_value_only(2 * n, f.codomain_dim,
                              [body](const Vec<double>& x) { return body(x); });
}

// Residual of membership of (q, p) in M: components of p on the mu^A coframe
// rows mapped through sharp, i.e. Psi^A = <p, sharp(mu^A)>.
template <class T>
Vec<T> constraint_values(const Model& model, const Vec<T>& q, const Vec<T>& p) {
    auto fr = adapted_frame(model, q);
    Vec<T> psi(model.n - model.k);
    for (int A = model.k; A < model.n; ++A)
        psi[A - model.k] = dot(p, sharp_g(model, q, fr.coframe.row(A)));
    return psi;
}

// Psi as a phase-space SmoothMap, 2n -> (n-k).
inline SmoothMap constraint_map(const Model& model) {
    const int n = model.n;
    return SmoothMap::make(2 * n, n - model.k, [model, n](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        Vec<T> q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
        return constraint_values(model, q, p);
    });
}

inline double constraint_residual(const Model& model, const Vec<double>& q, const Vec<double>& p) {
    return norm_inf(constraint_values(model, q, p));
}

} // namespace nonholo
