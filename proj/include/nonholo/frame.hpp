#pragma once

// Adapted frames {e_a, e_A}, coframes, Gram data and structure functions.
//
// The complement frame e_A is built by a deterministic Gram-Schmidt sweep over
// the coordinate basis in the g-inner product: at each round the candidate
// with the largest residual g-norm is accepted (ties go to the lowest
// coordinate index).  Re-running the same sweep inside a dual-number
// evaluation makes the complement differentiable wherever the selection is
// locally constant.

#include <stdexcept>
#include <vector>

#include "model.hpp"

namespace nonholo {

template <class T>
struct AdaptedFrameT {
    Vec<T> q;
    Mat<T> E;            // columns: e_1..e_k, then the complement e_A
    Mat<T> coframe;      // rows: dual basis mu^1..mu^n
    Mat<T> gram_D;       // C_ab = g(e_a, e_b)
    Mat<T> gram_D_inv;   // C^{ab}
};

using AdaptedFrame = AdaptedFrameT<double>;

template <class T>
AdaptedFrameT<T> adapted_frame(const Model& model, const Vec<T>& q) {
    const int n = model.n, k = model.k;
    Mat<T> g = metric_at(model, q);

    Mat<T> E(n, n);
    for (int a = 0; a < k; ++a) E.set_col(a, model.d_frame[a](q));

    Mat<T> C(k, k);
    for (int a = 0; a < k; ++a) {
        Vec<T> ga = g * E.col(a);
        for (int b = 0; b < k; ++b) C(a, b) = dot(ga, E.col(b));
    }
    Mat<T> Cinv;
    try {
        Cinv = solve_spd(C, Mat<T>::identity(k));
    } catch (const std::runtime_error&) {
        throw std::runtime_error("adapted_frame: D-frame rank-deficient at this point (chart degeneracy)");
    }

    // complement by g-Gram-Schmidt over the coordinate basis
    std::vector<Vec<T>> accepted;
    for (int round = 0; round < n - k; ++round) {
        int best = -1;
        double best_norm = 0;
        Vec<T> best_res;
        for (int i = 0; i < n; ++i) {
            Vec<T> u(n, T(0));
            u[i] = T(1);
            // remove the D-component
            Vec<T> rhs(k);
            for (int a = 0; a < k; ++a) rhs[a] = dot(g * E.col(a), u);
            Vec<T> coef = Cinv * rhs;
            for (int a = 0; a < k; ++a)
                for (int j = 0; j < n; ++j) u[j] -= coef[a] * E(j, a);
            // remove previously accepted (g-orthonormal) components
            for (const auto& w : accepted) {
                T c = dot(g * w, u);
                for (int j = 0; j < n; ++j) u[j] -= c * w[j];
            }
            double r = std::sqrt(std::max(0.0, value_of(dot(g * u, u))));
            // strict relative margin so exact ties (up to roundoff) resolve to
            // the lowest coordinate index, keeping the selection stable
            if (r > best_norm * (1 + 1e-9)) {
                best_norm = r;
                best = i;
                best_res = u;
            }
        }
        if (best < 0 || best_norm < 1e-10)
            throw std::runtime_error("adapted_frame: degenerate complement (chart degeneracy)");
        using std::sqrt;
        T nrm = sqrt(dot(g * best_res, best_res));
        for (int j = 0; j < n; ++j) best_res[j] = best_res[j] / nrm;
        accepted.push_back(best_res);
    }
    for (int A = 0; A < n - k; ++A) E.set_col(k + A, accepted[A]);

    AdaptedFrameT<T> fr;
    fr.q = q;
    fr.E = E;
    try {
        fr.coframe = solve(E, Mat<T>::identity(n));
    } catch (const std::runtime_error&) {
        throw std::runtime_error("adapted_frame: frame matrix singular at this point");
    }
    fr.gram_D = C;
    fr.gram_D_inv = Cinv;
    return fr;
}

// The n-k complement vectors e_A(q).
template <class T>
std::vector<Vec<T>> orthogonal_complement(const Model& model, const Vec<T>& q) {
    auto fr = adapted_frame(model, q);
    std::vector<Vec<T>> out;
    for (int A = model.k; A < model.n; ++A) out.push_back(fr.E.col(A));
    return out;
}

// The i-th field of the full adapted frame as a SmoothMap (0 <= i < n).
inline SmoothMap frame_field(const Model& model, int i) {
    if (i < model.k) return model.d_frame[i];
    return SmoothMap::make(model.n, model.n, [model, i](const auto& q) {
        return adapted_frame(model, q).E.col(i);
    });
}

// The i-th coframe row mu^i as a SmoothMap.
inline SmoothMap coframe_field(const Model& model, int i) {
    return SmoothMap::make(model.n, model.n, [model, i](const auto& q) {
        return adapted_frame(model, q).coframe.row(i);
    });
}

struct StructureFunctions {
    Vec<double> q;
    // C[m](i,j) is the coefficient of e_m in [e_i, e_j]
    std::vector<Mat<double>> C;
};

inline StructureFunctions structure_functions(const Model& model, const Vec<double>& q,
                                              const DiffConfig& cfg = {}) {
    const int n = model.n;
    auto fr = adapted_frame(model, q);
    std::vector<Mat<double>> J(n);
    for (int i = 0; i < n; ++i) J[i] = jacobian(frame_field(model, i), q, cfg);

    StructureFunctions sf;
    sf.q = q;
    sf.C.assign(n, Mat<double>(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Vec<double> lie = J[j] * fr.E.col(i) - J[i] * fr.E.col(j);
            Vec<double> coef = fr.coframe * lie;
            for (int m = 0; m < n; ++m) {
                sf.C[m](i, j) = coef[m];
                sf.C[m](j, i) = -coef[m];
            }
        }
    return sf;
}

} // namespace nonholo
