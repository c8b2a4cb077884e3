#pragma once

// Residual checks for the nonholonomic Hamilton-Jacobi conditions and the
// generalized nonholonomic HJ equation, for candidate 1-forms lambda on Q.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dynamics.hpp"

namespace nonholo {

struct OneFormField {
    SmoothMap lam;  // q -> covector components, n -> n
    std::string label;
};

struct HJReport {
    double r_membership = 0;    // sup |lambda - gamma lambda|
    double r_closedness_D = 0;  // sup |d lambda(e_a, e_b)|
    double r_hj = 0;            // sup |gamma d(H∘lambda)|
    double r_gen_hj = std::numeric_limits<double>::quiet_NaN();
    double r_related = std::numeric_limits<double>::quiet_NaN();
    std::string grid;
    std::string status = "ok";
    Vec<double> worst_point;  // argmax of the largest computed residual
    double worst_value = 0;

    void track(double v, const Vec<double>& q) {
        if (v > worst_value) { worst_value = v; worst_point = q; }
    }
};

inline Vec<double> xnh_lambda(const Model& model, const OneFormField& lam, const Vec<double>& q) {
    return sharp_g(model, q, lam.lam(q));
}

// H∘lambda as a scalar map on Q.
inline SmoothMap h_along_lambda(const Model& model, const OneFormField& lam) {
    return SmoothMap::make_scalar(model.n, [model, lam](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        Vec<T> l = lam.lam(q);
        return T(0.5 * dot(l, sharp_g(model, q, l)) + model.potential(q)[0]);
    });
}

// Classical conditions: membership, closedness on D x D, gamma d(H∘lambda) = 0.
inline HJReport hj_residuals(const Model& model, const OneFormField& lam,
                             const std::vector<Vec<double>>& grid, const DiffConfig& cfg = {}) {
    if (grid.empty()) throw std::invalid_argument("hj_residuals: empty grid");
    HJReport rep;
    rep.grid = std::to_string(grid.size()) + " points";
    SmoothMap Hl = h_along_lambda(model, lam);
    for (const auto& q : grid) {
        Vec<double> l = lam.lam(q);
        auto fr = adapted_frame(model, q);
        auto [gamma, E] = eden_matrices(model, q);

        double rm = norm_inf(l - gamma * l);
        rep.r_membership = std::max(rep.r_membership, rm);
        rep.track(rm, q);

        Mat<double> Jl = jacobian(lam.lam, q, cfg);
        for (int a = 0; a < model.k; ++a)
            for (int b = a + 1; b < model.k; ++b) {
                double s = 0;
                for (int kk = 0; kk < model.n; ++kk)
                    for (int ll = 0; ll < model.n; ++ll)
                        s += (Jl(ll, kk) - Jl(kk, ll)) * fr.E(kk, a) * fr.E(ll, b);
                rep.r_closedness_D = std::max(rep.r_closedness_D, std::abs(s));
                rep.track(std::abs(s), q);
            }

        double rh = norm_inf(gamma * gradient(Hl, q, cfg));
        rep.r_hj = std::max(rep.r_hj, rh);
        rep.track(rh, q);
    }
    return rep;
}

// Generalized condition: gamma ∘ (d(H∘lambda) + i_{X^lambda} d lambda) = 0,
// together with the equivalent frame-restricted form
// d^D(H∘lambda) + i_{X^lambda} d^D lambda = 0; the max of both is reported.
inline HJReport gen_hj_residual(const Model& model, const OneFormField& lam,
                                const std::vector<Vec<double>>& grid, const DiffConfig& cfg = {},
                                double membership_tol = 1e-8) {
    if (grid.empty()) throw std::invalid_argument("gen_hj_residual: empty grid");
    HJReport rep;
    rep.grid = std::to_string(grid.size()) + " points";
    rep.r_gen_hj = 0;
    SmoothMap Hl = h_along_lambda(model, lam);
    const int n = model.n, k = model.k;
    for (const auto& q : grid) {
        Vec<double> l = lam.lam(q);
        auto [gamma, E] = eden_matrices(model, q);
        double rm = norm_inf(l - gamma * l);
        rep.r_membership = std::max(rep.r_membership, rm);
        if (rm > membership_tol) rep.status = "membership precondition violated";

        Vec<double> X = sharp_g(model, q, l);
        Mat<double> Jl = jacobian(lam.lam, q, cfg);

        // coordinate form: (i_X dlambda)_j = X^k (d_k lambda_j - d_j lambda_k)
        Vec<double> v = gradient(Hl, q, cfg);
        for (int j = 0; j < n; ++j)
            for (int kk = 0; kk < n; ++kk) v[j] += X[kk] * (Jl(j, kk) - Jl(kk, j));
        double r_coord = norm_inf(gamma * v);

        // frame form on {e_a}
        auto fr = adapted_frame(model, q);
        StructureFunctions sf = structure_functions(model, q, cfg);
        Vec<double> c = fr.coframe * X;  // X = c^i e_i, with c^A ~ 0
        // dDl(a,b) = e_a(lambda(e_b)) - e_b(lambda(e_a)) - lambda([e_a, e_b])
        Mat<double> dDl(k, k);
        std::vector<Vec<double>> grad_le(k);
        for (int b = 0; b < k; ++b) {
            SmoothMap le = SmoothMap::make_scalar(n, [model, lam, b](const auto& qq) {
                return dot(lam.lam(qq), model.d_frame[b](qq));
            });
            grad_le[b] = gradient(le, q, cfg);
        }
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) {
                double s = dot(grad_le[b], fr.E.col(a)) - dot(grad_le[a], fr.E.col(b));
                for (int m = 0; m < n; ++m) s -= sf.C[m](a, b) * dot(l, fr.E.col(m));
                dDl(a, b) = s;
                dDl(b, a) = -s;
            }
        Vec<double> gHl = gradient(Hl, q, cfg);
        double r_frame = 0;
        for (int a = 0; a < k; ++a) {
            double s = dot(gHl, fr.E.col(a));
            for (int b = 0; b < k; ++b) s += c[b] * dDl(b, a);
            r_frame = std::max(r_frame, std::abs(s));
        }

        double r = std::max(r_coord, r_frame);
        rep.r_gen_hj = std::max(rep.r_gen_hj, r);
        rep.track(r, q);
    }
    return rep;
}

// sup over the grid of |T lambda(X_nh^lambda) - X_nh ∘ lambda|.
inline HJReport lambda_relatedness(const Model& model, const OneFormField& lam,
                                   const std::vector<Vec<double>>& grid,
                                   const DiffConfig& cfg = {}) {
    if (grid.empty()) throw std::invalid_argument("lambda_relatedness: empty grid");
    HJReport rep;
    rep.grid = std::to_string(grid.size()) + " points";
    rep.r_related = 0;
    const int n = model.n;
    for (const auto& q : grid) {
        Vec<double> l = lam.lam(q);
        Vec<double> X = sharp_g(model, q, l);
        Mat<double> Jl = jacobian(lam.lam, q, cfg);
        Vec<double> lifted(2 * n);
        Vec<double> Jx = Jl * X;
        for (int i = 0; i < n; ++i) { lifted[i] = X[i]; lifted[n + i] = Jx[i]; }

        Vec<double> x(2 * n);
        for (int i = 0; i < n; ++i) { x[i] = q[i]; x[n + i] = l[i]; }
        Vec<double> Xnh = nh_vf_projection(model, x, cfg);

        double r = norm_inf(lifted - Xnh);
        rep.r_related = std::max(rep.r_related, r);
        rep.track(r, q);
    }
    return rep;
}

} // namespace nonholo
