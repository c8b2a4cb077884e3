#pragma once

// Hamiltonian and nonholonomic vector fields (three independent routes),
// Lagrange multipliers, observable evolution, RK4 trajectory integration on M.

#include <optional>
#include <string>
#include <vector>

#include "brackets.hpp"

namespace nonholo {

template <class T>
T hamiltonian_value(const Model& model, const Vec<T>& x) {
    const int n = model.n;
    Vec<T> q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
    T h = 0.5 * dot(p, sharp_g(model, q, p)) + model.potential(q)[0];
    return h;
}

inline Observable hamiltonian_observable(const Model& model) {
    return {SmoothMap::make_scalar(2 * model.n, [model](const auto& x) {
                return hamiltonian_value(model, x);
            }),
            "H"};
}

inline double hamiltonian(const Model& model, const Vec<double>& x) {
    return hamiltonian_value(model, x);
}

// Constrained Hamiltonian H_M as a function of adapted coordinates.
inline MObservable constrained_hamiltonian(const Model& model) {
    const int n = model.n;
    return {"H_M", SmoothMap::make_scalar(n + model.k, [model, n](const auto& u) {
                using T = std::decay_t<decltype(u[0])>;
                Vec<T> q(u.begin(), u.begin() + n), pi(u.begin() + n, u.end());
                return hamiltonian_value(model, embed_M(model, q, pi));
            })};
}

inline Vec<double> hamiltonian_vf(const Model& model, const Vec<double>& x,
                                  const DiffConfig& cfg = {}) {
    return hamiltonian_vf_of(hamiltonian_observable(model), x, cfg);
}

// Route 1: X_nh = P(X_H).
inline Vec<double> nh_vf_projection(const Model& model, const Vec<double>& x,
                                    const DiffConfig& cfg = {}) {
    return symplectic_split(model, x, cfg).proj_P * hamiltonian_vf(model, x, cfg);
}

// Route 2: X_nh = Tgamma(X_{H∘gamma}).
inline Vec<double> nh_vf_gamma(const Model& model, const Vec<double>& x,
                               const DiffConfig& cfg = {}) {
    const int n = model.n;
    Vec<double> q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
    Observable Hg{pullback_by_gamma(model, hamiltonian_observable(model).f), "H∘γ"};
    Vec<double> Z = hamiltonian_vf_of(Hg, x, cfg);
    Vec<double> Zq(Z.begin(), Z.begin() + n), Zp(Z.begin() + n, Z.end());
    EdenProjectorAt P = eden_projector(model, q, true, cfg);
    Vec<double> wp = P.gamma * Zp;
    for (int l = 0; l < n; ++l) wp = axpy(Zq[l], P.dgamma[l] * p, wp);
    Vec<double> out(2 * n);
    for (int i = 0; i < n; ++i) { out[i] = Zq[i]; out[n + i] = wp[i]; }
    return out;
}

struct Multipliers {
    Vec<double> lambda_bar;  // n-k values
};

// Route 3: X_H corrected by a force in pi_Q^*(D°), multipliers from
// d/dt Psi^A = 0.
inline std::pair<Vec<double>, Multipliers> nh_vf_multipliers(const Model& model,
                                                             const Vec<double>& x,
                                                             const DiffConfig& cfg = {}) {
    const int n = model.n, k = model.k, nA = n - k;
    Vec<double> q(x.begin(), x.begin() + n);
    auto fr = adapted_frame(model, q);
    Vec<double> XH = hamiltonian_vf(model, x, cfg);
    if (nA == 0) return {XH, Multipliers{{}}};

    Mat<double> dPsi = jacobian(constraint_map(model), x, cfg);  // nA x 2n
    // Gram matrix mu^A g^{-1} mu^B and the drift dPsi(X_H)
    Mat<double> G(nA, nA);
    for (int A = 0; A < nA; ++A) {
        Vec<double> sA = sharp_g(model, q, fr.coframe.row(k + A));
        for (int B = 0; B < nA; ++B) G(A, B) = dot(fr.coframe.row(k + B), sA);
    }
    Vec<double> rhs = dPsi * XH;
    Vec<double> lam;
    try {
        lam = solve_spd(G, rhs);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("nh_vf_multipliers: singular multiplier system");
    }
    Vec<double> X = XH;
    for (int A = 0; A < nA; ++A)
        for (int i = 0; i < n; ++i) X[n + i] -= lam[A] * fr.coframe(k + A, i);
    return {X, Multipliers{lam}};
}

// df/dt along the nonholonomic flow at x.
inline double evolve_observable(const Model& model, const MObservable& f,
                                const Vec<double>& x, const DiffConfig& cfg = {}) {
    Vec<double> X = nh_vf_projection(model, x, cfg);
    Vec<double> df = gradient(f.ambient(model).f, x, cfg);
    return dot(df, X);
}

struct TrajectoryStep {
    double constraint_residual;
    double energy;
    Vec<double> first_integrals;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec<double>> states;
    std::vector<TrajectoryStep> diagnostics;
    std::string status = "ok";  // "ok" or "truncated: <reason>"
};

struct IntegrateOptions {
    bool project_each_step = true;
    bool project_initial = false;
    double on_m_tol = 1e-10;
    std::vector<MObservable> first_integrals;
    DiffConfig diff;
};

inline Trajectory integrate(const Model& model, Vec<double> x0, double t_end, double dt,
                            const IntegrateOptions& opt = {}) {
    if (dt <= 0) throw std::invalid_argument("integrate: dt must be positive");
    const int n = model.n;
    {
        Vec<double> q(x0.begin(), x0.begin() + n), p(x0.begin() + n, x0.end());
        double res = constraint_residual(model, q, p);
        if (res > opt.on_m_tol) {
            if (!opt.project_initial)
                throw std::invalid_argument(
                    "integrate: initial point off M (residual " + std::to_string(res) +
                    "); pass project_initial to project it");
            Vec<double> pM = apply_gamma(model, q, p);
            for (int i = 0; i < n; ++i) x0[n + i] = pM[i];
        }
    }

    Trajectory tr;
    auto record = [&](double t, const Vec<double>& x) {
        Vec<double> q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
        TrajectoryStep d;
        d.constraint_residual = constraint_residual(model, q, p);
        d.energy = hamiltonian(model, x);
        for (const auto& f : opt.first_integrals) d.first_integrals.push_back(f.eval(model, x));
        tr.times.push_back(t);
        tr.states.push_back(x);
        tr.diagnostics.push_back(std::move(d));
    };

    auto rhs = [&](const Vec<double>& x) { return nh_vf_projection(model, x, opt.diff); };

    record(0.0, x0);
    Vec<double> x = x0;
    const long steps = static_cast<long>(t_end / dt + 0.5);
    for (long s = 0; s < steps; ++s) {
        try {
            Vec<double> k1 = rhs(x);
            Vec<double> k2 = rhs(axpy(0.5 * dt, k1, x));
            Vec<double> k3 = rhs(axpy(0.5 * dt, k2, x));
            Vec<double> k4 = rhs(axpy(dt, k3, x));
            for (int i = 0; i < 2 * n; ++i)
                x[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            Vec<double> q(x.begin(), x.begin() + n);
            if (!model.in_domain(q)) {
                tr.status = "truncated: trajectory left the chart domain";
                break;
            }
            if (opt.project_each_step) {
                Vec<double> p(x.begin() + n, x.end());
                Vec<double> pM = apply_gamma(model, q, p);
                for (int i = 0; i < n; ++i) x[n + i] = pM[i];
            }
        } catch (const std::runtime_error& e) {
            tr.status = std::string("truncated: ") + e.what();
            break;
        }
        record((s + 1) * dt, x);
    }
    return tr;
}

} // namespace nonholo
