#pragma once

// Canonical Poisson bracket and the three nonholonomic brackets (Eden,
// algebroid, symplectic-projection), the symplectic projector P on T^D M, and
// the jacobiator.

#include <string>
#include <utility>

#include "projector.hpp"

namespace nonholo {

struct Observable {
    SmoothMap f;  // scalar map on phase space (q, p), 2n -> 1
    std::string label;
};

// Function on M carried as a function of adapted coordinates (q, pi_a),
// pi_a = <p, e_a(q)>.
struct MObservable {
    std::string label;
    SmoothMap on_m;  // (n + k) -> 1

    // Canonical ambient representative x = (q,p) |-> on_m(q, <p, e_a(q)>).
    Observable ambient(const Model& model) const {
        const int n = model.n, k = model.k;
        const SmoothMap f = on_m;
        auto body = [model, f, n, k](const auto& x) {
            using T = std::decay_t<decltype(x[0])>;
            Vec<T> q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
            Vec<T> u(n + k);
            for (int i = 0; i < n; ++i) u[i] = q[i];
            for (int a = 0; a < k; ++a) u[n + a] = dot(p, model.d_frame[a](q));
            return f(u);
        };
        SmoothMap amb = on_m.has_dual()
            ? SmoothMap::make(2 * n, 1, body)
            : SmoothMap::make_value_only(2 * n, 1,
                  [body](const Vec<double>& x) { return body(x); });
        return {std::move(amb), label};
    }

    // The extension f∘gamma used wherever an observable is composed with the
    // projector.
    Observable gamma_extension(const Model& model) const {
        return {pullback_by_gamma(model, ambient(model).f), label + "∘γ"};
    }

    double eval(const Model& model, const Vec<double>& x) const {
        return ambient(model).f(x)[0];
    }
};

inline MObservable coordinate_observable(const Model& model, int i) {
    const int nk = model.n + model.k;
    return {model.coord_names.empty() ? "q" + std::to_string(i) : model.coord_names[i],
            SmoothMap::make_scalar(nk, [i](const auto& u) { return u[i]; })};
}

inline MObservable momentum_observable(const Model& model, int a) {
    const int n = model.n, nk = model.n + model.k;
    return {"pi" + std::to_string(a + 1),
            SmoothMap::make_scalar(nk, [n, a](const auto& u) { return u[n + a]; })};
}

// i_M / P^*: adapted coordinates (q, pi_a) -> ambient covector p = pi_a mu^a(q).
template <class T>
Vec<T> embed_M(const Model& model, const Vec<T>& q, const Vec<T>& pi) {
    auto fr = adapted_frame(model, q);
    Vec<T> x(2 * model.n, T(0));
    for (int i = 0; i < model.n; ++i) x[i] = q[i];
    for (int a = 0; a < model.k; ++a) {
        Vec<T> mu = fr.coframe.row(a);
        for (int i = 0; i < model.n; ++i) x[model.n + i] += pi[a] * mu[i];
    }
    return x;
}

// Adapted momenta pi_a at a phase point.
template <class T>
Vec<T> adapted_momenta(const Model& model, const Vec<T>& x) {
    const int n = model.n;
    Vec<T> q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
    Vec<T> pi(model.k);
    for (int a = 0; a < model.k; ++a) pi[a] = dot(p, model.d_frame[a](q));
    return pi;
}

// ---------------------------------------------------------------------------
// canonical bracket

template <class T>
T canonical_bracket_t(const Observable& F, const Observable& G, const Vec<T>& x) {
    const int n = static_cast<int>(x.size()) / 2;
    Vec<T> dF = jacobian_dual(F.f, x).row(0);
    Vec<T> dG = jacobian_dual(G.f, x).row(0);
    T s(0);
    for (int i = 0; i < n; ++i) s += dF[i] * dG[n + i] - dF[n + i] * dG[i];
    return s;
}

inline double canonical_bracket(const Observable& F, const Observable& G,
                                const Vec<double>& x, const DiffConfig& cfg = {}) {
    const int n = static_cast<int>(x.size()) / 2;
    Vec<double> dF = gradient(F.f, x, cfg);
    Vec<double> dG = gradient(G.f, x, cfg);
    double s = 0;
    for (int i = 0; i < n; ++i) s += dF[i] * dG[n + i] - dF[n + i] * dG[i];
    return s;
}

// ---------------------------------------------------------------------------
// Eden bracket: {f, g}_E = {f∘gamma, g∘gamma}_can ∘ i_M

constexpr double kOnManifoldTol = 1e-8;

template <class T>
T eden_bracket_t(const Model& model, const MObservable& f, const MObservable& g,
                 const Vec<T>& x) {
    return canonical_bracket_t(f.gamma_extension(model), g.gamma_extension(model), x);
}

inline double eden_bracket(const Model& model, const MObservable& f, const MObservable& g,
                           const Vec<double>& x, const DiffConfig& cfg = {}) {
    Vec<double> q(x.begin(), x.begin() + model.n), p(x.begin() + model.n, x.end());
    if (constraint_residual(model, q, p) > kOnManifoldTol)
        throw std::invalid_argument("eden_bracket: point lies off M");
    return canonical_bracket(f.gamma_extension(model), g.gamma_extension(model), x, cfg);
}

// ---------------------------------------------------------------------------
// algebroid bracket on D*: {phi, psi}_{D*} = {phi∘i_D*, psi∘i_D*}_can ∘ P*
// phi, psi are functions of (q, y_a), same layout as MObservable::on_m.

template <class T>
T algebroid_bracket_t(const Model& model, const MObservable& phi, const MObservable& psi,
                      const Vec<T>& q, const Vec<T>& y) {
    Vec<T> x = embed_M(model, q, y);
    return canonical_bracket_t(phi.ambient(model), psi.ambient(model), x);
}

inline double algebroid_bracket(const Model& model, const MObservable& phi,
                                const MObservable& psi, const Vec<double>& q,
                                const Vec<double>& y, const DiffConfig& cfg = {}) {
    Vec<double> x = embed_M(model, q, y);
    return canonical_bracket(phi.ambient(model), psi.ambient(model), x, cfg);
}

// ---------------------------------------------------------------------------
// symplectic decomposition T_M(T*Q) = T^D M ⊕ (T^D M)^{perp omega}

struct SymplecticSplitAt {
    Vec<double> x;
    Mat<double> basis_TDM;  // 2n x 2k
    Mat<double> proj_P;     // 2n x 2n
    Mat<double> proj_Q;
};

// omega(Z, W) = Z_q . W_p - Z_p . W_q
inline double omega_can(const Vec<double>& Z, const Vec<double>& W) {
    const int n = static_cast<int>(Z.size()) / 2;
    double s = 0;
    for (int i = 0; i < n; ++i) s += Z[i] * W[n + i] - Z[n + i] * W[i];
    return s;
}

inline Vec<double> omega_apply(const Vec<double>& Z) {
    // Omega Z with Omega = [[0, I], [-I, 0]], so that Z^T (Omega W) = omega(Z, W)
    const int n = static_cast<int>(Z.size()) / 2;
    Vec<double> y(2 * n);
    for (int i = 0; i < n; ++i) { y[i] = Z[n + i]; y[n + i] = -Z[i]; }
    return y;
}

inline SymplecticSplitAt symplectic_split(const Model& model, const Vec<double>& x,
                                          const DiffConfig& cfg = {}) {
    const int n = model.n, k = model.k, nA = n - k;
    if (nA == 0) {
        // unconstrained limit: T^D M is the whole tangent space
        SymplecticSplitAt sp;
        sp.x = x;
        sp.basis_TDM = Mat<double>::identity(2 * n);
        sp.proj_P = Mat<double>::identity(2 * n);
        sp.proj_Q = Mat<double>(2 * n, 2 * n);
        return sp;
    }
    Vec<double> q(x.begin(), x.begin() + n);
    auto fr = adapted_frame(model, q);

    // T^D M = ker dPsi^A  ∩  ker (mu^A ∘ Tpi_Q)
    Mat<double> rows(2 * nA, 2 * n);
    Mat<double> dPsi = jacobian(constraint_map(model), x, cfg);
    for (int A = 0; A < nA; ++A)
        for (int j = 0; j < 2 * n; ++j) rows(A, j) = dPsi(A, j);
    for (int A = 0; A < nA; ++A)
        for (int j = 0; j < n; ++j) rows(nA + A, j) = fr.coframe(k + A, j);
    Mat<double> B = nullspace(rows, 2 * k);

    // Gram system (B^T Omega B) alpha = B^T Omega Z
    Mat<double> OB(2 * n, 2 * k);
    for (int j = 0; j < 2 * k; ++j) OB.set_col(j, omega_apply(B.col(j)));
    Mat<double> G = B.transposed() * OB;  // skew, invertible iff T^D M symplectic
    Mat<double> BtO = OB.transposed();
    for (auto& v : BtO.a) v = -v;  // (Omega B)^T = -B^T Omega
    Mat<double> P;
    try {
        P = B * solve(G, BtO);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("symplectic_split: T^D M fails to be symplectic at this point");
    }
    SymplecticSplitAt sp;
    sp.x = x;
    sp.basis_TDM = std::move(B);
    sp.proj_Q = Mat<double>::identity(2 * n) - P;
    sp.proj_P = std::move(P);
    return sp;
}

// Hamiltonian vector field of an observable: X_F = (dF/dp, -dF/dq).
inline Vec<double> hamiltonian_vf_of(const Observable& F, const Vec<double>& x,
                                     const DiffConfig& cfg = {}) {
    const int n = static_cast<int>(x.size()) / 2;
    Vec<double> dF = gradient(F.f, x, cfg);
    Vec<double> X(2 * n);
    for (int i = 0; i < n; ++i) { X[i] = dF[n + i]; X[n + i] = -dF[i]; }
    return X;
}

enum class Extension { gamma, ambient };

// {f, g}_nh = omega(P X_f~, P X_g~) with arbitrary extensions f~, g~.
inline double nonholonomic_bracket(const Model& model, const MObservable& f,
                                   const MObservable& g, const Vec<double>& x,
                                   const DiffConfig& cfg = {},
                                   Extension ext = Extension::gamma) {
    auto pick = [&](const MObservable& h) {
        return ext == Extension::gamma ? h.gamma_extension(model) : h.ambient(model);
    };
    SymplecticSplitAt sp = symplectic_split(model, x, cfg);
    Vec<double> Xf = sp.proj_P * hamiltonian_vf_of(pick(f), x, cfg);
    Vec<double> Xg = sp.proj_P * hamiltonian_vf_of(pick(g), x, cfg);
    return omega_can(Xf, Xg);
}

// ---------------------------------------------------------------------------
// jacobiator

enum class BracketKind { eden, nonholonomic, algebroid };

inline MObservable inner_bracket_observable(const Model& model, const MObservable& g,
                                            const MObservable& h, BracketKind kind) {
    const int n = model.n, k = model.k;
    switch (kind) {
        case BracketKind::eden:
            return {"{" + g.label + "," + h.label + "}E",
                    SmoothMap::make(n + k, 1, [model, g, h, n](const auto& u) {
                        using T = std::decay_t<decltype(u[0])>;
                        Vec<T> q(u.begin(), u.begin() + n), pi(u.begin() + n, u.end());
                        return Vec<T>{eden_bracket_t(model, g, h, embed_M(model, q, pi))};
                    })};
        case BracketKind::algebroid:
            return {"{" + g.label + "," + h.label + "}D*",
                    SmoothMap::make(n + k, 1, [model, g, h, n](const auto& u) {
                        using T = std::decay_t<decltype(u[0])>;
                        Vec<T> q(u.begin(), u.begin() + n), y(u.begin() + n, u.end());
                        return Vec<T>{algebroid_bracket_t(model, g, h, q, y)};
                    })};
        case BracketKind::nonholonomic:
            // the symplectic projector route runs double-precision
            // factorizations, so the nested bracket is value-only and the
            // outer derivative falls back to central differences
            return {"{" + g.label + "," + h.label + "}nh",
                    SmoothMap::make_value_only(n + k, 1, [model, g, h, n](const Vec<double>& u) {
                        Vec<double> q(u.begin(), u.begin() + n), pi(u.begin() + n, u.end());
                        return Vec<double>{nonholonomic_bracket(model, g, h, embed_M(model, q, pi))};
                    })};
    }
    throw std::logic_error("unreachable");
}

inline double bracket_dispatch(const Model& model, const MObservable& f, const MObservable& g,
                               const Vec<double>& x, BracketKind kind, const DiffConfig& cfg) {
    switch (kind) {
        case BracketKind::eden: return eden_bracket(model, f, g, x, cfg);
        case BracketKind::nonholonomic: return nonholonomic_bracket(model, f, g, x, cfg);
        case BracketKind::algebroid: {
            Vec<double> q(x.begin(), x.begin() + model.n);
            return algebroid_bracket(model, f, g, q, adapted_momenta(model, x), cfg);
        }
    }
    throw std::logic_error("unreachable");
}

// {f,{g,h}} + {g,{h,f}} + {h,{f,g}} at x in M.
inline double jacobiator(const Model& model, const MObservable& f, const MObservable& g,
                         const MObservable& h, const Vec<double>& x, BracketKind kind,
                         const DiffConfig& cfg = {}) {
    auto term = [&](const MObservable& a, const MObservable& b, const MObservable& c) {
        return bracket_dispatch(model, a, inner_bracket_observable(model, b, c, kind), x, kind, cfg);
    };
    return term(f, g, h) + term(g, h, f) + term(h, f, g);
}

} // namespace nonholo
