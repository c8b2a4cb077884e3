#pragma once

// Differentiation backbone.  A SmoothMap wraps one generic callable,
// instantiated at three scalar levels (double, dual, nested dual), so
// Jacobians and Hessians are exact in dual mode.  Central differences are kept
// as an independent cross-check path.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

#include "dual.hpp"
#include "linalg.hpp"

namespace nonholo {

enum class DiffMode { dual, central };

struct DiffConfig {
    DiffMode mode = DiffMode::dual;
    double fd_step = std::cbrt(std::numeric_limits<double>::epsilon());
    double tol_cross = 1e-5;
};

class SmoothMap {
public:
    int domain_dim = 0;
    int codomain_dim = 0;

    SmoothMap() = default;

    // F must be callable as Vec<T> -> Vec<T> for T in {double, dual1, dual2}.
    template <class F>
    static SmoothMap make(int n, int m, F f) {
        SmoothMap s;
        s.domain_dim = n;
        s.codomain_dim = m;
        s.f0_ = f;
        s.f1_ = f;
        s.f2_ = f;
        return s;
    }

    // Wraps a double-only callable; derivative levels are unavailable, which
    // restricts differentiation of this map to central differences.
    template <class F>
    static SmoothMap make_value_only(int n, int m, F f) {
        SmoothMap s;
        s.domain_dim = n;
        s.codomain_dim = m;
        s.f0_ = std::move(f);
        return s;
    }

    template <class F>
    static SmoothMap make_scalar(int n, F f) {
        return make(n, 1, [f = std::move(f)](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            return Vec<T>{f(q)};
        });
    }

    template <class T>
    Vec<T> operator()(const Vec<T>& q) const {
        if (static_cast<int>(q.size()) != domain_dim)
            throw std::invalid_argument("SmoothMap: input length mismatch");
        Vec<T> out;
        if constexpr (std::is_same_v<T, double>) {
            if (!f0_) throw std::runtime_error("SmoothMap: no evaluator");
            out = f0_(q);
        } else if constexpr (std::is_same_v<T, dual1>) {
            if (!f1_) throw std::runtime_error("SmoothMap: dual evaluation unavailable for value-only map");
            out = f1_(q);
        } else if constexpr (std::is_same_v<T, dual2>) {
            if (!f2_) throw std::runtime_error("SmoothMap: nested-dual evaluation unavailable");
            out = f2_(q);
        } else {
            throw std::runtime_error("SmoothMap: dual nesting depth exceeded");
        }
        if (static_cast<int>(out.size()) != codomain_dim)
            throw std::runtime_error("SmoothMap: output length mismatch");
        return out;
    }

    bool has_dual() const { return static_cast<bool>(f1_); }

private:
    std::function<Vec<double>(const Vec<double>&)> f0_;
    std::function<Vec<dual1>(const Vec<dual1>&)> f1_;
    std::function<Vec<dual2>(const Vec<dual2>&)> f2_;
};

// Jacobian at a point whose scalar type may itself be dual; the evaluation runs
// one nesting level above T.
template <class T>
Mat<T> jacobian_dual(const SmoothMap& f, const Vec<T>& q) {
    const int n = f.domain_dim, m = f.codomain_dim;
    if (static_cast<int>(q.size()) != n)
        throw std::invalid_argument("jacobian: point length mismatch");
    Mat<T> J(m, n);
    for (int s = 0; s < n; ++s) {
        Vec<Dual<T>> qd(n);
        for (int i = 0; i < n; ++i) qd[i] = Dual<T>(q[i], T(i == s ? 1 : 0));
        Vec<Dual<T>> out = f(qd);
        for (int r = 0; r < m; ++r) J(r, s) = out[r].dot;
    }
    return J;
}

inline Mat<double> jacobian_central(const SmoothMap& f, const Vec<double>& q, double step) {
    const int n = f.domain_dim, m = f.codomain_dim;
    if (static_cast<int>(q.size()) != n)
        throw std::invalid_argument("jacobian: point length mismatch");
    Mat<double> J(m, n);
    for (int s = 0; s < n; ++s) {
        double h = step * std::max(1.0, std::abs(q[s]));
        Vec<double> qp = q, qm = q;
        qp[s] += h;
        qm[s] -= h;
        Vec<double> fp = f(qp), fm = f(qm);
        for (int r = 0; r < m; ++r) J(r, s) = (fp[r] - fm[r]) / (2 * h);
    }
    return J;
}

inline Mat<double> jacobian(const SmoothMap& f, const Vec<double>& q, const DiffConfig& cfg = {}) {
    if (cfg.mode == DiffMode::dual && f.has_dual()) return jacobian_dual(f, q);
    return jacobian_central(f, q, cfg.fd_step);
}

template <class T>
Vec<T> directional_derivative_dual(const SmoothMap& f, const Vec<T>& q, const Vec<T>& v) {
    const int n = f.domain_dim;
    Vec<Dual<T>> qd(n);
    for (int i = 0; i < n; ++i) qd[i] = Dual<T>(q[i], v[i]);
    Vec<Dual<T>> out = f(qd);
    Vec<T> d(f.codomain_dim);
    for (int r = 0; r < f.codomain_dim; ++r) d[r] = out[r].dot;
    return d;
}

inline Vec<double> directional_derivative(const SmoothMap& f, const Vec<double>& q,
                                          const Vec<double>& v, const DiffConfig& cfg = {}) {
    if (static_cast<int>(v.size()) != f.domain_dim)
        throw std::invalid_argument("directional_derivative: direction length mismatch");
    if (cfg.mode == DiffMode::dual && f.has_dual()) return directional_derivative_dual(f, q, v);
    Mat<double> J = jacobian_central(f, q, cfg.fd_step);
    return J * v;
}

// Gradient of a scalar map as a Vec.
template <class T>
Vec<T> gradient_dual(const SmoothMap& f, const Vec<T>& q) {
    if (f.codomain_dim != 1) throw std::invalid_argument("gradient: map is not scalar");
    return jacobian_dual(f, q).row(0);
}

inline Vec<double> gradient(const SmoothMap& f, const Vec<double>& q, const DiffConfig& cfg = {}) {
    if (f.codomain_dim != 1) throw std::invalid_argument("gradient: map is not scalar");
    return jacobian(f, q, cfg).row(0);
}

inline Mat<double> second_derivative(const SmoothMap& f, const Vec<double>& q, const DiffConfig& cfg = {}) {
    if (f.codomain_dim != 1) throw std::invalid_argument("second_derivative: map is not scalar");
    const int n = f.domain_dim;
    Mat<double> H(n, n);
    if (cfg.mode == DiffMode::dual && f.has_dual()) {
        for (int s = 0; s < n; ++s) {
            // inner level differentiates along e_s, outer level along each e_r
            Vec<dual1> qs(n);
            for (int i = 0; i < n; ++i) qs[i] = dual1(q[i], i == s ? 1.0 : 0.0);
            Mat<dual1> g = jacobian_dual(f, qs);
            for (int r = 0; r < n; ++r) H(r, s) = g(0, r).dot;
        }
    } else {
        double base = std::sqrt(cfg.fd_step);  // ~eps^(1/6); adequate for cross-checks
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
                double hr = base * std::max(1.0, std::abs(q[r]));
                double hs = base * std::max(1.0, std::abs(q[s]));
                auto at = [&](double dr, double ds) {
                    Vec<double> x = q;
                    x[r] += dr;
                    x[s] += ds;
                    return f(x)[0];
                };
                H(r, s) = (at(hr, hs) - at(hr, -hs) - at(-hr, hs) + at(-hr, -hs)) / (4 * hr * hs);
            }
    }
    // symmetrize; dual mode is exact, FD mode has cancellation noise
    for (int r = 0; r < n; ++r)
        for (int s = r + 1; s < n; ++s) {
            double v = 0.5 * (H(r, s) + H(s, r));
            H(r, s) = H(s, r) = v;
        }
    return H;
}

} // namespace nonholo
