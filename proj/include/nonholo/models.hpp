#pragma once

// Built-in nonholonomic systems: the nonholonomic particle, the ball rolling
// without sliding on a plane, and an integrable control model.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "hj.hpp"

namespace nonholo {

struct ModelSpec {
    std::string name;
    std::map<std::string, double> params;
    Model model;
    Vec<double> sample_lo, sample_hi;  // chart box for random sampling, avoids singular loci
    std::vector<MObservable> first_integrals;
    std::map<std::string, OneFormField> builtin_one_forms;
    std::vector<Vec<double>> default_hj_grid;
    double hj_tol = 1e-8;
};

// --- nonholonomic particle: D = <d/dy, d/dx + y d/dz>, g = id -------------

inline Model particle_model(std::optional<SmoothMap> V = std::nullopt) {
    Model m;
    m.n = 3;
    m.k = 2;
    m.coord_names = {"x", "y", "z"};
    m.metric = SmoothMap::make(3, 9, [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        Vec<T> g(9, T(0));
        g[0] = g[4] = g[8] = T(1);
        return g;
    });
    m.potential = V ? *V : SmoothMap::make_scalar(3, [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        (void)q;
        return T(0);
    });
    m.d_frame = {
        SmoothMap::make(3, 3, [](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            (void)q;
            return Vec<T>{T(0), T(1), T(0)};
        }),
        SmoothMap::make(3, 3, [](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            return Vec<T>{T(1), T(0), q[1]};
        }),
    };
    return m;
}

inline ModelSpec particle_spec() {
    ModelSpec s;
    s.name = "particle";
    s.model = particle_model();
    s.sample_lo = {-2, -2, -2};
    s.sample_hi = {2, 2, 2};

    auto closed_form = [](double mu, double E, double branch) {
        return SmoothMap::make(3, 3, [mu, E, branch](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            using std::sqrt;
            T y = q[1];
            T root = sqrt(1.0 + y * y);
            T lx = mu / root;
            return Vec<T>{lx, T(branch * std::sqrt(2 * E - mu * mu)), y * lx};
        });
    };
    s.builtin_one_forms["closed-form"] = {closed_form(0.6, 0.5, +1.0), "closed-form"};
    // stays in M but fails the HJ equation
    s.builtin_one_forms["perturbed"] = {
        SmoothMap::make(3, 3, [](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            T f = 1.0 + q[0] * q[0];
            return Vec<T>{T(0), f, T(0)};
        }),
        "perturbed"};
    for (int i = 0; i <= 40; ++i) s.default_hj_grid.push_back({0.3, -2.0 + 0.1 * i, -0.2});
    return s;
}

// --- integrable control model: D = <d/dx, d/dy>, g = id -------------------

inline ModelSpec integrable_spec() {
    ModelSpec s;
    s.name = "integrable";
    Model m;
    m.n = 3;
    m.k = 2;
    m.coord_names = {"x", "y", "z"};
    m.metric = particle_model().metric;
    m.potential = particle_model().potential;
    auto axis = [](int i) {
        return SmoothMap::make(3, 3, [i](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            (void)q;
            Vec<T> v(3, T(0));
            v[i] = T(1);
            return v;
        });
    };
    m.d_frame = {axis(0), axis(1)};
    s.model = m;
    s.sample_lo = {-2, -2, -2};
    s.sample_hi = {2, 2, 2};
    s.builtin_one_forms["dx"] = {
        SmoothMap::make(3, 3, [](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            (void)q;
            return Vec<T>{T(1), T(0), T(0)};
        }),
        "dx"};
    for (int i = 0; i <= 20; ++i) s.default_hj_grid.push_back({-1.0 + 0.1 * i, 0.4, 0.1});
    return s;
}

// --- rolling ball on the plane --------------------------------------------
//
// Chart (x, y, theta, phi, psi) with z-x-z Euler angles on SO(3); the
// right-invariant fields and right Maurer-Cartan forms in this chart are
//   X1R = cos(phi) dtheta - cot(theta) sin(phi) dphi + sin(phi)/sin(theta) dpsi
//   X2R = sin(phi) dtheta + cot(theta) cos(phi) dphi - cos(phi)/sin(theta) dpsi
//   X3R = dphi
//   rho1 = cos(phi) dtheta + sin(theta) sin(phi) dpsi
//   rho2 = sin(phi) dtheta - sin(theta) cos(phi) dpsi
//   rho3 = dphi + cos(theta) dpsi

template <class T>
Mat<T> ball_right_invariant_fields(const Vec<T>& q) {
    using std::sin; using std::cos;
    T st = sin(q[2]), ct = cos(q[2]), sp = sin(q[3]), cp = cos(q[3]);
    Mat<T> X(5, 3);  // columns X1R, X2R, X3R in chart components
    X(2, 0) = cp;
    X(3, 0) = T(0) - ct * sp / st;
    X(4, 0) = sp / st;
    X(2, 1) = sp;
    X(3, 1) = ct * cp / st;
    X(4, 1) = T(0) - cp / st;
    X(3, 2) = T(1);
    return X;
}

inline Model rolling_ball_model(double mass, double inertia, double radius) {
    if (!(mass > 0 && inertia > 0 && radius > 0))
        throw std::invalid_argument("rolling_ball: m, I, r must be positive");
    Model md;
    md.n = 5;
    md.k = 3;
    md.coord_names = {"x", "y", "theta", "phi", "psi"};
    md.metric = SmoothMap::make(5, 25, [mass, inertia](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        using std::cos;
        Mat<T> g(5, 5);
        g(0, 0) = g(1, 1) = T(mass);
        g(2, 2) = T(inertia);
        g(3, 3) = g(4, 4) = T(inertia);
        g(3, 4) = g(4, 3) = inertia * cos(q[2]);
        return g.a;
    });
    md.potential = SmoothMap::make_scalar(5, [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        (void)q;
        return T(0);
    });
    auto field = [radius](int which) {
        // which: 0 -> e_a = dx + X2R/r, 1 -> e_b = dy - X1R/r, 2 -> e_c = X3R
        return SmoothMap::make(5, 5, [radius, which](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            Mat<T> X = ball_right_invariant_fields(q);
            Vec<T> v(5, T(0));
            if (which == 0) {
                v[0] = T(1);
                for (int i = 2; i < 5; ++i) v[i] = X(i, 1) / radius;
            } else if (which == 1) {
                v[1] = T(1);
                for (int i = 2; i < 5; ++i) v[i] = T(0) - X(i, 0) / radius;
            } else {
                v[3] = T(1);
            }
            return v;
        });
    };
    md.d_frame = {field(0), field(1), field(2)};
    md.domain_guard = [](const Vec<double>& q) {
        return q[2] > 0.05 && q[2] < 3.09159;
    };
    return md;
}

inline ModelSpec rolling_ball_spec(double mass = 1.0, double inertia = 0.4, double radius = 1.0) {
    ModelSpec s;
    s.name = "ball";
    s.params = {{"m", mass}, {"I", inertia}, {"r", radius}};
    s.model = rolling_ball_model(mass, inertia, radius);
    s.sample_lo = {-1, -1, 0.2, -2, -2};
    s.sample_hi = {1, 1, M_PI - 0.2, 2, 2};
    for (int a = 0; a < 3; ++a) {
        MObservable f = momentum_observable(s.model, a);
        f.label = std::string("f_") + "abc"[a];
        s.first_integrals.push_back(f);
    }
    auto constant_form = [&](double ca, double cb, double cc) {
        Model md = s.model;
        return SmoothMap::make(5, 5, [md, ca, cb, cc](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            auto fr = adapted_frame(md, q);
            Vec<T> l(5, T(0));
            double c[3] = {ca, cb, cc};
            for (int a = 0; a < 3; ++a)
                for (int i = 0; i < 5; ++i) l[i] += c[a] * fr.coframe(a, i);
            return l;
        });
    };
    s.builtin_one_forms["constant"] = {constant_form(1.0, 1.0, 1.0), "constant"};
    {
        Model md = s.model;
        s.builtin_one_forms["perturbed"] = {
            SmoothMap::make(5, 5, [md](const auto& q) {
                using T = std::decay_t<decltype(q[0])>;
                auto fr = adapted_frame(md, q);
                Vec<T> l(5, T(0));
                T ca = 1.0 + q[0] * q[0];
                for (int i = 0; i < 5; ++i)
                    l[i] += ca * fr.coframe(0, i) + 1.0 * fr.coframe(1, i) + 1.0 * fr.coframe(2, i);
                return l;
            }),
            "perturbed"};
    }
    for (int i = 0; i <= 30; ++i) {
        double th = 0.2 + i * (M_PI - 0.4) / 30.0;
        s.default_hj_grid.push_back({0.3, -0.4, th, 0.7, -1.1});
    }
    return s;
}

inline ModelSpec build_model_spec(const std::string& name,
                                  const std::map<std::string, double>& params = {}) {
    auto get = [&](const std::string& key, double dflt) {
        auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    if (name == "particle") {
        ModelSpec s = particle_spec();
        s.params = params;
        return s;
    }
    if (name == "integrable") {
        ModelSpec s = integrable_spec();
        s.params = params;
        return s;
    }
    if (name == "ball") {
        double r = get("r", 1.0);
        return rolling_ball_spec(get("m", 1.0), get("I", 0.4 * r * r), r);
    }
    throw std::invalid_argument("unknown model '" + name + "' (known: particle, ball, integrable)");
}

} // namespace nonholo
