#pragma once

// System data (Q, g, V, D) in a single chart.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "diff.hpp"
#include "linalg.hpp"

namespace nonholo {

struct Model {
    int n = 0;  // chart dimension
    int k = 0;  // rank of D
    std::vector<std::string> coord_names;
    SmoothMap metric;                  // q -> n*n entries, row-major, symmetric
    SmoothMap potential;               // q -> scalar
    std::vector<SmoothMap> d_frame;    // k vector fields spanning D
    std::function<bool(const Vec<double>&)> domain_guard;  // optional chart validity

    bool in_domain(const Vec<double>& q) const {
        return !domain_guard || domain_guard(q);
    }
};

template <class T>
Mat<T> metric_at(const Model& model, const Vec<T>& q) {
    Vec<T> flat = model.metric(q);
    Mat<T> g(model.n, model.n);
    g.a = std::move(flat);
    return g;
}

// Musical isomorphisms of g.
template <class T>
Vec<T> flat_g(const Model& model, const Vec<T>& q, const Vec<T>& v) {
    return metric_at(model, q) * v;
}

template <class T>
Vec<T> sharp_g(const Model& model, const Vec<T>& q, const Vec<T>& p) {
    Mat<T> g = metric_at(model, q);
    try {
        return solve_spd(g, p);
    } catch (const std::runtime_error&) {
        if constexpr (std::is_same_v<T, double>) {
            throw std::runtime_error("sharp: metric not SPD at q (smallest eigenvalue " +
                                     std::to_string(smallest_eigenvalue_sym(g)) + ")");
        } else {
            throw;
        }
    }
}

} // namespace nonholo
