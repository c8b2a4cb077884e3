#pragma once

// Seeded random sampling of chart points and on-M phase points.

#include <random>

#include "models.hpp"

namespace nonholo {

class Sampler {
public:
    explicit Sampler(uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

    Vec<double> chart_point(const ModelSpec& spec) {
        Vec<double> q(spec.model.n);
        for (int i = 0; i < spec.model.n; ++i) q[i] = uniform(spec.sample_lo[i], spec.sample_hi[i]);
        return q;
    }

    // Random covector with components in [-1, 1].
    Vec<double> covector(int n) {
        Vec<double> p(n);
        for (int i = 0; i < n; ++i) p[i] = uniform(-1.0, 1.0);
        return p;
    }

    // Phase point on M: random q, random p projected by gamma.
    Vec<double> on_m_point(const ModelSpec& spec) {
        const int n = spec.model.n;
        Vec<double> q = chart_point(spec);
        Vec<double> p = apply_gamma(spec.model, q, covector(n));
        Vec<double> x(2 * n);
        for (int i = 0; i < n; ++i) { x[i] = q[i]; x[n + i] = p[i]; }
        return x;
    }

    Vec<double> phase_point(const ModelSpec& spec) {
        const int n = spec.model.n;
        Vec<double> q = chart_point(spec);
        Vec<double> p = covector(n);
        Vec<double> x(2 * n);
        for (int i = 0; i < n; ++i) { x[i] = q[i]; x[n + i] = p[i]; }
        return x;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace nonholo
