#include <catch2/catch_amalgamated.hpp>

#include <nonholo/diff.hpp>
#include <nonholo/models.hpp>
#include <nonholo/sampling.hpp>

#include "oracles.hpp"

using namespace nonholo;

TEST_CASE("jacobian of the identity map") {
    auto id = SmoothMap::make(3, 3, [](const auto& q) { return q; });
    Mat<double> J = jacobian(id, {0.3, -1.2, 2.0});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(J(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("jacobian against hand differentiation") {
    // f(x,y,z) = (y, x, y*x)
    auto f = SmoothMap::make(3, 3, [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        return Vec<T>{q[1], q[0], q[1] * q[0]};
    });
    Mat<double> J = jacobian(f, {0.0, 1.0, 0.0});
    double expect[3][3] = {{0, 1, 0}, {1, 0, 0}, {1, 0, 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(J(i, j) == Catch::Approx(expect[i][j]).margin(1e-14));
}

TEST_CASE("linear map recovered exactly in dual mode") {
    Mat<double> A(2, 3);
    A(0, 0) = 1.5; A(0, 1) = -2.0; A(0, 2) = 0.25;
    A(1, 0) = 0.0; A(1, 1) = 3.0;  A(1, 2) = -1.0;
    auto f = SmoothMap::make(3, 2, [A](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        Vec<T> y(2, T(0));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) y[i] += A(i, j) * q[j];
        return y;
    });
    Mat<double> J = jacobian(f, {0.7, -0.1, 4.0});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) CHECK(J(i, j) == A(i, j));
}

TEST_CASE("directional derivative") {
    auto id = SmoothMap::make(3, 3, [](const auto& q) { return q; });
    CHECK(directional_derivative(id, {1, 2, 3}, {1, 0, 0}) == Vec<double>{1, 0, 0});
    CHECK(directional_derivative(id, {1, 2, 3}, {0, 0, 0}) == Vec<double>{0, 0, 0});

    auto sq = SmoothMap::make_scalar(1, [](const auto& q) { return q[0] * q[0]; });
    CHECK(directional_derivative(sq, {2.0}, {1.0})[0] == Catch::Approx(4.0));
}

TEST_CASE("directional derivative matches jacobian-vector product") {
    auto f = SmoothMap::make(2, 2, [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        using std::sin;
        return Vec<T>{sin(q[0] * q[1]), q[0] * q[0] - q[1]};
    });
    Vec<double> q{0.4, -1.1}, v{0.3, 0.8};
    Vec<double> d = directional_derivative(f, q, v);
    Vec<double> Jv = jacobian(f, q) * v;
    CHECK(norm_inf(d - Jv) < 1e-14);
}

TEST_CASE("second derivative on simple scalar maps") {
    auto c = SmoothMap::make_scalar(2, [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        (void)q;
        return T(7.0);
    });
    Mat<double> H = second_derivative(c, {1.0, 2.0});
    CHECK(norm_inf(H) == 0.0);

    auto xy = SmoothMap::make_scalar(2, [](const auto& q) { return q[0] * q[1]; });
    H = second_derivative(xy, {0.5, -0.4});
    CHECK(H(0, 0) == 0.0);
    CHECK(H(1, 1) == 0.0);
    CHECK(H(0, 1) == 1.0);
    CHECK(H(1, 0) == 1.0);

    auto norm2half = SmoothMap::make_scalar(3, [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        T s(0);
        for (const auto& v : q) s += v * v;
        return 0.5 * s;
    });
    H = second_derivative(norm2half, {1.0, -2.0, 0.5});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(H(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
}

TEST_CASE("jacobian is linear in the map (dual mode)") {
    auto f = SmoothMap::make_scalar(2, [](const auto& q) { return q[0] * q[0] * q[1]; });
    auto g = SmoothMap::make_scalar(2, [](const auto& q) {
        using std::sin;
        return sin(q[0]) + q[1];
    });
    double alpha = 2.5, beta = -0.75;
    auto comb = SmoothMap::make_scalar(2, [f, g, alpha, beta](const auto& q) {
        return alpha * f(q)[0] + beta * g(q)[0];
    });
    Vec<double> q{0.6, -1.3};
    Vec<double> dc = gradient(comb, q);
    Vec<double> df = gradient(f, q), dg = gradient(g, q);
    for (int j = 0; j < 2; ++j) CHECK(dc[j] == Catch::Approx(alpha * df[j] + beta * dg[j]).epsilon(1e-15));
}

TEST_CASE("dual and central-difference jacobians agree on built-in model fields") {
    for (const char* name : {"particle", "ball", "integrable"}) {
        ModelSpec spec = build_model_spec(name);
        Sampler sampler(20240u + std::string(name).size());
        std::vector<SmoothMap> fields = spec.model.d_frame;
        fields.push_back(spec.model.metric);
        fields.push_back(spec.model.potential);
        DiffConfig fd;
        fd.mode = DiffMode::central;
        for (int trial = 0; trial < 100; ++trial) {
            Vec<double> q = sampler.chart_point(spec);
            for (const auto& f : fields) {
                Mat<double> Jd = jacobian_dual(f, q);
                Mat<double> Jc = jacobian(f, q, fd);
                double scale = std::max(1.0, norm_inf(Jd));
                CHECK(norm_inf(Jd - Jc) <= std::max(fd.tol_cross, 1e-5 * scale));
            }
        }
    }
}

TEST_CASE("value-only maps refuse dual evaluation and fall back to FD") {
    auto f = SmoothMap::make_value_only(2, 1, [](const Vec<double>& q) {
        return Vec<double>{q[0] * q[1]};
    });
    CHECK_FALSE(f.has_dual());
    Vec<double> g = gradient(f, {2.0, 3.0});
    CHECK(g[0] == Catch::Approx(3.0).margin(1e-8));
    CHECK(g[1] == Catch::Approx(2.0).margin(1e-8));
}

TEST_CASE("dimension mismatch is reported") {
    auto id = SmoothMap::make(3, 3, [](const auto& q) { return q; });
    CHECK_THROWS_AS(jacobian(id, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(directional_derivative(id, {1.0, 2.0, 3.0}, {1.0}), std::invalid_argument);
}
