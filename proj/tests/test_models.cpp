#include <catch2/catch_amalgamated.hpp>

#include <nonholo/models.hpp>
#include <nonholo/sampling.hpp>

#include "oracles.hpp"

using namespace nonholo;

namespace {

// right Maurer-Cartan forms in the z-x-z Euler chart, rows rho_1..rho_3
// acting on (x, y, theta, phi, psi)
Mat<double> ball_right_forms(const Vec<double>& q) {
    double st = std::sin(q[2]), ct = std::cos(q[2]);
    double sp = std::sin(q[3]), cp = std::cos(q[3]);
    Mat<double> R(3, 5);
    R(0, 2) = cp;
    R(0, 4) = st * sp;
    R(1, 2) = sp;
    R(1, 4) = -st * cp;
    R(2, 3) = 1;
    R(2, 4) = ct;
    return R;
}

} // namespace

TEST_CASE("right-invariant fields and forms are dual bases") {
    Sampler sampler(107);
    ModelSpec spec = build_model_spec("ball");
    for (int trial = 0; trial < 50; ++trial) {
        Vec<double> q = sampler.chart_point(spec);
        Mat<double> X = ball_right_invariant_fields(q);
        Mat<double> R = ball_right_forms(q);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(dot(R.row(i), X.col(j)) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
    }
}

TEST_CASE("right-invariant field commutators") {
    // [X_i, X_j] = -eps_ijk X_k
    Sampler sampler(109);
    ModelSpec spec = build_model_spec("ball");
    auto field = [](int i) {
        return SmoothMap::make(5, 5, [i](const auto& q) {
            return ball_right_invariant_fields(q).col(i);
        });
    };
    for (int trial = 0; trial < 50; ++trial) {
        Vec<double> q = sampler.chart_point(spec);
        Mat<double> X = ball_right_invariant_fields(q);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Mat<double> Ji = jacobian(field(i), q), Jj = jacobian(field(j), q);
                Vec<double> lie = Jj * X.col(i) - Ji * X.col(j);
                Vec<double> expect(5, 0.0);
                int k = 3 - i - j;
                if (i != j) {
                    double eps = ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;  // eps_ijk cyclic
                    expect = axpy(-eps, X.col(k), expect);
                }
                CHECK(norm_inf(lie - expect) < 1e-10);
            }
    }
}

TEST_CASE("ball metric is the right-invariant inertia metric") {
    double I = 0.4, mass = 1.0;
    ModelSpec spec = build_model_spec("ball");
    Sampler sampler(113);
    for (int trial = 0; trial < 30; ++trial) {
        Vec<double> q = sampler.chart_point(spec);
        Mat<double> g = metric_at(spec.model, q);
        Mat<double> R = ball_right_forms(q);
        // expected: m(dx^2 + dy^2) + I sum_i rho_i x rho_i
        Mat<double> expect(5, 5);
        expect(0, 0) = expect(1, 1) = mass;
        for (int i = 0; i < 3; ++i)
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 5; ++c) expect(r, c) += I * R(i, r) * R(i, c);
        CHECK(norm_inf(g - expect) < 1e-12);
    }
}

TEST_CASE("ball coframe matches the constraint-adapted forms") {
    // mu^a = r/(I+mr^2) (mr dx + I rho_2), mu^b = r/(I+mr^2) (mr dy - I rho_1),
    // mu^c = rho_3
    double I = 0.4, mass = 1.0, r = 1.0;
    ModelSpec spec = build_model_spec("ball");
    Sampler sampler(127);
    double denom = I + mass * r * r;
    for (int trial = 0; trial < 30; ++trial) {
        Vec<double> q = sampler.chart_point(spec);
        AdaptedFrame fr = adapted_frame(spec.model, q);
        Mat<double> R = ball_right_forms(q);
        for (int i = 0; i < 5; ++i) {
            double dx = i == 0 ? 1.0 : 0.0, dy = i == 1 ? 1.0 : 0.0;
            CHECK(fr.coframe(0, i) ==
                  Catch::Approx(r / denom * (mass * r * dx + I * R(1, i))).margin(1e-10));
            CHECK(fr.coframe(1, i) ==
                  Catch::Approx(r / denom * (mass * r * dy - I * R(0, i))).margin(1e-10));
            CHECK(fr.coframe(2, i) == Catch::Approx(R(2, i)).margin(1e-10));
        }
    }
}

TEST_CASE("ball scales with its parameters") {
    ModelSpec spec = build_model_spec("ball", {{"m", 2.0}, {"r", 0.5}});
    CHECK(spec.params.at("m") == 2.0);
    CHECK(spec.params.at("I") == Catch::Approx(0.4 * 0.25));  // default I = 0.4 r^2
    CHECK(spec.params.at("r") == 0.5);
    Vec<double> q{0.0, 0.0, 1.0, 0.2, -0.3};
    Mat<double> g = metric_at(spec.model, q);
    CHECK(g(0, 0) == 2.0);
    CHECK(g(2, 2) == Catch::Approx(0.1));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(rolling_ball_model(-1.0, 0.4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rolling_ball_model(1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_model_spec("ball", {{"r", -2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_model_spec("nosuch"), std::invalid_argument);
}

TEST_CASE("chart domain guard") {
    ModelSpec spec = build_model_spec("ball");
    CHECK_FALSE(spec.model.in_domain({0, 0, 0.01, 0, 0}));
    CHECK_FALSE(spec.model.in_domain({0, 0, 3.14, 0, 0}));
    CHECK(spec.model.in_domain({0, 0, 1.5, 0, 0}));
    // samplers respect the guard
    Sampler sampler(131);
    for (int trial = 0; trial < 200; ++trial)
        CHECK(spec.model.in_domain(sampler.chart_point(spec)));
    // particle chart is global
    ModelSpec part = build_model_spec("particle");
    CHECK(part.model.in_domain({1e6, -1e6, 0}));
}

TEST_CASE("model registry exposes the expected data") {
    for (const char* name : {"particle", "ball", "integrable"}) {
        ModelSpec spec = build_model_spec(name);
        CHECK(spec.name == name);
        CHECK(static_cast<int>(spec.model.d_frame.size()) == spec.model.k);
        CHECK(static_cast<int>(spec.sample_lo.size()) == spec.model.n);
        CHECK_FALSE(spec.builtin_one_forms.empty());
        CHECK_FALSE(spec.default_hj_grid.empty());
        for (const auto& q : spec.default_hj_grid) CHECK(spec.model.in_domain(q));
    }
    ModelSpec ball = build_model_spec("ball");
    REQUIRE(ball.first_integrals.size() == 3);
    CHECK(ball.first_integrals[0].label == "f_a");
    CHECK(ball.first_integrals[1].label == "f_b");
    CHECK(ball.first_integrals[2].label == "f_c");
}

TEST_CASE("ball first integrals are the adapted momenta") {
    ModelSpec spec = build_model_spec("ball");
    const Model& m = spec.model;
    Sampler sampler(137);
    for (int trial = 0; trial < 20; ++trial) {
        Vec<double> x = sampler.on_m_point(spec);
        Vec<double> pi = adapted_momenta(m, x);
        for (int a = 0; a < 3; ++a)
            CHECK(spec.first_integrals[a].eval(m, x) == Catch::Approx(pi[a]).margin(1e-13));
    }
}
